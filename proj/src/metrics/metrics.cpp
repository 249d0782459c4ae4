#include "rcnet/metrics.hpp"

#include <cmath>
#include <iostream>
#include <string>

#include "rcnet/error.hpp"

namespace rcnet::metrics {

ConfusionMatrix::ConfusionMatrix(std::size_t num_classes)
    : k_(num_classes), counts_(num_classes * num_classes, 0) {
  require(num_classes >= 1, ErrorCode::kInvalidArgument, "confusion matrix needs K >= 1");
}

ConfusionMatrix::ConfusionMatrix(std::vector<std::vector<std::uint64_t>> counts)
    : ConfusionMatrix(counts.size()) {
  for (std::size_t i = 0; i < k_; ++i) {
    require(counts[i].size() == k_, ErrorCode::kShapeMismatch, "confusion matrix must be square");
    for (std::size_t j = 0; j < k_; ++j) counts_[i * k_ + j] = counts[i][j];
  }
}

void ConfusionMatrix::add(int true_label, int predicted_label, std::uint64_t count) {
  const int k = static_cast<int>(k_);
  if (true_label < 1 || true_label > k || predicted_label < 1 || predicted_label > k) {
    fail(ErrorCode::kInvalidArgument, "confusion matrix: label outside 1.." + std::to_string(k));
  }
  counts_[static_cast<std::size_t>(true_label - 1) * k_ +
          static_cast<std::size_t>(predicted_label - 1)] += count;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto v : counts_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, i);
  return t;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t i) const {
  std::uint64_t t = 0;
  for (std::size_t j = 0; j < k_; ++j) t += at(i, j);
  return t;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t j) const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < k_; ++i) t += at(i, j);
  return t;
}

namespace {

void require_nonempty(const ConfusionMatrix& cm) {
  if (cm.total() == 0) fail(ErrorCode::kInvalidArgument, "metrics: confusion matrix is empty");
}

}  // namespace

double overall_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  return static_cast<double>(cm.trace()) / static_cast<double>(cm.total());
}

std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& cm) {
  std::vector<std::optional<double>> out(cm.num_classes());
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    const auto support = cm.row_sum(i);
    if (support > 0) out[i] = static_cast<double>(cm.at(i, i)) / static_cast<double>(support);
  }
  return out;
}

std::vector<std::size_t> zero_support_classes(const ConfusionMatrix& cm) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < cm.num_classes(); ++i) {
    if (cm.row_sum(i) == 0) out.push_back(i);
  }
  return out;
}

double average_accuracy(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& recall : per_class_accuracy(cm)) {
    if (!recall) continue;
    sum += *recall;
    ++n;
  }
  const auto skipped = zero_support_classes(cm);
  if (!skipped.empty()) {
    std::clog << "warning: average accuracy excludes " << skipped.size()
              << " class(es) with no true samples:";
    for (auto i : skipped) std::clog << ' ' << i + 1;
    std::clog << '\n';
  }
  return sum / static_cast<double>(n);
}

double kappa(const ConfusionMatrix& cm) {
  require_nonempty(cm);
  // Integer form: (T * trace - sum r_k c_k) / (T^2 - sum r_k c_k).
  using Wide = unsigned __int128;
  const Wide total = cm.total();
  Wide chance = 0;
  for (std::size_t k = 0; k < cm.num_classes(); ++k) {
    chance += static_cast<Wide>(cm.row_sum(k)) * cm.col_sum(k);
  }
  const Wide denom = total * total - chance;
  if (denom == 0) {
    fail(ErrorCode::kUndefined, "kappa undefined: chance agreement equals 1");
  }
  const Wide agree = total * cm.trace();
  const long double num = agree >= chance ? static_cast<long double>(agree - chance)
                                          : -static_cast<long double>(chance - agree);
  return static_cast<double>(num / static_cast<long double>(denom));
}

MetricsReport compute_report(const ConfusionMatrix& cm) {
  return {overall_accuracy(cm), average_accuracy(cm), kappa(cm), per_class_accuracy(cm)};
}

nlohmann::json report_to_json(const MetricsReport& report) {
  auto pct = [](double v) { return std::round(v * 10000.0) / 100.0; };
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& v : report.per_class) {
    per_class.push_back(v ? nlohmann::json(pct(*v)) : nlohmann::json(nullptr));
  }
  return {{"oa", pct(report.oa)},
          {"aa", pct(report.aa)},
          {"kappa", pct(report.kappa)},
          {"per_class", per_class}};
}

}  // namespace rcnet::metrics
