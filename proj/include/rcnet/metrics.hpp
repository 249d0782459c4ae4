#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <json.hpp>

namespace rcnet::metrics {

/// K x K counts, rows = true class, columns = predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t num_classes);
  explicit ConfusionMatrix(std::vector<std::vector<std::uint64_t>> counts);

  /// Labels are 1-based class indices.
  void add(int true_label, int predicted_label, std::uint64_t count = 1);

  std::size_t num_classes() const noexcept { return k_; }
  std::uint64_t at(std::size_t true_index, std::size_t predicted_index) const {
    return counts_[true_index * k_ + predicted_index];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(std::size_t i) const;
  std::uint64_t col_sum(std::size_t j) const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::size_t k_;
  std::vector<std::uint64_t> counts_;
};

/// trace / total.
double overall_accuracy(const ConfusionMatrix& cm);

/// Per-class recall; nullopt for classes without true samples.
std::vector<std::optional<double>> per_class_accuracy(const ConfusionMatrix& cm);

/// 0-based indices of classes with an empty row.
std::vector<std::size_t> zero_support_classes(const ConfusionMatrix& cm);

/// Mean recall over classes with support. Zero-support classes are skipped
/// and a warning is written to std::clog.
double average_accuracy(const ConfusionMatrix& cm);

/// Cohen's kappa, (p_o - p_e) / (1 - p_e).
double kappa(const ConfusionMatrix& cm);

struct MetricsReport {
  double oa = 0.0;
  double aa = 0.0;
  double kappa = 0.0;
  std::vector<std::optional<double>> per_class;
};

MetricsReport compute_report(const ConfusionMatrix& cm);

/// {oa, aa, kappa, per_class} as percentages rounded to two decimals;
/// zero-support classes appear as null.
nlohmann::json report_to_json(const MetricsReport& report);

}  // namespace rcnet::metrics
