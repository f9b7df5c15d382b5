#include "hwrec/metrics.hpp"

#include <cmath>

#include "hwrec/errors.hpp"

namespace hwrec {

std::vector<std::string> CompositeSpec::validate() const {
  std::vector<std::string> problems;
  for (const auto& [metric, coef] : coefficients) {
    if (metric_group(metric) != MetricGroup::Hardware)
      problems.push_back(std::string(metric_name(metric)) +
                         ": composite accepts hardware metrics only");
    if (!std::isfinite(coef))
      problems.push_back(std::string(metric_name(metric)) +
                         ": non-finite coefficient");
  }
  if (!std::isfinite(offset)) problems.push_back("non-finite offset");
  return problems;
}

CompositeSpec default_composite_spec() {
  // Power dominates; latency and memory contribute at a per-unit scale that
  // keeps typical values in single digits. Purely illustrative defaults.
  CompositeSpec spec;
  spec.coefficients = {{Metric::PowerW, 1.0},
                       {Metric::ExecutionTimeMs, 0.001},
                       {Metric::MemoryMb, 0.001}};
  spec.offset = 0.0;
  return spec;
}

double harmonic_f1(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

ClassificationMetrics classification_metrics(
    const std::vector<std::vector<std::int64_t>>& confusion) {
  const std::size_t k = confusion.size();
  if (k == 0) throw DataError("empty confusion matrix");
  for (const auto& row : confusion) {
    if (row.size() != k)
      throw DataError("confusion matrix must be square");
    for (auto v : row)
      if (v < 0) throw DataError("confusion matrix entries must be >= 0");
  }

  std::int64_t total = 0, diag = 0;
  std::vector<std::int64_t> row_sum(k, 0), col_sum(k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      row_sum[i] += confusion[i][j];
      col_sum[j] += confusion[i][j];
      total += confusion[i][j];
    }
    diag += confusion[i][i];
  }
  if (total == 0) throw DataError("confusion matrix is all zero");

  ClassificationMetrics out;
  out.accuracy = static_cast<double>(diag) / static_cast<double>(total);
  double prec_sum = 0.0, rec_sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    if (col_sum[c] == 0)
      out.zero_predicted_classes.push_back(static_cast<int>(c));
    else
      prec_sum += static_cast<double>(confusion[c][c]) /
                  static_cast<double>(col_sum[c]);
    if (row_sum[c] == 0)
      out.zero_actual_classes.push_back(static_cast<int>(c));
    else
      rec_sum += static_cast<double>(confusion[c][c]) /
                 static_cast<double>(row_sum[c]);
  }
  // Macro average over all classes; empty classes contribute 0.
  out.precision = prec_sum / static_cast<double>(k);
  out.recall = rec_sum / static_cast<double>(k);
  out.f1 = harmonic_f1(out.precision, out.recall);
  return out;
}

double carbon_footprint(const MetricMap& metrics, const CompositeSpec& spec) {
  double value = spec.offset;
  for (const auto& [metric, coef] : spec.coefficients) {
    auto it = metrics.find(metric);
    if (it == metrics.end())
      throw DataError(std::string("carbon composite needs metric ") +
                      metric_name(metric));
    value += coef * it->second;
  }
  return value;
}

double normalize(Metric kind, double value, double threshold) {
  if (!(threshold > 0.0))
    throw DataError(std::string("threshold for ") + metric_name(kind) +
                    " must be positive");
  return value / threshold;
}

}  // namespace hwrec
