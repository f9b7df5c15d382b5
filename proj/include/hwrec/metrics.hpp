#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"

namespace hwrec {

struct MetricSample {
  Metric kind;
  double value = 0.0;
};

// Linear composite over hardware metrics used as the environmental-impact
// score: offset + sum(coefficients[k] * value[k]). The exact published
// formula is not pinned down anywhere we can cite, so the composite is
// configuration; the shipped default is illustrative.
struct CompositeSpec {
  MetricMap coefficients;
  double offset = 0.0;

  std::vector<std::string> validate() const;  // hardware-group metrics only
};

CompositeSpec default_composite_spec();

struct ClassificationMetrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro-averaged
  double recall = 0.0;     // macro-averaged
  double f1 = 0.0;         // harmonic mean of the two above
  // Classes whose precision/recall contribution was forced to 0 because the
  // denominator was empty.
  std::vector<int> zero_predicted_classes;
  std::vector<int> zero_actual_classes;
};

// Confusion matrix convention: confusion[i][j] counts samples of true class i
// predicted as class j. Precision and recall are macro-averaged over classes,
// which keeps the result invariant under class relabeling. Throws DataError
// on a non-square or all-zero matrix or negative entries.
ClassificationMetrics classification_metrics(
    const std::vector<std::vector<std::int64_t>>& confusion);

double harmonic_f1(double precision, double recall);

// offset + sum of coefficient * metric value. Throws DataError naming the
// metric if a referenced value is absent.
double carbon_footprint(const MetricMap& metrics, const CompositeSpec& spec);

// value / threshold. Threshold must be positive.
double normalize(Metric kind, double value, double threshold);

}  // namespace hwrec
