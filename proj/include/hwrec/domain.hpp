#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace hwrec {

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

enum class Metric {
  ExecutionTimeMs,
  MemoryMb,
  PowerW,
  CpuTempC,
  CarbonFootprint,
  Accuracy,
  Precision,
  Recall,
  F1,
};

enum class MetricGroup { Hardware, Model };
enum class Direction { LowerIsBetter, HigherIsBetter };

inline constexpr std::array<Metric, 9> kAllMetrics = {
    Metric::ExecutionTimeMs, Metric::MemoryMb,  Metric::PowerW,
    Metric::CpuTempC,        Metric::CarbonFootprint,
    Metric::Accuracy,        Metric::Precision, Metric::Recall,
    Metric::F1,
};

const char* metric_name(Metric m);
MetricGroup metric_group(Metric m);
// Hardware metrics: lower is better. Model metrics: higher is better.
Direction metric_direction(Metric m);
std::optional<Metric> parse_metric(std::string_view name);

// Ordered map so serialization and iteration are deterministic.
using MetricMap = std::map<Metric, double>;

// ---------------------------------------------------------------------------
// Registry entries
// ---------------------------------------------------------------------------

struct ModelCard {
  std::string id;
  std::string name;
  std::string architecture_family;
  std::int64_t param_count = 0;
  std::vector<double> model_features;  // input to the model extractor
  std::string source_task;
};

struct HardwareProfile {
  std::string id;
  std::string device_name;
  std::string cpu_model;
  int cpu_cores = 0;
  double cpu_freq_mhz = 0.0;
  double ram_mb = 0.0;
  double storage_mb = 0.0;
  std::optional<std::string> accelerator;
  std::vector<double> hw_features;  // input to the hardware extractor
};

struct TaskDescriptor {
  std::string id;
  std::string dataset_name;
  std::int64_t num_classes = 0;
  std::int64_t num_samples = 0;
  std::vector<std::int64_t> input_shape;
  std::vector<double> task_features;  // input to the task embedding
};

// ---------------------------------------------------------------------------
// Benchmark records
// ---------------------------------------------------------------------------

enum class Phase { BatchSweep, FixedBatch };

const char* phase_name(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

struct BenchmarkRecord {
  std::string model_id;
  std::string task_id;
  std::string hardware_id;
  int batch_size = 1;
  Phase phase = Phase::BatchSweep;
  MetricMap metrics;
  std::int64_t timestamp_ms = 0;  // UTC, milliseconds since epoch
  bool stabilized = false;
};

// Invariant check for a single record: all hardware-group metrics present,
// execution time positive, memory/power non-negative, model-group metrics in
// [0,1] when present. Returns human-readable problems; empty means valid.
std::vector<std::string> record_issues(const BenchmarkRecord& record);

// ---------------------------------------------------------------------------
// Ranking configuration and results
// ---------------------------------------------------------------------------

// Per-metric voter weights and normalization thresholds. Weights live in
// [0,1] and sum to 1; every metric carrying weight needs a positive
// threshold (in the metric's own units).
struct WeightConfig {
  MetricMap weights;
  MetricMap thresholds;

  // Returns human-readable problems; empty means valid.
  std::vector<std::string> validate() const;
};

struct RankingTable {
  std::vector<std::string> candidate_ids;  // best first
  std::vector<double> scores;              // non-increasing
  std::string method;                      // e.g. "copeland", "fusion"
  std::vector<std::vector<std::size_t>> ties;  // index groups with equal score
};

// Sorts (id, score) pairs into a table: score descending, ties broken by id
// ascending and recorded in `ties`. Rejects non-finite scores.
RankingTable make_ranking_table(std::vector<std::pair<std::string, double>> scored,
                                std::string method);

// Rank position per table entry; tied entries share a position
// (competition style: 0, 1, 1, 3, ...).
std::vector<int> rank_positions(const RankingTable& table);
std::unordered_map<std::string, int> position_by_id(const RankingTable& table);

// ---------------------------------------------------------------------------
// Registry validation
// ---------------------------------------------------------------------------

struct ValidationIssue {
  std::string kind;  // "model" | "hardware" | "task"
  std::string id;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  std::string to_string() const;
};

// Checks every registry invariant: unique ids, positive counts/sizes,
// consistent feature dimensions, finite feature values. Violations are
// reported as data, not thrown.
ValidationReport validate_registry(const std::vector<ModelCard>& models,
                                   const std::vector<HardwareProfile>& hardware,
                                   const std::vector<TaskDescriptor>& tasks);

}  // namespace hwrec
