#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/metrics.hpp"

namespace hwrec {

// ---------------------------------------------------------------------------
// Seams: workload, sensors, time
// ---------------------------------------------------------------------------

struct WorkResult {
  double latency_ms = 0.0;
  std::int64_t correct = 0;
  std::int64_t total = 0;
};

// One forward pass at a given batch size. This is where a real inference
// engine would plug in; the shipped implementation is the synthetic one.
class Workload {
 public:
  virtual ~Workload() = default;
  virtual WorkResult forward(int batch_size) = 0;
  virtual std::string description() const = 0;
};

using MemoryWindow = std::uint64_t;

class SensorProvider {
 public:
  virtual ~SensorProvider() = default;
  virtual double cpu_util() = 0;    // fraction in [0,1]
  virtual double ram_util() = 0;    // fraction in [0,1]
  virtual double cpu_temp_c() = 0;
  virtual double power_w() = 0;     // mean W over the last pass
  // Peak memory is reported as the high-water mark inside the window minus
  // the baseline captured when the window opened.
  virtual MemoryWindow begin_memory_window() = 0;
  virtual double peak_memory_mb(MemoryWindow w) = 0;
};

// Injectable time so stabilization loops are testable without wall delays.
class TimeSource {
 public:
  virtual ~TimeSource() = default;
  virtual std::int64_t now_ms() = 0;            // monotonic
  virtual void sleep_ms(int ms) = 0;
  virtual std::int64_t wall_now_ms() = 0;       // UTC epoch ms, for records
};

class SteadyTime : public TimeSource {
 public:
  std::int64_t now_ms() override;
  void sleep_ms(int ms) override;
  std::int64_t wall_now_ms() override;
};

class FakeTime : public TimeSource {
 public:
  explicit FakeTime(std::int64_t wall_start_ms = 1700000000000LL)
      : wall_start_ms_(wall_start_ms) {}
  std::int64_t now_ms() override { return now_; }
  void sleep_ms(int ms) override { now_ += ms; }
  std::int64_t wall_now_ms() override { return wall_start_ms_ + now_; }

 private:
  std::int64_t now_ = 0;
  std::int64_t wall_start_ms_;
};

// ---------------------------------------------------------------------------
// Stabilization
// ---------------------------------------------------------------------------

struct StabilizePolicy {
  double max_cpu_util = 0.20;
  double max_ram_util = 0.80;
  double temp_low_c = 0.0;
  double temp_high_c = 70.0;
  int poll_interval_ms = 50;
  int timeout_ms = 5000;
};

struct SensorReadings {
  double cpu_util = 0.0;
  double ram_util = 0.0;
  double cpu_temp_c = 0.0;
};

struct StabilizeOutcome {
  bool stabilized = false;
  std::int64_t waited_ms = 0;
  SensorReadings last;
  int polls = 0;
};

// Polls until cpu/ram utilization and temperature are all nominal, or the
// timeout elapses. A timeout is not an error; callers carry the flag into
// the records they emit.
StabilizeOutcome stabilize(SensorProvider& sensors, const StabilizePolicy& policy,
                           TimeSource& time);

// ---------------------------------------------------------------------------
// Measurement runs
// ---------------------------------------------------------------------------

struct RunIds {
  std::string model_id;
  std::string task_id;
  std::string hardware_id;
};

struct PairReport {
  std::string model_id;
  std::string task_id;
  bool completed = false;
  std::string error;  // empty when completed
  std::size_t records = 0;
  double mean_latency_b32_ms = 0.0;
  double peak_memory_mb = 0.0;
  double mean_power_w = 0.0;
  double accuracy = 0.0;  // correct/total over fixed-batch passes
  std::int64_t correct = 0;
  std::int64_t total = 0;
  bool stabilized_before = false;
};

struct RunReport {
  std::string hardware_id;
  std::vector<PairReport> pairs;
  std::size_t total_records = 0;
};

// Optional observer for asserting call order in tests.
class RunObserver {
 public:
  virtual ~RunObserver() = default;
  virtual void on_stabilize(const StabilizeOutcome&) {}
  virtual void on_forward(const RunIds&, Phase, int /*batch_size*/) {}
  virtual void on_pair_done(const PairReport&) {}
};

struct HarnessOptions {
  CompositeSpec composite = default_composite_spec();
  // Forward passes per sweep batch size. The default of one pass per size
  // matches the record-count law; raise it for jitter studies.
  int sweep_repeats = 1;
  int sweep_min_batch = 1;
  int sweep_max_batch = 100;
  int fixed_batch = 32;
  RunObserver* observer = nullptr;
  TimeSource* time = nullptr;  // null -> shared steady clock
};

struct MeasureResult {
  std::vector<BenchmarkRecord> records;
  // Set when the workload failed mid-run; records collected so far are kept.
  std::optional<std::string> error;
};

// One forward pass per batch size over the sweep range. The caller must have
// run stabilize() first; its outcome is stamped onto every record.
MeasureResult batch_sweep(Workload& workload, SensorProvider& sensors,
                          const StabilizeOutcome& stab, const RunIds& ids,
                          const HarnessOptions& opts = {});

// Fixed-batch pass over the whole dataset: ceil(dataset_size/fixed_batch)
// records, the last one smaller when the dataset does not divide evenly.
MeasureResult fixed_batch_run(Workload& workload, SensorProvider& sensors,
                              const StabilizeOutcome& stab, const RunIds& ids,
                              std::int64_t dataset_size,
                              const HarnessOptions& opts = {});

struct WorkloadPair {
  std::string model_id;
  TaskDescriptor task;
  std::shared_ptr<Workload> workload;
};

using RecordSink = std::function<void(const BenchmarkRecord&)>;

// Full procedure over (model, dataset) pairs on one device: stabilize once
// up front, then per pair run the sweep, the fixed-batch pass, and stabilize
// again. Pair failures are isolated; remaining pairs still run.
RunReport benchmark_pairs(const std::vector<WorkloadPair>& pairs,
                          const HardwareProfile& hardware,
                          SensorProvider& sensors, const StabilizePolicy& policy,
                          const RecordSink& sink,
                          const HarnessOptions& opts = {});

std::string render_run_report(const RunReport& report);

}  // namespace hwrec
