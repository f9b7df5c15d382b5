#include "hwrec/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "hwrec/errors.hpp"

namespace hwrec {

std::int64_t SteadyTime::now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch())
      .count();
}

void SteadyTime::sleep_ms(int ms) {
  std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

std::int64_t SteadyTime::wall_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch())
      .count();
}

namespace {

TimeSource& shared_time() {
  static SteadyTime time;
  return time;
}

TimeSource& pick_time(const HarnessOptions& opts) {
  return opts.time ? *opts.time : shared_time();
}

}  // namespace

StabilizeOutcome stabilize(SensorProvider& sensors, const StabilizePolicy& policy,
                           TimeSource& time) {
  StabilizeOutcome outcome;
  const std::int64_t start = time.now_ms();
  for (;;) {
    ++outcome.polls;
    outcome.last.cpu_util = sensors.cpu_util();
    outcome.last.ram_util = sensors.ram_util();
    outcome.last.cpu_temp_c = sensors.cpu_temp_c();
    const bool nominal = outcome.last.cpu_util <= policy.max_cpu_util &&
                         outcome.last.ram_util <= policy.max_ram_util &&
                         outcome.last.cpu_temp_c >= policy.temp_low_c &&
                         outcome.last.cpu_temp_c <= policy.temp_high_c;
    outcome.waited_ms = time.now_ms() - start;
    if (nominal) {
      outcome.stabilized = true;
      return outcome;
    }
    if (outcome.waited_ms >= policy.timeout_ms) {
      outcome.stabilized = false;
      return outcome;
    }
    time.sleep_ms(policy.poll_interval_ms);
  }
}

namespace {

// One measured forward pass: open the memory window, run, then read the
// sensors. Every record carries the full hardware metric group plus the
// derived composite; accuracy is attached when the pass scored anything.
BenchmarkRecord measure_once(Workload& workload, SensorProvider& sensors,
                             const RunIds& ids, Phase phase, int batch,
                             const StabilizeOutcome& stab,
                             const HarnessOptions& opts, TimeSource& time,
                             WorkResult* result_out) {
  if (opts.observer) opts.observer->on_forward(ids, phase, batch);
  const MemoryWindow window = sensors.begin_memory_window();
  const WorkResult result = workload.forward(batch);
  BenchmarkRecord record;
  record.model_id = ids.model_id;
  record.task_id = ids.task_id;
  record.hardware_id = ids.hardware_id;
  record.batch_size = batch;
  record.phase = phase;
  record.stabilized = stab.stabilized;
  record.timestamp_ms = time.wall_now_ms();
  record.metrics[Metric::ExecutionTimeMs] = result.latency_ms;
  record.metrics[Metric::MemoryMb] = sensors.peak_memory_mb(window);
  record.metrics[Metric::PowerW] = sensors.power_w();
  record.metrics[Metric::CpuTempC] = sensors.cpu_temp_c();
  record.metrics[Metric::CarbonFootprint] =
      carbon_footprint(record.metrics, opts.composite);
  if (result.total > 0)
    record.metrics[Metric::Accuracy] =
        static_cast<double>(result.correct) / static_cast<double>(result.total);
  if (result_out) *result_out = result;
  return record;
}

}  // namespace

MeasureResult batch_sweep(Workload& workload, SensorProvider& sensors,
                          const StabilizeOutcome& stab, const RunIds& ids,
                          const HarnessOptions& opts) {
  if (opts.sweep_min_batch < 1 || opts.sweep_max_batch < opts.sweep_min_batch)
    throw DataError("bad sweep range");
  MeasureResult out;
  TimeSource& time = pick_time(opts);
  for (int batch = opts.sweep_min_batch; batch <= opts.sweep_max_batch; ++batch) {
    for (int rep = 0; rep < opts.sweep_repeats; ++rep) {
      try {
        out.records.push_back(measure_once(workload, sensors, ids,
                                           Phase::BatchSweep, batch, stab, opts,
                                           time, nullptr));
      } catch (const std::exception& e) {
        out.error = "batch_sweep batch " + std::to_string(batch) + ": " + e.what();
        return out;
      }
    }
  }
  return out;
}

MeasureResult fixed_batch_run(Workload& workload, SensorProvider& sensors,
                              const StabilizeOutcome& stab, const RunIds& ids,
                              std::int64_t dataset_size,
                              const HarnessOptions& opts) {
  if (dataset_size <= 0) throw DataError("dataset_size must be positive");
  if (opts.fixed_batch < 1) throw DataError("fixed_batch must be >= 1");
  MeasureResult out;
  TimeSource& time = pick_time(opts);
  std::int64_t remaining = dataset_size;
  while (remaining > 0) {
    const int batch = static_cast<int>(
        std::min<std::int64_t>(remaining, opts.fixed_batch));
    try {
      out.records.push_back(measure_once(workload, sensors, ids,
                                         Phase::FixedBatch, batch, stab, opts,
                                         time, nullptr));
    } catch (const std::exception& e) {
      out.error = "fixed_batch after " + std::to_string(dataset_size - remaining) +
                  " of " + std::to_string(dataset_size) + " samples: " + e.what();
      return out;
    }
    remaining -= batch;
  }
  return out;
}

RunReport benchmark_pairs(const std::vector<WorkloadPair>& pairs,
                          const HardwareProfile& hardware,
                          SensorProvider& sensors, const StabilizePolicy& policy,
                          const RecordSink& sink, const HarnessOptions& opts) {
  RunReport report;
  report.hardware_id = hardware.id;
  TimeSource& time = pick_time(opts);

  StabilizeOutcome stab = stabilize(sensors, policy, time);
  if (opts.observer) opts.observer->on_stabilize(stab);

  for (const auto& pair : pairs) {
    PairReport pr;
    pr.model_id = pair.model_id;
    pr.task_id = pair.task.id;
    pr.stabilized_before = stab.stabilized;

    const RunIds ids{pair.model_id, pair.task.id, hardware.id};
    const auto emit = [&](const std::vector<BenchmarkRecord>& records) {
      for (const auto& r : records) {
        sink(r);
        ++pr.records;
        ++report.total_records;
      }
    };

    std::optional<std::string> error;
    const MeasureResult sweep =
        batch_sweep(*pair.workload, sensors, stab, ids, opts);
    emit(sweep.records);
    error = sweep.error;

    if (!error) {
      const MeasureResult fixed = fixed_batch_run(
          *pair.workload, sensors, stab, ids, pair.task.num_samples, opts);
      emit(fixed.records);
      error = fixed.error;

      double latency_sum = 0.0, power_sum = 0.0;
      std::size_t fixed_count = 0;
      for (const auto& r : fixed.records) {
        latency_sum += r.metrics.at(Metric::ExecutionTimeMs);
        power_sum += r.metrics.at(Metric::PowerW);
        pr.peak_memory_mb =
            std::max(pr.peak_memory_mb, r.metrics.at(Metric::MemoryMb));
        auto acc = r.metrics.find(Metric::Accuracy);
        if (acc != r.metrics.end()) {
          pr.correct += static_cast<std::int64_t>(
              std::llround(acc->second * r.batch_size));
          pr.total += r.batch_size;
        }
        ++fixed_count;
      }
      if (fixed_count > 0) {
        pr.mean_latency_b32_ms = latency_sum / static_cast<double>(fixed_count);
        pr.mean_power_w = power_sum / static_cast<double>(fixed_count);
      }
      if (pr.total > 0)
        pr.accuracy =
            static_cast<double>(pr.correct) / static_cast<double>(pr.total);
    }

    pr.completed = !error.has_value();
    if (error) pr.error = *error;
    if (opts.observer) opts.observer->on_pair_done(pr);
    report.pairs.push_back(std::move(pr));

    stab = stabilize(sensors, policy, time);
    if (opts.observer) opts.observer->on_stabilize(stab);
  }
  return report;
}

std::string render_run_report(const RunReport& report) {
  std::ostringstream os;
  os << "hardware " << report.hardware_id << ": " << report.pairs.size()
     << " pair(s), " << report.total_records << " record(s)\n";
  char line[256];
  for (const auto& p : report.pairs) {
    if (p.completed) {
      std::snprintf(line, sizeof(line),
                    "  %s on %s: %zu records, latency %.3f ms, peak mem %.1f MB, "
                    "power %.2f W, accuracy %.4f%s\n",
                    p.model_id.c_str(), p.task_id.c_str(), p.records,
                    p.mean_latency_b32_ms, p.peak_memory_mb, p.mean_power_w,
                    p.accuracy, p.stabilized_before ? "" : " [not stabilized]");
    } else {
      std::snprintf(line, sizeof(line), "  %s on %s: FAILED (%s), %zu records kept\n",
                    p.model_id.c_str(), p.task_id.c_str(), p.error.c_str(),
                    p.records);
    }
    os << line;
  }
  return os.str();
}

}  // namespace hwrec
