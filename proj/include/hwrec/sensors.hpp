#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hwrec/harness.hpp"

namespace hwrec {

// Test fixture: replays scripted sequences. Each read consumes the next
// value of its sequence and sticks at the last one. Also keeps an event log
// so tests can assert call order.
class ScriptedSensors : public SensorProvider {
 public:
  struct Script {
    std::vector<double> cpu_util{0.05};
    std::vector<double> ram_util{0.20};
    std::vector<double> cpu_temp_c{40.0};
    std::vector<double> power_w{5.0};
    std::vector<double> peak_memory_mb{64.0};
  };

  ScriptedSensors() = default;
  explicit ScriptedSensors(Script script) : script_(std::move(script)) {}

  double cpu_util() override;
  double ram_util() override;
  double cpu_temp_c() override;
  double power_w() override;
  MemoryWindow begin_memory_window() override;
  double peak_memory_mb(MemoryWindow w) override;

  const std::vector<std::string>& events() const { return events_; }
  void fail_next(const std::string& sensor) { fail_sensor_ = sensor; }

 private:
  double next(std::vector<double>& seq, std::size_t& idx, const char* name);

  Script script_;
  std::size_t cpu_idx_ = 0, ram_idx_ = 0, temp_idx_ = 0, power_idx_ = 0,
              mem_idx_ = 0;
  MemoryWindow window_counter_ = 0;
  std::vector<std::string> events_;
  std::string fail_sensor_;
};

// Best-effort readings from the machine this process runs on: /proc/stat,
// /proc/meminfo, the first thermal zone, RAPL energy counters when exposed,
// and the process RSS high-water mark. Missing sources degrade to documented
// fallbacks (temperature 40 C, power 0 W) rather than failing the run.
class HostSensors : public SensorProvider {
 public:
  HostSensors();

  double cpu_util() override;
  double ram_util() override;
  double cpu_temp_c() override;
  double power_w() override;
  MemoryWindow begin_memory_window() override;
  double peak_memory_mb(MemoryWindow w) override;

 private:
  std::uint64_t prev_busy_ = 0, prev_total_ = 0;
  double window_baseline_mb_ = 0.0;
  MemoryWindow window_counter_ = 0;
  std::uint64_t prev_energy_uj_ = 0;
  std::int64_t prev_energy_ms_ = 0;
  std::string rapl_path_;
  std::string thermal_path_;
};

}  // namespace hwrec
