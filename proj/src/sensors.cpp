#include "hwrec/sensors.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include "hwrec/errors.hpp"

namespace hwrec {

double ScriptedSensors::next(std::vector<double>& seq, std::size_t& idx,
                             const char* name) {
  if (fail_sensor_ == name) {
    fail_sensor_.clear();
    throw SensorError(name, "scripted failure");
  }
  events_.emplace_back(name);
  if (seq.empty()) throw SensorError(name, "empty script");
  const double value = seq[std::min(idx, seq.size() - 1)];
  ++idx;
  return value;
}

double ScriptedSensors::cpu_util() {
  return next(script_.cpu_util, cpu_idx_, "cpu_util");
}
double ScriptedSensors::ram_util() {
  return next(script_.ram_util, ram_idx_, "ram_util");
}
double ScriptedSensors::cpu_temp_c() {
  return next(script_.cpu_temp_c, temp_idx_, "cpu_temp_c");
}
double ScriptedSensors::power_w() {
  return next(script_.power_w, power_idx_, "power_w");
}

MemoryWindow ScriptedSensors::begin_memory_window() {
  events_.emplace_back("begin_memory_window");
  return ++window_counter_;
}

double ScriptedSensors::peak_memory_mb(MemoryWindow) {
  return next(script_.peak_memory_mb, mem_idx_, "peak_memory_mb");
}

// ---------------------------------------------------------------------------
// Host sensors
// ---------------------------------------------------------------------------

namespace {

constexpr double kFallbackTempC = 40.0;

std::optional<std::string> first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  return line;
}

std::int64_t steady_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch())
      .count();
}

double vm_hwm_mb() {
  std::ifstream in("/proc/self/status");
  std::string line;
  while (std::getline(in, line)) {
    long kb = 0;
    if (std::sscanf(line.c_str(), "VmHWM: %ld kB", &kb) == 1)
      return static_cast<double>(kb) / 1024.0;
  }
  return 0.0;
}

}  // namespace

HostSensors::HostSensors() {
  for (int zone = 0; zone < 8; ++zone) {
    std::string path =
        "/sys/class/thermal/thermal_zone" + std::to_string(zone) + "/temp";
    if (first_line(path)) {
      thermal_path_ = path;
      break;
    }
  }
  const std::string rapl = "/sys/class/powercap/intel-rapl:0/energy_uj";
  if (first_line(rapl)) rapl_path_ = rapl;
}

double HostSensors::cpu_util() {
  auto line = first_line("/proc/stat");
  if (!line) return 0.0;
  std::istringstream is(*line);
  std::string label;
  is >> label;
  std::uint64_t v = 0, total = 0, idle_all = 0;
  for (int field = 0; is >> v; ++field) {
    total += v;
    if (field == 3 || field == 4) idle_all += v;  // idle + iowait
  }
  const std::uint64_t busy = total - idle_all;
  double util = 0.0;
  if (prev_total_ != 0 && total > prev_total_)
    util = static_cast<double>(busy - prev_busy_) /
           static_cast<double>(total - prev_total_);
  prev_busy_ = busy;
  prev_total_ = total;
  return util;
}

double HostSensors::ram_util() {
  std::ifstream in("/proc/meminfo");
  std::string line;
  std::uint64_t total_kb = 0, avail_kb = 0;
  while (std::getline(in, line)) {
    std::sscanf(line.c_str(), "MemTotal: %lu kB", &total_kb);
    std::sscanf(line.c_str(), "MemAvailable: %lu kB", &avail_kb);
  }
  if (total_kb == 0) return 0.0;
  return 1.0 - static_cast<double>(avail_kb) / static_cast<double>(total_kb);
}

double HostSensors::cpu_temp_c() {
  if (thermal_path_.empty()) return kFallbackTempC;
  auto line = first_line(thermal_path_);
  if (!line) return kFallbackTempC;
  try {
    return std::stod(*line) / 1000.0;  // sysfs reports millidegrees
  } catch (...) {
    return kFallbackTempC;
  }
}

double HostSensors::power_w() {
  if (rapl_path_.empty()) return 0.0;
  auto line = first_line(rapl_path_);
  if (!line) return 0.0;
  std::uint64_t energy_uj = 0;
  try {
    energy_uj = std::stoull(*line);
  } catch (...) {
    return 0.0;
  }
  const std::int64_t now = steady_ms();
  double watts = 0.0;
  if (prev_energy_ms_ != 0 && now > prev_energy_ms_ &&
      energy_uj > prev_energy_uj_) {
    const double joules =
        static_cast<double>(energy_uj - prev_energy_uj_) / 1e6;
    watts = joules / (static_cast<double>(now - prev_energy_ms_) / 1000.0);
  }
  prev_energy_uj_ = energy_uj;
  prev_energy_ms_ = now;
  return watts;
}

MemoryWindow HostSensors::begin_memory_window() {
  window_baseline_mb_ = vm_hwm_mb();
  return ++window_counter_;
}

double HostSensors::peak_memory_mb(MemoryWindow) {
  const double now = vm_hwm_mb();
  return now > window_baseline_mb_ ? now - window_baseline_mb_ : 0.0;
}

}  // namespace hwrec
