#include "hwrec/json_io.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "hwrec/errors.hpp"

namespace hwrec {

std::string format_utc_ms(std::int64_t ms_since_epoch) {
  std::time_t secs = static_cast<std::time_t>(ms_since_epoch / 1000);
  int ms = static_cast<int>(ms_since_epoch % 1000);
  if (ms < 0) {  // floor division for pre-epoch instants
    ms += 1000;
    secs -= 1;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, ms);
  return buf;
}

std::int64_t parse_utc_ms(const std::string& iso) {
  std::tm tm{};
  int ms = 0;
  int consumed = 0;
  int n = std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d.%dZ%n", &tm.tm_year,
                      &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min,
                      &tm.tm_sec, &ms, &consumed);
  if (n != 7 || consumed != static_cast<int>(iso.size()) || ms < 0 || ms > 999)
    throw DataError("bad timestamp '" + iso +
                    "' (expected YYYY-MM-DDThh:mm:ss.mmmZ)");
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  if (secs == static_cast<std::time_t>(-1))
    throw DataError("timestamp out of range: '" + iso + "'");
  return static_cast<std::int64_t>(secs) * 1000 + ms;
}

json metric_map_to_json(const MetricMap& m) {
  json j = json::object();
  for (const auto& [metric, value] : m) j[metric_name(metric)] = value;
  return j;
}

MetricMap metric_map_from_json(const json& j) {
  if (!j.is_object()) throw DataError("metrics must be a JSON object");
  MetricMap m;
  for (const auto& [key, value] : j.items()) {
    auto metric = parse_metric(key);
    if (!metric) throw DataError("unknown metric '" + key + "'");
    if (!value.is_number())
      throw DataError("metric '" + key + "' must be a number");
    m[*metric] = value.get<double>();
  }
  return m;
}

void to_json(json& j, const ModelCard& m) {
  j = json{{"id", m.id},
           {"name", m.name},
           {"architecture_family", m.architecture_family},
           {"param_count", m.param_count},
           {"model_features", m.model_features},
           {"source_task", m.source_task}};
}

void from_json(const json& j, ModelCard& m) {
  j.at("id").get_to(m.id);
  j.at("name").get_to(m.name);
  j.at("architecture_family").get_to(m.architecture_family);
  j.at("param_count").get_to(m.param_count);
  j.at("model_features").get_to(m.model_features);
  j.at("source_task").get_to(m.source_task);
}

void to_json(json& j, const HardwareProfile& h) {
  j = json{{"id", h.id},
           {"device_name", h.device_name},
           {"cpu_model", h.cpu_model},
           {"cpu_cores", h.cpu_cores},
           {"cpu_freq_mhz", h.cpu_freq_mhz},
           {"ram_mb", h.ram_mb},
           {"storage_mb", h.storage_mb},
           {"accelerator", h.accelerator ? json(*h.accelerator) : json(nullptr)},
           {"hw_features", h.hw_features}};
}

void from_json(const json& j, HardwareProfile& h) {
  j.at("id").get_to(h.id);
  j.at("device_name").get_to(h.device_name);
  j.at("cpu_model").get_to(h.cpu_model);
  j.at("cpu_cores").get_to(h.cpu_cores);
  j.at("cpu_freq_mhz").get_to(h.cpu_freq_mhz);
  j.at("ram_mb").get_to(h.ram_mb);
  j.at("storage_mb").get_to(h.storage_mb);
  if (j.contains("accelerator") && !j.at("accelerator").is_null())
    h.accelerator = j.at("accelerator").get<std::string>();
  else
    h.accelerator.reset();
  j.at("hw_features").get_to(h.hw_features);
}

void to_json(json& j, const TaskDescriptor& t) {
  j = json{{"id", t.id},
           {"dataset_name", t.dataset_name},
           {"num_classes", t.num_classes},
           {"num_samples", t.num_samples},
           {"input_shape", t.input_shape},
           {"task_features", t.task_features}};
}

void from_json(const json& j, TaskDescriptor& t) {
  j.at("id").get_to(t.id);
  j.at("dataset_name").get_to(t.dataset_name);
  j.at("num_classes").get_to(t.num_classes);
  j.at("num_samples").get_to(t.num_samples);
  j.at("input_shape").get_to(t.input_shape);
  j.at("task_features").get_to(t.task_features);
}

void to_json(json& j, const BenchmarkRecord& r) {
  j = json{{"model_id", r.model_id},
           {"task_id", r.task_id},
           {"hardware_id", r.hardware_id},
           {"batch_size", r.batch_size},
           {"phase", phase_name(r.phase)},
           {"metrics", metric_map_to_json(r.metrics)},
           {"timestamp", format_utc_ms(r.timestamp_ms)},
           {"stabilized", r.stabilized}};
}

void from_json(const json& j, BenchmarkRecord& r) {
  j.at("model_id").get_to(r.model_id);
  j.at("task_id").get_to(r.task_id);
  j.at("hardware_id").get_to(r.hardware_id);
  j.at("batch_size").get_to(r.batch_size);
  auto phase = parse_phase(j.at("phase").get<std::string>());
  if (!phase)
    throw DataError("unknown phase '" + j.at("phase").get<std::string>() + "'");
  r.phase = *phase;
  r.metrics = metric_map_from_json(j.at("metrics"));
  r.timestamp_ms = parse_utc_ms(j.at("timestamp").get<std::string>());
  j.at("stabilized").get_to(r.stabilized);
}

void to_json(json& j, const WeightConfig& w) {
  j = json{{"weights", metric_map_to_json(w.weights)},
           {"thresholds", metric_map_to_json(w.thresholds)}};
}

void from_json(const json& j, WeightConfig& w) {
  w.weights = metric_map_from_json(j.at("weights"));
  w.thresholds = metric_map_from_json(j.at("thresholds"));
}

void to_json(json& j, const RankingTable& t) {
  j = json{{"candidate_ids", t.candidate_ids},
           {"scores", t.scores},
           {"method", t.method},
           {"ties", t.ties}};
}

void from_json(const json& j, RankingTable& t) {
  j.at("candidate_ids").get_to(t.candidate_ids);
  j.at("scores").get_to(t.scores);
  j.at("method").get_to(t.method);
  if (j.contains("ties"))
    j.at("ties").get_to(t.ties);
  else
    t.ties.clear();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw DataError("read failed for '" + path + "'");
  return buf.str();
}

json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": " + e.what());
  }
}

json parse_json_file(const std::string& path) {
  return parse_json_text(read_text_file(path), path);
}

void write_json_file(const std::string& path, const json& j) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw DataError("rename failed: '" + tmp + "' -> '" + path + "'");
}

}  // namespace hwrec
