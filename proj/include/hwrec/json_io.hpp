#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hwrec/domain.hpp"

namespace hwrec {

using nlohmann::json;

// UTC timestamps are carried as ISO-8601 with millisecond precision,
// e.g. "2026-08-15T12:00:00.123Z".
std::string format_utc_ms(std::int64_t ms_since_epoch);
std::int64_t parse_utc_ms(const std::string& iso);

void to_json(json& j, const ModelCard& m);
void from_json(const json& j, ModelCard& m);
void to_json(json& j, const HardwareProfile& h);
void from_json(const json& j, HardwareProfile& h);
void to_json(json& j, const TaskDescriptor& t);
void from_json(const json& j, TaskDescriptor& t);
void to_json(json& j, const BenchmarkRecord& r);
void from_json(const json& j, BenchmarkRecord& r);
void to_json(json& j, const WeightConfig& w);
void from_json(const json& j, WeightConfig& w);
void to_json(json& j, const RankingTable& t);
void from_json(const json& j, RankingTable& t);

json metric_map_to_json(const MetricMap& m);
MetricMap metric_map_from_json(const json& j);

// Parses a file containing one JSON document. Throws DataError with the
// parser's byte offset on malformed input.
json parse_json_file(const std::string& path);
json parse_json_text(const std::string& text, const std::string& origin);

// Writes via a temp file + rename so readers never see a partial document.
void write_json_file(const std::string& path, const json& j);

std::string read_text_file(const std::string& path);

}  // namespace hwrec
