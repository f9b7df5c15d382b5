#include "hwrec/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "hwrec/errors.hpp"

namespace hwrec {

const char* metric_name(Metric m) {
  switch (m) {
    case Metric::ExecutionTimeMs: return "execution_time_ms";
    case Metric::MemoryMb: return "memory_mb";
    case Metric::PowerW: return "power_w";
    case Metric::CpuTempC: return "cpu_temp_c";
    case Metric::CarbonFootprint: return "carbon_footprint";
    case Metric::Accuracy: return "accuracy";
    case Metric::Precision: return "precision";
    case Metric::Recall: return "recall";
    case Metric::F1: return "f1";
  }
  return "?";
}

MetricGroup metric_group(Metric m) {
  switch (m) {
    case Metric::ExecutionTimeMs:
    case Metric::MemoryMb:
    case Metric::PowerW:
    case Metric::CpuTempC:
    case Metric::CarbonFootprint:
      return MetricGroup::Hardware;
    default:
      return MetricGroup::Model;
  }
}

Direction metric_direction(Metric m) {
  return metric_group(m) == MetricGroup::Hardware ? Direction::LowerIsBetter
                                                  : Direction::HigherIsBetter;
}

std::optional<Metric> parse_metric(std::string_view name) {
  for (Metric m : kAllMetrics)
    if (name == metric_name(m)) return m;
  return std::nullopt;
}

const char* phase_name(Phase p) {
  return p == Phase::BatchSweep ? "batch_sweep" : "fixed_batch";
}

std::optional<Phase> parse_phase(std::string_view name) {
  if (name == "batch_sweep") return Phase::BatchSweep;
  if (name == "fixed_batch") return Phase::FixedBatch;
  return std::nullopt;
}

std::vector<std::string> record_issues(const BenchmarkRecord& record) {
  std::vector<std::string> problems;
  if (record.model_id.empty()) problems.push_back("empty model_id");
  if (record.task_id.empty()) problems.push_back("empty task_id");
  if (record.hardware_id.empty()) problems.push_back("empty hardware_id");
  if (record.batch_size < 1) problems.push_back("batch_size must be >= 1");
  for (Metric m : kAllMetrics) {
    auto it = record.metrics.find(m);
    if (it == record.metrics.end()) {
      if (metric_group(m) == MetricGroup::Hardware)
        problems.push_back(std::string("missing hardware metric ") + metric_name(m));
      continue;
    }
    double v = it->second;
    if (!std::isfinite(v)) {
      problems.push_back(std::string(metric_name(m)) + " is not finite");
      continue;
    }
    switch (m) {
      case Metric::ExecutionTimeMs:
        if (v <= 0.0) problems.push_back("execution_time_ms must be > 0");
        break;
      case Metric::MemoryMb:
        if (v < 0.0) problems.push_back("memory_mb must be >= 0");
        break;
      case Metric::PowerW:
        if (v < 0.0) problems.push_back("power_w must be >= 0");
        break;
      default:
        if (metric_group(m) == MetricGroup::Model && (v < 0.0 || v > 1.0))
          problems.push_back(std::string(metric_name(m)) + " must be in [0,1]");
        break;
    }
  }
  return problems;
}

std::vector<std::string> WeightConfig::validate() const {
  std::vector<std::string> problems;
  double sum = 0.0;
  for (const auto& [metric, w] : weights) {
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      problems.push_back(std::string(metric_name(metric)) +
                         ": weight must be in [0,1], got " + std::to_string(w));
      continue;
    }
    sum += w;
    if (w > 0.0) {
      auto th = thresholds.find(metric);
      if (th == thresholds.end())
        problems.push_back(std::string(metric_name(metric)) +
                           ": weighted metric has no threshold");
      else if (!std::isfinite(th->second) || th->second <= 0.0)
        problems.push_back(std::string(metric_name(metric)) +
                           ": threshold must be positive, got " +
                           std::to_string(th->second));
    }
  }
  for (const auto& [metric, th] : thresholds) {
    if (!std::isfinite(th) || th <= 0.0) {
      bool weighted = false;
      auto it = weights.find(metric);
      if (it != weights.end() && it->second > 0.0) weighted = true;
      if (!weighted)  // weighted case already reported above
        problems.push_back(std::string(metric_name(metric)) +
                           ": threshold must be positive, got " +
                           std::to_string(th));
    }
  }
  if (!weights.empty() && std::abs(sum - 1.0) > 1e-9)
    problems.push_back("weights must sum to 1, got " + std::to_string(sum));
  return problems;
}

RankingTable make_ranking_table(std::vector<std::pair<std::string, double>> scored,
                                std::string method) {
  for (const auto& [id, score] : scored)
    if (!std::isfinite(score))
      throw DataError("non-finite score for candidate '" + id + "'");
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  RankingTable table;
  table.method = std::move(method);
  table.candidate_ids.reserve(scored.size());
  table.scores.reserve(scored.size());
  for (auto& [id, score] : scored) {
    table.candidate_ids.push_back(std::move(id));
    table.scores.push_back(score);
  }
  std::size_t i = 0;
  while (i < table.scores.size()) {
    std::size_t j = i + 1;
    while (j < table.scores.size() && table.scores[j] == table.scores[i]) ++j;
    if (j - i > 1) {
      std::vector<std::size_t> group;
      for (std::size_t g = i; g < j; ++g) group.push_back(g);
      table.ties.push_back(std::move(group));
    }
    i = j;
  }
  return table;
}

std::vector<int> rank_positions(const RankingTable& table) {
  std::vector<int> pos(table.scores.size(), 0);
  for (std::size_t i = 1; i < table.scores.size(); ++i)
    pos[i] = table.scores[i] == table.scores[i - 1] ? pos[i - 1]
                                                    : static_cast<int>(i);
  return pos;
}

std::unordered_map<std::string, int> position_by_id(const RankingTable& table) {
  auto pos = rank_positions(table);
  std::unordered_map<std::string, int> out;
  out.reserve(pos.size());
  for (std::size_t i = 0; i < pos.size(); ++i)
    out.emplace(table.candidate_ids[i], pos[i]);
  return out;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& issue : issues)
    os << issue.kind << " '" << issue.id << "': " << issue.message << "\n";
  return os.str();
}

namespace {

bool all_finite(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

template <typename T, typename Fn>
void check_unique_ids(const std::vector<T>& entries, const char* kind,
                      ValidationReport& report, Fn&& per_entry) {
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (e.id.empty()) {
      report.issues.push_back({kind, e.id, "empty id"});
      continue;
    }
    if (!seen.insert(e.id).second)
      report.issues.push_back({kind, e.id, "duplicate id"});
    per_entry(e);
  }
}

}  // namespace

ValidationReport validate_registry(const std::vector<ModelCard>& models,
                                   const std::vector<HardwareProfile>& hardware,
                                   const std::vector<TaskDescriptor>& tasks) {
  ValidationReport report;

  std::optional<std::size_t> model_feat_dim;
  check_unique_ids(models, "model", report, [&](const ModelCard& m) {
    if (m.param_count <= 0)
      report.issues.push_back({"model", m.id, "param_count must be positive"});
    if (!all_finite(m.model_features))
      report.issues.push_back({"model", m.id, "non-finite model_features"});
    if (!model_feat_dim) {
      model_feat_dim = m.model_features.size();
    } else if (m.model_features.size() != *model_feat_dim) {
      report.issues.push_back(
          {"model", m.id,
           "model_features dimension " + std::to_string(m.model_features.size()) +
               " differs from first entry's " + std::to_string(*model_feat_dim)});
    }
  });

  std::optional<std::size_t> hw_feat_dim;
  check_unique_ids(hardware, "hardware", report, [&](const HardwareProfile& h) {
    if (h.cpu_cores <= 0)
      report.issues.push_back({"hardware", h.id, "cpu_cores must be positive"});
    if (h.cpu_freq_mhz <= 0.0)
      report.issues.push_back({"hardware", h.id, "cpu_freq_mhz must be positive"});
    if (h.ram_mb <= 0.0)
      report.issues.push_back({"hardware", h.id, "ram_mb must be positive"});
    if (h.storage_mb <= 0.0)
      report.issues.push_back({"hardware", h.id, "storage_mb must be positive"});
    if (!all_finite(h.hw_features))
      report.issues.push_back({"hardware", h.id, "non-finite hw_features"});
    if (!hw_feat_dim) {
      hw_feat_dim = h.hw_features.size();
    } else if (h.hw_features.size() != *hw_feat_dim) {
      report.issues.push_back(
          {"hardware", h.id,
           "hw_features dimension " + std::to_string(h.hw_features.size()) +
               " differs from first entry's " + std::to_string(*hw_feat_dim)});
    }
  });

  std::optional<std::size_t> task_feat_dim;
  check_unique_ids(tasks, "task", report, [&](const TaskDescriptor& t) {
    if (t.num_classes < 2)
      report.issues.push_back({"task", t.id, "num_classes must be at least 2"});
    if (t.num_samples <= 0)
      report.issues.push_back({"task", t.id, "num_samples must be positive"});
    if (t.input_shape.empty())
      report.issues.push_back({"task", t.id, "input_shape must be non-empty"});
    for (auto d : t.input_shape)
      if (d <= 0) {
        report.issues.push_back({"task", t.id, "input_shape dims must be positive"});
        break;
      }
    if (!all_finite(t.task_features))
      report.issues.push_back({"task", t.id, "non-finite task_features"});
    if (!task_feat_dim) {
      task_feat_dim = t.task_features.size();
    } else if (t.task_features.size() != *task_feat_dim) {
      report.issues.push_back(
          {"task", t.id,
           "task_features dimension " + std::to_string(t.task_features.size()) +
               " differs from first entry's " + std::to_string(*task_feat_dim)});
    }
  });

  return report;
}

}  // namespace hwrec
