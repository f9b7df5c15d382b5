#include "hwrec/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "hwrec/errors.hpp"

namespace hwrec {

std::optional<Statistic> parse_statistic(std::string_view s) {
  if (s == "mean") return Statistic::Mean;
  if (s == "median") return Statistic::Median;
  return std::nullopt;
}

std::optional<Combiner> parse_combiner(std::string_view s) {
  if (s == "sum") return Combiner::Sum;
  if (s == "product") return Combiner::Product;
  return std::nullopt;
}

WeightConfig default_weight_config() {
  WeightConfig config;
  config.weights = {{Metric::ExecutionTimeMs, 0.25},
                    {Metric::MemoryMb, 0.15},
                    {Metric::PowerW, 0.15},
                    {Metric::CarbonFootprint, 0.15},
                    {Metric::Accuracy, 0.30}};
  config.thresholds = {{Metric::ExecutionTimeMs, 100.0},
                       {Metric::MemoryMb, 1024.0},
                       {Metric::PowerW, 5.0},
                       {Metric::CarbonFootprint, 10.9},
                       {Metric::CpuTempC, 70.0},
                       {Metric::Accuracy, 0.92}};
  return config;
}

std::optional<WeightConfig> weight_preset(std::string_view name) {
  WeightConfig config = default_weight_config();
  if (name == "balanced") return config;
  if (name == "speed") {
    config.weights = {{Metric::ExecutionTimeMs, 0.70},
                      {Metric::MemoryMb, 0.10},
                      {Metric::PowerW, 0.05},
                      {Metric::CarbonFootprint, 0.05},
                      {Metric::Accuracy, 0.10}};
    return config;
  }
  if (name == "energy") {
    config.weights = {{Metric::ExecutionTimeMs, 0.10},
                      {Metric::MemoryMb, 0.10},
                      {Metric::PowerW, 0.40},
                      {Metric::CarbonFootprint, 0.30},
                      {Metric::Accuracy, 0.10}};
    return config;
  }
  if (name == "accuracy") {
    config.weights = {{Metric::ExecutionTimeMs, 0.10},
                      {Metric::MemoryMb, 0.05},
                      {Metric::PowerW, 0.05},
                      {Metric::CarbonFootprint, 0.10},
                      {Metric::Accuracy, 0.70}};
    return config;
  }
  return std::nullopt;
}

AggregateResult aggregate_records(const std::vector<BenchmarkRecord>& records,
                                  const std::string& task_id,
                                  const std::string& hardware_id,
                                  Statistic statistic) {
  std::map<std::string, std::map<Metric, std::vector<double>>> samples;
  std::set<std::string> sweep_only;

  for (const auto& r : records) {
    if (r.task_id != task_id || r.hardware_id != hardware_id)
      throw DataError("record for (" + r.task_id + ", " + r.hardware_id +
                      ") outside aggregation scope (" + task_id + ", " +
                      hardware_id + ")");
    if (r.phase == Phase::BatchSweep) {
      sweep_only.insert(r.model_id);
      continue;
    }
    auto& per_metric = samples[r.model_id];
    for (const auto& [metric, value] : r.metrics)
      per_metric[metric].push_back(value);
  }

  AggregateResult result;
  for (auto& [model_id, per_metric] : samples) {
    sweep_only.erase(model_id);
    MetricMap aggregated;
    for (auto& [metric, values] : per_metric) {
      if (statistic == Statistic::Mean) {
        double sum = 0.0;
        for (double v : values) sum += v;
        aggregated[metric] = sum / static_cast<double>(values.size());
      } else {
        std::sort(values.begin(), values.end());
        const std::size_t n = values.size();
        aggregated[metric] = (n % 2 == 1)
                                 ? values[n / 2]
                                 : (values[n / 2 - 1] + values[n / 2]) / 2.0;
      }
    }
    result.per_model.emplace(model_id, std::move(aggregated));
  }
  for (const auto& id : sweep_only)
    result.warnings.push_back("model '" + id +
                              "' has only sweep records; excluded");
  return result;
}

MetricRanking rank_by_metric(const std::map<std::string, MetricMap>& aggregates,
                             Metric kind) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(aggregates.size());
  const bool lower_better = metric_direction(kind) == Direction::LowerIsBetter;
  for (const auto& [id, metrics] : aggregates) {
    auto it = metrics.find(kind);
    if (it == metrics.end())
      throw DataError("model '" + id + "' lacks metric " + metric_name(kind));
    scored.emplace_back(id, lower_better ? -it->second : it->second);
  }
  MetricRanking ranking;
  ranking.kind = kind;
  ranking.table = make_ranking_table(std::move(scored), metric_name(kind));
  return ranking;
}

namespace {

// Canonical candidate list shared by every voting entry point: sorted ids of
// the first table, checked for exact agreement with the rest.
std::vector<std::string> common_candidates(const std::vector<RankingTable>& tables) {
  if (tables.empty()) throw DataError("no rankings to combine");
  std::vector<std::string> ids = tables.front().candidate_ids;
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
    throw DataError("duplicate candidate id in ranking");
  for (const auto& t : tables) {
    std::vector<std::string> other = t.candidate_ids;
    std::sort(other.begin(), other.end());
    if (other != ids)
      throw DataError("rankings disagree on the candidate set");
  }
  return ids;
}

std::vector<std::vector<int>> voter_positions(
    const std::vector<RankingTable>& tables,
    const std::vector<std::string>& candidates) {
  std::vector<std::vector<int>> positions;
  positions.reserve(tables.size());
  for (const auto& t : tables) {
    auto by_id = position_by_id(t);
    std::vector<int> pos(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
      pos[i] = by_id.at(candidates[i]);
    positions.push_back(std::move(pos));
  }
  return positions;
}

RankingTable table_from_scores(const std::vector<std::string>& candidates,
                               const std::vector<double>& scores,
                               std::string method) {
  std::vector<std::pair<std::string, double>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scored.emplace_back(candidates[i], scores[i]);
  return make_ranking_table(std::move(scored), std::move(method));
}

}  // namespace

PairwiseTally pairwise_tally(const std::vector<RankingTable>& tables,
                             const std::vector<double>& weights,
                             kernels::Exec exec) {
  if (tables.size() != weights.size())
    throw DataError("one weight per ranking required");
  PairwiseTally tally;
  tally.candidates = common_candidates(tables);
  const auto positions = voter_positions(tables, tally.candidates);
  tally.wins = kernels::pairwise_win_matrix(tally.candidates.size(), positions,
                                            weights, exec);
  return tally;
}

RankingTable weighted_copeland_tables(const std::vector<RankingTable>& tables,
                                      const std::vector<double>& weights,
                                      const std::string& method,
                                      kernels::Exec exec) {
  const PairwiseTally tally = pairwise_tally(tables, weights, exec);
  const auto scores = kernels::copeland_scores(
      tally.wins, tally.candidates.size(), kernels::kPairwiseTieEps, exec);
  return table_from_scores(tally.candidates, scores, method);
}

RankingTable weighted_copeland(const std::vector<MetricRanking>& rankings,
                               const WeightConfig& config, kernels::Exec exec) {
  auto problems = config.validate();
  if (!problems.empty())
    throw DataError("invalid weight config: " + problems.front());
  // The configured voters and the supplied rankings must agree: a ranking
  // without a weight (or a positively weighted metric without a ranking)
  // would silently drop a voter.
  std::vector<RankingTable> tables;
  std::vector<double> weights;
  tables.reserve(rankings.size());
  std::set<Metric> supplied;
  for (const auto& r : rankings) {
    if (!supplied.insert(r.kind).second)
      throw DataError(std::string("duplicate ranking for metric ") +
                      metric_name(r.kind));
    auto it = config.weights.find(r.kind);
    if (it == config.weights.end())
      throw DataError(std::string("no weight configured for metric ") +
                      metric_name(r.kind));
    tables.push_back(r.table);
    weights.push_back(it->second);
  }
  for (const auto& [metric, weight] : config.weights)
    if (weight > 0.0 && supplied.count(metric) == 0)
      throw DataError(std::string("weighted metric ") + metric_name(metric) +
                      " has no ranking");
  return weighted_copeland_tables(tables, weights, "copeland", exec);
}

double objective_score(double f_alpha, const MetricMap& hw_metrics,
                       const WeightConfig& config, Combiner combiner) {
  double sum = 0.0, product = 1.0;
  bool any = false;
  for (const auto& [metric, w] : config.weights) {
    if (metric_group(metric) != MetricGroup::Hardware) continue;
    any = true;
    if (w == 0.0) {
      // Neutral contribution; the metric value is not even required.
      sum += 1.0;
      continue;
    }
    auto th = config.thresholds.find(metric);
    if (th == config.thresholds.end() || !(th->second > 0.0))
      throw DataError(std::string("objective needs a positive threshold for ") +
                      metric_name(metric));
    auto it = hw_metrics.find(metric);
    if (it == hw_metrics.end())
      throw DataError(std::string("objective needs metric ") + metric_name(metric));
    double ratio;
    if (metric_direction(metric) == Direction::LowerIsBetter) {
      if (!(it->second > 0.0))
        throw DataError(std::string("objective needs positive ") +
                        metric_name(metric) + ", got " +
                        std::to_string(it->second));
      ratio = th->second / it->second;
    } else {
      ratio = it->second / th->second;
    }
    const double term = std::pow(ratio, w);
    sum += term;
    product *= term;
  }
  const double factor =
      !any ? 1.0 : (combiner == Combiner::Sum ? sum : product);
  return f_alpha * factor;
}

RankingTable rank_by_objective(
    const std::map<std::string, ObjectiveCandidate>& candidates,
    const WeightConfig& config, Combiner combiner, kernels::Exec exec) {
  std::vector<std::string> ids;
  ids.reserve(candidates.size());
  for (const auto& [id, c] : candidates) ids.push_back(id);
  std::vector<double> scores(ids.size(), 0.0);

  const auto score_one = [&](std::size_t i) {
    const auto& c = candidates.at(ids[i]);
    return objective_score(c.f_alpha, c.hw_metrics, config, combiner);
  };
  if (exec == kernels::Exec::Parallel) {
    // Cells are independent; any thrown DataError is rethrown after the loop
    // (OpenMP regions must not leak exceptions).
    std::string error;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(ids.size());
         ++i) {
      try {
        scores[static_cast<std::size_t>(i)] =
            score_one(static_cast<std::size_t>(i));
      } catch (const std::exception& e) {
#pragma omp critical
        if (error.empty()) error = e.what();
      }
    }
    if (!error.empty()) throw DataError(error);
  } else {
    for (std::size_t i = 0; i < ids.size(); ++i) scores[i] = score_one(i);
  }
  return table_from_scores(ids, scores, "objective");
}

double kendall_tau(const RankingTable& a, const RankingTable& b,
                   kernels::Exec exec) {
  const auto candidates = common_candidates({a, b});
  const auto positions = voter_positions({a, b}, candidates);
  return kernels::tau_b_from_counts(
      kernels::tau_counts(positions[0], positions[1], exec));
}

void write_ranking_csv(const RankingTable& table, std::ostream& out) {
  out << "rank,model_id,score,method\n";
  const auto pos = rank_positions(table);
  std::ostringstream row;
  row << std::setprecision(17);
  for (std::size_t i = 0; i < table.candidate_ids.size(); ++i) {
    row.str("");
    row << (pos[i] + 1) << ',' << table.candidate_ids[i] << ','
        << table.scores[i] << ',' << table.method << '\n';
    out << row.str();
  }
}

}  // namespace hwrec
