#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/kernels.hpp"

namespace hwrec {

struct MetricRanking {
  Metric kind;
  // Direction-aware: best value first. Scores are preference scores
  // (higher = better), i.e. the aggregated value for higher-is-better
  // metrics and its negation for lower-is-better ones.
  RankingTable table;
};

struct PairwiseTally {
  std::vector<std::string> candidates;
  // wins[a*n+b] = total voter weight ranking a strictly above b.
  std::vector<double> wins;
};

enum class Statistic { Mean, Median };
enum class Combiner { Sum, Product };

std::optional<Statistic> parse_statistic(std::string_view s);
std::optional<Combiner> parse_combiner(std::string_view s);

// Balanced default: weight on latency, memory, power, carbon and accuracy;
// thresholds are the nominal targets those weights normalize against.
// Temperature carries a threshold but no weight (it gates stabilization
// instead of voting).
WeightConfig default_weight_config();
// Named presets: "balanced", "speed", "energy", "accuracy".
std::optional<WeightConfig> weight_preset(std::string_view name);

struct AggregateResult {
  // model id -> metric -> aggregated value over fixed-batch records.
  std::map<std::string, MetricMap> per_model;
  std::vector<std::string> warnings;
};

// Aggregates fixed-batch records for one (task, hardware) scope. Sweep
// records are diagnostics and are ignored. Records outside the scope are a
// precondition violation (DataError). Models that appear only in sweep
// records are excluded and listed in warnings.
AggregateResult aggregate_records(const std::vector<BenchmarkRecord>& records,
                                  const std::string& task_id,
                                  const std::string& hardware_id,
                                  Statistic statistic);

// Orders models by one metric, best first per the metric's direction.
// Exactly equal values become a tie group. Throws DataError naming the model
// if one lacks the metric.
MetricRanking rank_by_metric(const std::map<std::string, MetricMap>& aggregates,
                             Metric kind);

// Weighted Copeland over per-metric rankings: each ranking votes with its
// configured weight, strict preferences only (a tie inside a metric casts no
// vote either way). Candidate a beats b iff its accumulated weight exceeds
// b's; score = wins + 0.5 * pairwise ties. Equal scores are broken
// lexicographically by id and reported in `ties`.
RankingTable weighted_copeland(const std::vector<MetricRanking>& rankings,
                               const WeightConfig& config,
                               kernels::Exec exec = kernels::Exec::Parallel);

// Same voting core over arbitrary tables (one voter per table); used by the
// dual-selector combination. Weights need not sum to 1 here; they are used
// as given.
RankingTable weighted_copeland_tables(const std::vector<RankingTable>& tables,
                                      const std::vector<double>& weights,
                                      const std::string& method,
                                      kernels::Exec exec = kernels::Exec::Parallel);

PairwiseTally pairwise_tally(const std::vector<RankingTable>& tables,
                             const std::vector<double>& weights,
                             kernels::Exec exec = kernels::Exec::Parallel);

// Combined score: f * SUM_i r_i^{w_i} over the hardware metrics named in
// config.weights, where r_i = value/threshold for higher-is-better hardware
// metrics and threshold/value for lower-is-better ones (so improving a
// metric always raises the score). Zero-weight entries contribute a neutral
// 1.0; with no hardware entries at all the factor is 1.0 and the score is
// just f. Combiner::Product multiplies the ratio powers instead of summing.
double objective_score(double f_alpha, const MetricMap& hw_metrics,
                       const WeightConfig& config,
                       Combiner combiner = Combiner::Sum);

struct ObjectiveCandidate {
  double f_alpha = 0.0;
  MetricMap hw_metrics;
};

RankingTable rank_by_objective(
    const std::map<std::string, ObjectiveCandidate>& candidates,
    const WeightConfig& config, Combiner combiner = Combiner::Sum,
    kernels::Exec exec = kernels::Exec::Parallel);

// Tie-corrected Kendall tau-b between two orderings of the same candidate
// set. Returns NaN when either ordering is one big tie (tau-b undefined).
double kendall_tau(const RankingTable& a, const RankingTable& b,
                   kernels::Exec exec = kernels::Exec::Parallel);

void write_ranking_csv(const RankingTable& table, std::ostream& out);

}  // namespace hwrec
