#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hwrec/errors.hpp"
#include "hwrec/ranking.hpp"

using namespace hwrec;

namespace {

BenchmarkRecord record(const std::string& model, Phase phase, double latency,
                       double accuracy = 0.9) {
  BenchmarkRecord r;
  r.model_id = model;
  r.task_id = "t1";
  r.hardware_id = "h1";
  r.batch_size = 32;
  r.phase = phase;
  r.metrics = {{Metric::ExecutionTimeMs, latency}, {Metric::MemoryMb, 64.0},
               {Metric::PowerW, 2.0},              {Metric::CpuTempC, 45.0},
               {Metric::CarbonFootprint, 2.1},     {Metric::Accuracy, accuracy}};
  return r;
}

RankingTable table_of(std::vector<std::pair<std::string, double>> scored) {
  return make_ranking_table(std::move(scored), "test");
}

}  // namespace

TEST_CASE("built-in weight configs validate") {
  CHECK(default_weight_config().validate().empty());
  for (const char* name : {"balanced", "speed", "energy", "accuracy"}) {
    auto preset = weight_preset(name);
    REQUIRE(preset.has_value());
    CHECK(preset->validate().empty());
  }
  CHECK_FALSE(weight_preset("fastest").has_value());
}

TEST_CASE("presets shift weight toward their namesake metric") {
  auto speed = *weight_preset("speed");
  auto energy = *weight_preset("energy");
  auto accuracy = *weight_preset("accuracy");
  auto balanced = *weight_preset("balanced");
  CHECK(speed.weights[Metric::ExecutionTimeMs] >
        balanced.weights[Metric::ExecutionTimeMs]);
  CHECK(energy.weights[Metric::PowerW] > balanced.weights[Metric::PowerW]);
  CHECK(accuracy.weights[Metric::Accuracy] > balanced.weights[Metric::Accuracy]);
}

TEST_CASE("aggregation over fixed-batch records") {
  std::vector<BenchmarkRecord> records = {
      record("m1", Phase::FixedBatch, 80.0),
      record("m1", Phase::FixedBatch, 100.0),
      record("m1", Phase::BatchSweep, 999.0),  // diagnostics, ignored
      record("m2", Phase::FixedBatch, 50.0),
      record("m3", Phase::BatchSweep, 10.0),  // sweep only -> excluded
  };

  SUBCASE("mean") {
    auto agg = aggregate_records(records, "t1", "h1", Statistic::Mean);
    CHECK(agg.per_model.at("m1").at(Metric::ExecutionTimeMs) ==
          doctest::Approx(90.0));
    CHECK(agg.per_model.count("m3") == 0);
    REQUIRE(agg.warnings.size() == 1);
    CHECK(agg.warnings[0].find("m3") != std::string::npos);
  }
  SUBCASE("median of an even count averages the middle pair") {
    records.push_back(record("m1", Phase::FixedBatch, 70.0));
    records.push_back(record("m1", Phase::FixedBatch, 200.0));
    auto agg = aggregate_records(records, "t1", "h1", Statistic::Median);
    CHECK(agg.per_model.at("m1").at(Metric::ExecutionTimeMs) ==
          doctest::Approx(90.0));  // {70,80,100,200} -> (80+100)/2
  }
  SUBCASE("singleton statistic equals the record value") {
    auto agg = aggregate_records(records, "t1", "h1", Statistic::Median);
    CHECK(agg.per_model.at("m2").at(Metric::ExecutionTimeMs) ==
          doctest::Approx(50.0));
  }
  SUBCASE("out-of-scope records violate the precondition") {
    records.push_back(record("m1", Phase::FixedBatch, 1.0));
    records.back().task_id = "t2";
    CHECK_THROWS_AS(aggregate_records(records, "t1", "h1", Statistic::Mean),
                    DataError);
  }
}

TEST_CASE("per-metric ranking respects direction") {
  std::map<std::string, MetricMap> agg = {
      {"m1", {{Metric::ExecutionTimeMs, 90.0}, {Metric::Accuracy, 0.92}}},
      {"m2", {{Metric::ExecutionTimeMs, 120.0}, {Metric::Accuracy, 0.92}}},
  };
  auto latency = rank_by_metric(agg, Metric::ExecutionTimeMs);
  CHECK(latency.table.candidate_ids ==
        std::vector<std::string>{"m1", "m2"});  // lower is better

  auto accuracy = rank_by_metric(agg, Metric::Accuracy);
  REQUIRE(accuracy.table.ties.size() == 1);  // exact equality -> tie group
  CHECK(accuracy.table.ties[0].size() == 2);

  agg["m2"].erase(Metric::Accuracy);
  CHECK_THROWS_WITH_AS(rank_by_metric(agg, Metric::Accuracy) /* m2 lacks it */,
                       doctest::Contains("m2"), DataError);
}

TEST_CASE("weighted copeland worked examples") {
  WeightConfig config;
  config.thresholds = {{Metric::ExecutionTimeMs, 100.0},
                       {Metric::PowerW, 5.0},
                       {Metric::Accuracy, 0.9}};

  SUBCASE("single voter degeneracy") {
    config.weights = {{Metric::ExecutionTimeMs, 1.0}};
    MetricRanking voter{Metric::ExecutionTimeMs,
                        table_of({{"a", 3.0}, {"b", 2.0}, {"c", 1.0}})};
    auto result = weighted_copeland({voter}, config);
    CHECK(result.candidate_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(result.scores == std::vector<double>{2.0, 1.0, 0.0});
    CHECK(result.method == "copeland");
  }

  SUBCASE("opposed equal voters tie everything at 1.0") {
    config.weights = {{Metric::ExecutionTimeMs, 0.5}, {Metric::Accuracy, 0.5}};
    MetricRanking v1{Metric::ExecutionTimeMs,
                     table_of({{"a", 3.0}, {"b", 2.0}, {"c", 1.0}})};
    MetricRanking v2{Metric::Accuracy,
                     table_of({{"c", 3.0}, {"b", 2.0}, {"a", 1.0}})};
    auto result = weighted_copeland({v1, v2}, config);
    for (double s : result.scores) CHECK(s == 1.0);
    REQUIRE(result.ties.size() == 1);
    CHECK(result.ties[0].size() == 3);
  }

  SUBCASE("0.6 vs 0.4 voters") {
    config.weights = {{Metric::ExecutionTimeMs, 0.6}, {Metric::Accuracy, 0.4}};
    MetricRanking v1{Metric::ExecutionTimeMs,
                     table_of({{"a", 3.0}, {"b", 2.0}, {"c", 1.0}})};
    MetricRanking v2{Metric::Accuracy,
                     table_of({{"b", 3.0}, {"a", 2.0}, {"c", 1.0}})};
    auto result = weighted_copeland({v1, v2}, config);
    CHECK(result.candidate_ids == std::vector<std::string>{"a", "b", "c"});
    CHECK(result.scores == std::vector<double>{2.0, 1.0, 0.0});
  }
}

TEST_CASE("weighted copeland rejects mismatched inputs") {
  WeightConfig config;
  config.weights = {{Metric::ExecutionTimeMs, 1.0}};
  config.thresholds = {{Metric::ExecutionTimeMs, 100.0}};

  SUBCASE("candidate sets must agree") {
    config.weights = {{Metric::ExecutionTimeMs, 0.5}, {Metric::Accuracy, 0.5}};
    config.thresholds[Metric::Accuracy] = 0.9;
    MetricRanking v1{Metric::ExecutionTimeMs, table_of({{"a", 1.0}, {"b", 0.0}})};
    MetricRanking v2{Metric::Accuracy, table_of({{"a", 1.0}, {"c", 0.0}})};
    CHECK_THROWS_AS(weighted_copeland({v1, v2}, config), DataError);
  }
  SUBCASE("voter without a configured weight") {
    MetricRanking voter{Metric::PowerW, table_of({{"a", 1.0}, {"b", 0.0}})};
    CHECK_THROWS_AS(weighted_copeland({voter}, config), DataError);
  }
  SUBCASE("no voters") {
    CHECK_THROWS_AS(weighted_copeland({}, config), DataError);
  }
}

TEST_CASE("weight perturbations below 1e-12 never flip clear tallies") {
  std::mt19937_64 gen(55);
  std::uniform_real_distribution<double> unit(0.05, 1.0);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 3 + gen() % 3;
    std::vector<std::pair<std::string, double>> s1, s2;
    for (std::size_t i = 0; i < n; ++i) {
      std::string id = "m" + std::to_string(i);
      s1.emplace_back(id, static_cast<double>(gen() % 100));
      s2.emplace_back(id, static_cast<double>(gen() % 100));
    }
    MetricRanking v1{Metric::ExecutionTimeMs, table_of(s1)};
    MetricRanking v2{Metric::Accuracy, table_of(s2)};

    double w = unit(gen);
    WeightConfig config;
    config.weights = {{Metric::ExecutionTimeMs, w}, {Metric::Accuracy, 1.0 - w}};
    config.thresholds = {{Metric::ExecutionTimeMs, 100.0}, {Metric::Accuracy, 0.9}};

    auto tally = pairwise_tally({v1.table, v2.table}, {w, 1.0 - w});
    bool near_tie = false;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) {
        const double diff =
            tally.wins[a * n + b] - tally.wins[b * n + a];
        if (diff != 0.0 && std::abs(diff) < 1e-9 + 1e-10) near_tie = true;
      }
    if (near_tie) continue;

    auto base = weighted_copeland({v1, v2}, config);
    WeightConfig nudged = config;
    nudged.weights[Metric::ExecutionTimeMs] += 5e-13;
    nudged.weights[Metric::Accuracy] -= 5e-13;
    auto perturbed = weighted_copeland({v1, v2}, nudged);
    CHECK(base.candidate_ids == perturbed.candidate_ids);
    ++checked;
  }
  CHECK(checked > 50);  // the property was actually exercised
}

TEST_CASE("objective score worked example and conventions") {
  WeightConfig config;
  config.weights = {{Metric::ExecutionTimeMs, 1.0}};
  config.thresholds = {{Metric::ExecutionTimeMs, 100.0}};
  MetricMap metrics = {{Metric::ExecutionTimeMs, 90.0}};

  CHECK(objective_score(0.92, metrics, config) ==
        doctest::Approx(0.92 * (100.0 / 90.0)).epsilon(1e-12));
  CHECK(objective_score(0.92, metrics, config) ==
        doctest::Approx(1.0222).epsilon(1e-4));

  SUBCASE("zero quality zeroes the score") {
    CHECK(objective_score(0.0, metrics, config) == 0.0);
  }
  SUBCASE("unit ratios sum to the metric count") {
    config.weights = {{Metric::ExecutionTimeMs, 0.5}, {Metric::PowerW, 0.5}};
    config.thresholds[Metric::PowerW] = 5.0;
    MetricMap at_threshold = {{Metric::ExecutionTimeMs, 100.0},
                              {Metric::PowerW, 5.0}};
    CHECK(objective_score(0.7, at_threshold, config) == doctest::Approx(1.4));
  }
  SUBCASE("zero-weight entries contribute a neutral term") {
    config.weights[Metric::PowerW] = 0.0;
    config.weights[Metric::ExecutionTimeMs] = 1.0;
    config.thresholds[Metric::PowerW] = 5.0;
    // PowerW value absent: zero weight must not require a lookup.
    CHECK(objective_score(1.0, metrics, config) ==
          doctest::Approx(100.0 / 90.0 + 1.0));
  }
  SUBCASE("product combiner multiplies the ratio powers") {
    config.weights = {{Metric::ExecutionTimeMs, 0.5}, {Metric::PowerW, 0.5}};
    config.thresholds[Metric::PowerW] = 5.0;
    MetricMap m = {{Metric::ExecutionTimeMs, 50.0}, {Metric::PowerW, 2.5}};
    const double expect =
        std::pow(100.0 / 50.0, 0.5) * std::pow(5.0 / 2.5, 0.5);
    CHECK(objective_score(1.0, m, config, Combiner::Product) ==
          doctest::Approx(expect).epsilon(1e-12));
  }
  SUBCASE("missing weighted metric throws") {
    config.weights = {{Metric::PowerW, 1.0}};
    config.thresholds[Metric::PowerW] = 5.0;
    CHECK_THROWS_AS(objective_score(1.0, metrics, config), DataError);
  }
  SUBCASE("non-positive value for a lower-is-better metric throws") {
    metrics[Metric::ExecutionTimeMs] = 0.0;
    CHECK_THROWS_AS(objective_score(1.0, metrics, config), DataError);
  }
}

TEST_CASE("objective monotonicity") {
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> unit(0.1, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    WeightConfig config;
    const double w = unit(gen);
    config.weights = {{Metric::ExecutionTimeMs, w}, {Metric::PowerW, 1.0 - w}};
    config.thresholds = {{Metric::ExecutionTimeMs, 50.0 + 100.0 * unit(gen)},
                         {Metric::PowerW, 1.0 + 5.0 * unit(gen)}};
    MetricMap metrics = {{Metric::ExecutionTimeMs, 20.0 + 100.0 * unit(gen)},
                         {Metric::PowerW, 0.5 + 4.0 * unit(gen)}};
    const double f = unit(gen);
    const double base = objective_score(f, metrics, config);

    auto improved = metrics;
    improved[Metric::ExecutionTimeMs] *= 0.9;  // lower is better
    CHECK(objective_score(f, improved, config) > base);

    auto worsened = metrics;
    worsened[Metric::PowerW] *= 1.1;
    CHECK(objective_score(f, worsened, config) < base);
  }
}

TEST_CASE("objective ranking orders by score and parallel matches serial") {
  WeightConfig config;
  config.weights = {{Metric::ExecutionTimeMs, 1.0}};
  config.thresholds = {{Metric::ExecutionTimeMs, 100.0}};
  std::map<std::string, ObjectiveCandidate> candidates;
  candidates["slow"] = {0.9, {{Metric::ExecutionTimeMs, 120.0}}};
  candidates["fast"] = {0.9, {{Metric::ExecutionTimeMs, 90.0}}};

  auto serial = rank_by_objective(candidates, config, Combiner::Sum,
                                  kernels::Exec::Serial);
  auto parallel = rank_by_objective(candidates, config, Combiner::Sum,
                                    kernels::Exec::Parallel);
  CHECK(serial.candidate_ids == std::vector<std::string>{"fast", "slow"});
  CHECK(serial.candidate_ids == parallel.candidate_ids);
  CHECK(serial.scores == parallel.scores);
  CHECK(serial.method == "objective");

  SUBCASE("per-candidate errors propagate from the parallel path too") {
    candidates["bad"] = {0.9, {{Metric::ExecutionTimeMs, -1.0}}};
    CHECK_THROWS_AS(
        rank_by_objective(candidates, config, Combiner::Sum, kernels::Exec::Parallel),
        DataError);
  }
}

TEST_CASE("kendall tau examples") {
  auto x = table_of({{"x", 3.0}, {"y", 2.0}, {"z", 1.0}});
  auto same = table_of({{"x", 30.0}, {"y", 20.0}, {"z", 10.0}});
  auto swapped = table_of({{"x", 3.0}, {"z", 2.0}, {"y", 1.0}});
  auto reversed = table_of({{"z", 3.0}, {"y", 2.0}, {"x", 1.0}});

  CHECK(kendall_tau(x, x) == doctest::Approx(1.0));
  CHECK(kendall_tau(x, same) == doctest::Approx(1.0));
  CHECK(kendall_tau(x, swapped) == doctest::Approx(1.0 / 3.0));
  CHECK(kendall_tau(swapped, x) == doctest::Approx(1.0 / 3.0));  // symmetric
  CHECK(kendall_tau(x, reversed) == doctest::Approx(-1.0));

  auto flat = table_of({{"x", 1.0}, {"y", 1.0}, {"z", 1.0}});
  CHECK(std::isnan(kendall_tau(x, flat)));

  auto other = table_of({{"x", 1.0}, {"q", 0.0}});
  CHECK_THROWS_AS(kendall_tau(x, other), DataError);
}

TEST_CASE("csv export shape") {
  auto table = make_ranking_table({{"a", 2.0}, {"b", 2.0}, {"c", 1.0}}, "copeland");
  std::ostringstream out;
  write_ranking_csv(table, out);
  const std::string text = out.str();
  CHECK(text.rfind("rank,model_id,score,method\n", 0) == 0);
  CHECK(text.find("1,a,") != std::string::npos);
  CHECK(text.find("1,b,") != std::string::npos);  // tied rank repeats
  CHECK(text.find("3,c,") != std::string::npos);  // competition numbering
}
