#include <doctest.h>

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "hwrec/errors.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/sensors.hpp"

using namespace hwrec;

namespace {

// Deterministic workload: latency affine in batch size, every sample correct,
// optional scripted failure at a given forward-call index.
class FakeWorkload : public Workload {
 public:
  WorkResult forward(int batch) override {
    ++calls;
    if (fail_at_call > 0 && calls == fail_at_call)
      throw std::runtime_error("injected forward failure");
    batches.push_back(batch);
    WorkResult r;
    r.latency_ms = 1.0 + 0.25 * batch;
    r.correct = batch;
    r.total = batch;
    return r;
  }
  std::string description() const override { return "fake"; }

  std::vector<int> batches;
  int calls = 0;
  int fail_at_call = 0;
};

struct OrderObserver : RunObserver {
  void on_stabilize(const StabilizeOutcome& o) override {
    events.push_back(std::string("stabilize:") + (o.stabilized ? "ok" : "timeout"));
    outcomes.push_back(o);
  }
  void on_forward(const RunIds& ids, Phase phase, int batch) override {
    events.push_back("forward:" + ids.model_id + ":" +
                     std::string(phase_name(phase)) + ":" + std::to_string(batch));
  }
  void on_pair_done(const PairReport& pr) override {
    events.push_back("pair_done:" + pr.model_id);
  }
  std::vector<std::string> events;
  std::vector<StabilizeOutcome> outcomes;
};

StabilizePolicy fast_policy() {
  StabilizePolicy p;
  p.poll_interval_ms = 50;
  p.timeout_ms = 100;
  return p;
}

TaskDescriptor small_task(const std::string& id, std::int64_t samples) {
  TaskDescriptor t;
  t.id = id;
  t.dataset_name = id;
  t.num_classes = 2;
  t.num_samples = samples;
  t.input_shape = {3, 8, 8};
  t.task_features = {1.0};
  return t;
}

HardwareProfile test_hw() {
  HardwareProfile h;
  h.id = "h1";
  h.device_name = "h1";
  h.cpu_model = "test";
  h.cpu_cores = 4;
  h.cpu_freq_mhz = 1000.0;
  h.ram_mb = 512.0;
  h.storage_mb = 1024.0;
  h.hw_features = {1.0};
  return h;
}

const RunIds kIds{"m1", "t1", "h1"};

}  // namespace

TEST_CASE("stabilize returns on the first nominal poll without sleeping") {
  ScriptedSensors sensors;
  FakeTime time;
  auto outcome = stabilize(sensors, fast_policy(), time);
  CHECK(outcome.stabilized);
  CHECK(outcome.polls == 1);
  CHECK(outcome.waited_ms == 0);
  CHECK(time.now_ms() == 0);
  CHECK(outcome.last.cpu_util == doctest::Approx(0.05));
}

TEST_CASE("stabilize polls cpu, then ram, then temperature") {
  ScriptedSensors sensors;
  FakeTime time;
  stabilize(sensors, fast_policy(), time);
  CHECK(sensors.events() ==
        std::vector<std::string>{"cpu_util", "ram_util", "cpu_temp_c"});
}

TEST_CASE("stabilize keeps polling until readings turn nominal") {
  ScriptedSensors::Script script;
  script.cpu_util = {0.9, 0.9, 0.1};
  ScriptedSensors sensors(std::move(script));
  FakeTime time;
  StabilizePolicy policy;
  policy.poll_interval_ms = 50;
  policy.timeout_ms = 5000;
  auto outcome = stabilize(sensors, policy, time);
  CHECK(outcome.stabilized);
  CHECK(outcome.polls == 3);
  CHECK(outcome.waited_ms == 100);
}

TEST_CASE("stabilize timeout: poll count law and the waited bound") {
  ScriptedSensors::Script script;
  script.cpu_util = {0.95};  // never nominal
  ScriptedSensors sensors(std::move(script));
  FakeTime time;
  auto policy = fast_policy();
  auto outcome = stabilize(sensors, policy, time);
  CHECK_FALSE(outcome.stabilized);
  CHECK(outcome.polls == policy.timeout_ms / policy.poll_interval_ms + 1);
  CHECK(outcome.waited_ms == policy.timeout_ms);
  CHECK(outcome.waited_ms <= policy.timeout_ms + policy.poll_interval_ms);
  CHECK(outcome.last.cpu_util == doctest::Approx(0.95));
}

TEST_CASE("stabilize with a hot device and zero timeout gives up after one poll") {
  ScriptedSensors::Script script;
  script.cpu_temp_c = {90.0};
  ScriptedSensors sensors(std::move(script));
  FakeTime time;
  auto policy = fast_policy();
  policy.timeout_ms = 0;
  auto outcome = stabilize(sensors, policy, time);
  CHECK_FALSE(outcome.stabilized);
  CHECK(outcome.polls == 1);
}

TEST_CASE("stabilize surfaces sensor failures by name") {
  ScriptedSensors sensors;
  sensors.fail_next("ram_util");
  FakeTime time;
  CHECK_THROWS_AS(stabilize(sensors, fast_policy(), time), SensorError);
}

TEST_CASE("batch sweep emits one record per batch size in order") {
  ScriptedSensors sensors;
  FakeTime time;
  FakeWorkload workload;
  auto stab = stabilize(sensors, fast_policy(), time);
  HarnessOptions opts;
  opts.time = &time;

  auto result = batch_sweep(workload, sensors, stab, kIds, opts);
  REQUIRE_FALSE(result.error.has_value());
  REQUIRE(result.records.size() == 100);
  for (int b = 1; b <= 100; ++b) {
    const auto& r = result.records[b - 1];
    CHECK(r.batch_size == b);
    CHECK(r.phase == Phase::BatchSweep);
    CHECK(r.stabilized == true);
    CHECK(r.metrics.at(Metric::ExecutionTimeMs) ==
          doctest::Approx(1.0 + 0.25 * b));
    CHECK(r.metrics.at(Metric::Accuracy) == doctest::Approx(1.0));
    CHECK(record_issues(r).empty());
  }
  CHECK(workload.batches.front() == 1);
  CHECK(workload.batches.back() == 100);
}

TEST_CASE("batch sweep failure keeps the partial prefix and names the batch") {
  ScriptedSensors sensors;
  FakeTime time;
  FakeWorkload workload;
  workload.fail_at_call = 40;
  auto stab = stabilize(sensors, fast_policy(), time);
  HarnessOptions opts;
  opts.time = &time;

  auto result = batch_sweep(workload, sensors, stab, kIds, opts);
  REQUIRE(result.error.has_value());
  CHECK(result.error->find("40") != std::string::npos);
  CHECK(result.records.size() == 39);
}

TEST_CASE("fixed-batch run covers the dataset with a remainder tail") {
  ScriptedSensors sensors;
  FakeTime time;
  FakeWorkload workload;
  auto stab = stabilize(sensors, fast_policy(), time);
  HarnessOptions opts;
  opts.time = &time;

  SUBCASE("100 samples -> 32,32,32,4") {
    auto result = fixed_batch_run(workload, sensors, stab, kIds, 100, opts);
    REQUIRE_FALSE(result.error.has_value());
    CHECK(workload.batches == std::vector<int>{32, 32, 32, 4});
    for (const auto& r : result.records) CHECK(r.phase == Phase::FixedBatch);
  }
  SUBCASE("64 samples divide evenly") {
    auto result = fixed_batch_run(workload, sensors, stab, kIds, 64, opts);
    CHECK(workload.batches == std::vector<int>{32, 32});
    CHECK(result.records.size() == 2);
  }
  SUBCASE("tiny dataset is one small batch") {
    auto result = fixed_batch_run(workload, sensors, stab, kIds, 5, opts);
    CHECK(workload.batches == std::vector<int>{5});
  }
  SUBCASE("empty dataset is a precondition violation") {
    CHECK_THROWS_AS(fixed_batch_run(workload, sensors, stab, kIds, 0, opts),
                    DataError);
  }
}

TEST_CASE("benchmark run: record count law, call order, stabilize stamping") {
  // First stabilize sees a calm device; every later poll reads busy CPU, so
  // the stabilize after pair 1 times out and pair 2 runs unstabilized.
  ScriptedSensors::Script script;
  script.cpu_util = {0.05, 0.9};
  ScriptedSensors sensors(std::move(script));
  FakeTime time;
  OrderObserver observer;
  HarnessOptions opts;
  opts.time = &time;
  opts.observer = &observer;

  std::vector<WorkloadPair> pairs;
  auto w1 = std::make_shared<FakeWorkload>();
  auto w2 = std::make_shared<FakeWorkload>();
  pairs.push_back({"m1", small_task("t1", 100), w1});
  pairs.push_back({"m2", small_task("t2", 64), w2});

  std::vector<BenchmarkRecord> records;
  auto report = benchmark_pairs(
      pairs, test_hw(), sensors, fast_policy(),
      [&](const BenchmarkRecord& r) { records.push_back(r); }, opts);

  // pairs * (100 + ceil(n/32)): (100+4) + (100+2).
  CHECK(records.size() == 104 + 102);
  CHECK(report.total_records == records.size());
  REQUIRE(report.pairs.size() == 2);
  CHECK(report.pairs[0].completed);
  CHECK(report.pairs[1].completed);
  CHECK(report.pairs[0].records == 104);
  CHECK(report.pairs[1].records == 102);

  // Stabilize runs once up front and once after each pair.
  REQUIRE(observer.outcomes.size() == 3);
  CHECK(observer.outcomes[0].stabilized);
  CHECK_FALSE(observer.outcomes[1].stabilized);
  CHECK_FALSE(observer.outcomes[2].stabilized);

  // Records carry the outcome of the stabilize that preceded their pair.
  for (std::size_t i = 0; i < 104; ++i) CHECK(records[i].stabilized);
  for (std::size_t i = 104; i < records.size(); ++i)
    CHECK_FALSE(records[i].stabilized);
  CHECK(report.pairs[0].stabilized_before);
  CHECK_FALSE(report.pairs[1].stabilized_before);

  // Event order: stabilize, pair 1 forwards, pair_done, stabilize, ...
  const auto& ev = observer.events;
  REQUIRE(ev.size() >= 5);
  CHECK(ev.front() == "stabilize:ok");
  CHECK(ev[1] == "forward:m1:batch_sweep:1");
  CHECK(ev[101] == "forward:m1:fixed_batch:32");
  CHECK(ev[105] == "pair_done:m1");
  CHECK(ev[106] == "stabilize:timeout");
  CHECK(ev[107] == "forward:m2:batch_sweep:1");
  CHECK(ev.back() == "stabilize:timeout");

  // No two records from one run share (model, task, phase, batch index).
  std::vector<std::string> keys;
  std::size_t index_in_phase = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    index_in_phase = (i == 0 || records[i - 1].phase != r.phase ||
                      records[i - 1].model_id != r.model_id)
                         ? 0
                         : index_in_phase + 1;
    keys.push_back(r.model_id + "|" + r.task_id + "|" + r.hardware_id + "|" +
                   phase_name(r.phase) + "|" + std::to_string(index_in_phase));
  }
  std::sort(keys.begin(), keys.end());
  CHECK(std::adjacent_find(keys.begin(), keys.end()) == keys.end());

  // Report aggregates come from the fixed-batch phase.
  CHECK(report.pairs[0].accuracy == doctest::Approx(1.0));
  CHECK(report.pairs[0].total == 100);
  CHECK(report.pairs[0].mean_latency_b32_ms ==
        doctest::Approx((3 * (1.0 + 0.25 * 32) + (1.0 + 0.25 * 4)) / 4.0));

  const std::string rendered = render_run_report(report);
  CHECK(rendered.find("m1") != std::string::npos);
  CHECK(rendered.find("not stabilized") != std::string::npos);
}

TEST_CASE("a failing pair is isolated; later pairs still run") {
  ScriptedSensors sensors;
  FakeTime time;
  HarnessOptions opts;
  opts.time = &time;

  auto broken = std::make_shared<FakeWorkload>();
  broken->fail_at_call = 1;
  auto healthy = std::make_shared<FakeWorkload>();
  std::vector<WorkloadPair> pairs;
  pairs.push_back({"m1", small_task("t1", 64), broken});
  pairs.push_back({"m2", small_task("t2", 64), healthy});

  std::size_t sunk = 0;
  auto report = benchmark_pairs(pairs, test_hw(), sensors, fast_policy(),
                                [&](const BenchmarkRecord&) { ++sunk; }, opts);
  REQUIRE(report.pairs.size() == 2);
  CHECK_FALSE(report.pairs[0].completed);
  CHECK_FALSE(report.pairs[0].error.empty());
  CHECK(report.pairs[0].records == 0);
  CHECK(report.pairs[1].completed);
  CHECK(report.pairs[1].records == 102);
  CHECK(sunk == 102);
  CHECK(render_run_report(report).find("FAILED") != std::string::npos);
}

TEST_CASE("scripted reruns are identical except timestamps") {
  auto run = [](std::int64_t wall_start) {
    ScriptedSensors sensors;
    FakeTime time(wall_start);
    HarnessOptions opts;
    opts.time = &time;
    std::vector<WorkloadPair> pairs;
    pairs.push_back({"m1", small_task("t1", 48), std::make_shared<FakeWorkload>()});
    std::vector<BenchmarkRecord> records;
    benchmark_pairs(pairs, test_hw(), sensors, fast_policy(),
                    [&](const BenchmarkRecord& r) { records.push_back(r); }, opts);
    return records;
  };
  auto a = run(1700000000000LL);
  auto b = run(1800000000000LL);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].metrics == b[i].metrics);
    CHECK(a[i].batch_size == b[i].batch_size);
    CHECK(a[i].phase == b[i].phase);
    CHECK(a[i].timestamp_ms != b[i].timestamp_ms);
  }
}
