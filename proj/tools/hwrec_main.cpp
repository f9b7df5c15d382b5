// hwrec: benchmark, rank, train, and recommend pre-trained models for
// resource-constrained devices. Subcommands form a pipeline:
//
//   synthgen -> ingest -> bench -> rank -> train -> recommend -> eval
//
// Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 runtime
// failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hwrec/domain.hpp"
#include "hwrec/errors.hpp"
#include "hwrec/fusion.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/json_io.hpp"
#include "hwrec/metrics.hpp"
#include "hwrec/ranking.hpp"
#include "hwrec/sensors.hpp"
#include "hwrec/shadow.hpp"
#include "hwrec/store.hpp"
#include "hwrec/synthgen.hpp"

namespace fs = std::filesystem;
using namespace hwrec;

namespace {

// ---------------------------------------------------------------------------
// Config file: JSON defaults for weights, composite spec, stabilize policy.
// Flags always override.
// ---------------------------------------------------------------------------

struct FileConfig {
  std::optional<WeightConfig> weights;
  std::optional<CompositeSpec> composite;
  std::optional<StabilizePolicy> stabilize;
};

StabilizePolicy policy_from_json(const json& j) {
  StabilizePolicy p;
  p.max_cpu_util = j.value("max_cpu_util", p.max_cpu_util);
  p.max_ram_util = j.value("max_ram_util", p.max_ram_util);
  p.temp_low_c = j.value("temp_low_c", p.temp_low_c);
  p.temp_high_c = j.value("temp_high_c", p.temp_high_c);
  p.poll_interval_ms = j.value("poll_interval_ms", p.poll_interval_ms);
  p.timeout_ms = j.value("timeout_ms", p.timeout_ms);
  if (p.poll_interval_ms <= 0 || p.timeout_ms < 0)
    throw DataError("stabilize policy: poll_interval_ms must be > 0 and timeout_ms >= 0");
  return p;
}

CompositeSpec composite_from_json(const json& j) {
  CompositeSpec spec;
  if (j.contains("coefficients"))
    spec.coefficients = metric_map_from_json(j.at("coefficients"));
  spec.offset = j.value("offset", 0.0);
  if (auto problems = spec.validate(); !problems.empty())
    throw DataError("composite spec: " + problems.front());
  return spec;
}

FileConfig load_file_config(const std::string& path) {
  FileConfig cfg;
  if (path.empty()) return cfg;
  json j = parse_json_file(path);
  if (j.contains("weights")) cfg.weights = j.at("weights").get<WeightConfig>();
  if (j.contains("composite")) cfg.composite = composite_from_json(j.at("composite"));
  if (j.contains("stabilize")) cfg.stabilize = policy_from_json(j.at("stabilize"));
  return cfg;
}

void require_valid(const WeightConfig& config) {
  if (auto problems = config.validate(); !problems.empty()) {
    std::string msg = "weight config:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw DataError(msg);
  }
}

// Precedence: --weights file > --preset > config file > built-in default.
WeightConfig resolve_weights(const std::string& weights_path,
                             const std::string& preset, const FileConfig& cfg) {
  WeightConfig result;
  if (!weights_path.empty()) {
    result = parse_json_file(weights_path).get<WeightConfig>();
  } else if (!preset.empty()) {
    auto w = weight_preset(preset);
    if (!w) throw DataError("unknown preset '" + preset + "'");
    result = *w;
  } else if (cfg.weights) {
    result = *cfg.weights;
  } else {
    result = default_weight_config();
  }
  require_valid(result);
  return result;
}

// ---------------------------------------------------------------------------
// Table output
// ---------------------------------------------------------------------------

std::string render_text_table(const RankingTable& table) {
  auto positions = rank_positions(table);
  std::size_t id_width = 5;  // "model"
  for (const auto& id : table.candidate_ids) id_width = std::max(id_width, id.size());
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), " rank  %-*s  %14s\n",
                static_cast<int>(id_width), "model", "score");
  out += line;
  for (std::size_t i = 0; i < table.candidate_ids.size(); ++i) {
    std::snprintf(line, sizeof(line), " %4d  %-*s  %14.6f\n", positions[i] + 1,
                  static_cast<int>(id_width), table.candidate_ids[i].c_str(),
                  table.scores[i]);
    out += line;
  }
  out += "(method: " + table.method + ")\n";
  return out;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

// Prints per --format and optionally writes --out (.csv by extension,
// JSON otherwise). The JSON form is the interchange format `eval` reads.
void emit_table(const RankingTable& table, const std::string& format,
                const std::string& out_path) {
  if (format == "json") {
    std::cout << json(table).dump(2) << "\n";
  } else if (format == "csv") {
    write_ranking_csv(table, std::cout);
  } else {
    std::cout << render_text_table(table);
  }
  if (!out_path.empty()) {
    if (ends_with(out_path, ".csv")) {
      std::ofstream f(out_path);
      if (!f) throw DataError("cannot open '" + out_path + "' for writing");
      write_ranking_csv(table, f);
    } else {
      write_json_file(out_path, json(table));
    }
  }
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::vector<double> model_features_or_build(const ModelCard& card) {
  return card.model_features.empty() ? model_feature_vector(card)
                                     : card.model_features;
}
std::vector<double> hw_features_or_build(const HardwareProfile& hw) {
  return hw.hw_features.empty() ? hardware_feature_vector(hw) : hw.hw_features;
}
std::vector<double> task_features_or_build(const TaskDescriptor& task) {
  return task.task_features.empty() ? task_feature_vector(task)
                                    : task.task_features;
}

template <typename T>
const T& find_by_id(const std::vector<T>& entries, const std::string& id,
                    const char* kind) {
  for (const auto& e : entries)
    if (e.id == id) return e;
  throw DataError(std::string(kind) + " id '" + id + "' not found in store");
}

// Per-model refinement features from this scope's benchmark records; models
// without records are simply absent from the map.
std::map<std::string, std::vector<double>> refine_map_from_store(
    const Store& store, const std::string& task_id,
    const std::string& hardware_id, std::vector<std::string>* warnings) {
  Store::RecordFilter filter;
  filter.task_id = task_id;
  filter.hardware_id = hardware_id;
  auto records = store.query_records(filter);
  std::map<std::string, std::vector<double>> result;
  if (records.empty()) return result;
  auto agg = aggregate_records(records, task_id, hardware_id, Statistic::Mean);
  if (warnings)
    warnings->insert(warnings->end(), agg.warnings.begin(), agg.warnings.end());
  for (const auto& [model_id, metrics] : agg.per_model)
    result[model_id] = refinement_features(metrics);
  return result;
}

// ---------------------------------------------------------------------------
// synthgen
// ---------------------------------------------------------------------------

struct SynthgenArgs {
  std::string spec_path;
  std::string out_dir;
  std::string weights_path, preset;
  // -1 sentinels: only override the spec file when the flag was passed.
  int models = -1, hardware = -1, tasks = -1, latent_dim = -1, samples = -1;
  std::int64_t seed = -1;
  double noise = -1.0, interaction = std::numeric_limits<double>::quiet_NaN();
};

void run_synthgen(const SynthgenArgs& args, const FileConfig& cfg) {
  WorldSpec spec;
  if (!args.spec_path.empty()) {
    json j = parse_json_file(args.spec_path);
    spec.n_models = j.value("models", spec.n_models);
    spec.n_hardware = j.value("hardware", spec.n_hardware);
    spec.n_tasks = j.value("tasks", spec.n_tasks);
    spec.latent_dim = j.value("latent_dim", spec.latent_dim);
    spec.seed = j.value("seed", spec.seed);
    spec.noise_sigma = j.value("noise_sigma", spec.noise_sigma);
    spec.interaction_strength = j.value("interaction_strength", spec.interaction_strength);
    spec.samples_per_task = j.value("samples_per_task", spec.samples_per_task);
  }
  if (args.models >= 0) spec.n_models = args.models;
  if (args.hardware >= 0) spec.n_hardware = args.hardware;
  if (args.tasks >= 0) spec.n_tasks = args.tasks;
  if (args.latent_dim >= 0) spec.latent_dim = args.latent_dim;
  if (args.samples >= 0) spec.samples_per_task = args.samples;
  if (args.seed >= 0) spec.seed = static_cast<std::uint64_t>(args.seed);
  if (args.noise >= 0.0) spec.noise_sigma = args.noise;
  if (!std::isnan(args.interaction)) spec.interaction_strength = args.interaction;

  PlantedWorld world = generate_world(spec);
  WeightConfig weights = resolve_weights(args.weights_path, args.preset, cfg);

  fs::create_directories(fs::path(args.out_dir) / "truth");
  auto out = [&](const char* name) {
    return (fs::path(args.out_dir) / name).string();
  };
  write_json_file(out("models.json"), json(world.models));
  write_json_file(out("hardware.json"), json(world.hardware));
  write_json_file(out("tasks.json"), json(world.tasks));
  write_json_file(out("world.json"), world_to_json(world));
  std::size_t truth_count = 0;
  for (const auto& task : world.tasks) {
    for (const auto& hw : world.hardware) {
      auto gt = true_ranking(world, task.id, hw.id, weights);
      auto path = fs::path(args.out_dir) / "truth" / (task.id + "_" + hw.id + ".json");
      write_json_file(path.string(), json(gt.table));
      ++truth_count;
    }
  }
  std::cout << "wrote " << world.models.size() << " models, "
            << world.hardware.size() << " hardware profiles, "
            << world.tasks.size() << " tasks, " << truth_count
            << " reference rankings to " << args.out_dir << "\n";
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

void run_ingest(const std::string& store_root, const std::string& kind_name,
                const std::string& file) {
  auto kind = Store::parse_registry_kind(kind_name);
  if (!kind) throw DataError("unknown registry kind '" + kind_name + "'");
  Store store(store_root);
  auto result = store.ingest_registry(file, *kind);
  if (!result.accepted)
    throw DataError("registry rejected:\n" + result.report.to_string());
  std::cout << "ingested " << result.count << " " << kind_name << " into "
            << store.registry_path(*kind) << "\n";
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string hardware_id;
  std::string pairs_path;
  bool all_pairs = false;
  std::string sensor = "synthetic";
  std::string world_path;
  std::string script_path;
  std::string policy_path;
};

std::vector<std::pair<std::string, std::string>> load_pair_list(
    const std::string& path) {
  json j = parse_json_file(path);
  if (!j.is_array()) throw DataError(path + ": expected a JSON array of pairs");
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& e : j) {
    if (!e.contains("model_id") || !e.contains("task_id"))
      throw DataError(path + ": each pair needs model_id and task_id");
    pairs.emplace_back(e.at("model_id").get<std::string>(),
                       e.at("task_id").get<std::string>());
  }
  if (pairs.empty()) throw DataError(path + ": pair list is empty");
  return pairs;
}

ScriptedSensors::Script script_from_json(const json& j) {
  ScriptedSensors::Script s;
  auto seq = [&](const char* key, std::vector<double>& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::vector<double>>();
    if (dst.empty()) throw DataError(std::string("sensor script: ") + key + " is empty");
  };
  seq("cpu_util", s.cpu_util);
  seq("ram_util", s.ram_util);
  seq("cpu_temp_c", s.cpu_temp_c);
  seq("power_w", s.power_w);
  seq("peak_memory_mb", s.peak_memory_mb);
  return s;
}

void run_bench(const std::string& store_root, const BenchArgs& args,
               const FileConfig& cfg) {
  Store store(store_root);
  auto tasks = store.load_tasks();
  const auto& hw = find_by_id(store.load_hardware(), args.hardware_id, "hardware");

  std::vector<std::pair<std::string, std::string>> pair_ids;
  if (args.all_pairs) {
    for (const auto& m : store.load_models())
      for (const auto& t : tasks) pair_ids.emplace_back(m.id, t.id);
    if (pair_ids.empty())
      throw DataError("store has no models or no tasks; ingest registries first");
  } else {
    if (args.pairs_path.empty())
      throw DataError("pass --pairs <file> or --all-pairs");
    pair_ids = load_pair_list(args.pairs_path);
  }

  // Workloads are synthesized from the world fixture regardless of the
  // sensor source; --sensor chooses where the environment readings come
  // from (the simulated device, this host, or a scripted sequence).
  std::string world_path = args.world_path.empty()
                               ? (fs::path(store_root) / "world.json").string()
                               : args.world_path;
  if (!fs::exists(world_path))
    throw DataError("world fixture '" + world_path +
                    "' not found; pass --world or copy world.json into the store root");
  PlantedWorld world = world_from_json(parse_json_file(world_path));

  SyntheticDevice device(world, args.hardware_id);
  std::unique_ptr<SensorProvider> owned_sensors;
  SensorProvider* sensors = nullptr;
  if (args.sensor == "synthetic") {
    sensors = &device.sensors();
  } else if (args.sensor == "host") {
    owned_sensors = std::make_unique<HostSensors>();
    sensors = owned_sensors.get();
  } else if (args.sensor == "scripted") {
    ScriptedSensors::Script script;
    if (!args.script_path.empty())
      script = script_from_json(parse_json_file(args.script_path));
    owned_sensors = std::make_unique<ScriptedSensors>(std::move(script));
    sensors = owned_sensors.get();
  } else {
    throw DataError("unknown sensor provider '" + args.sensor +
                    "' (expected host, scripted, or synthetic)");
  }

  std::vector<WorkloadPair> pairs;
  for (const auto& [model_id, task_id] : pair_ids) {
    WorkloadPair wp;
    wp.model_id = model_id;
    wp.task = find_by_id(tasks, task_id, "task");
    wp.workload = device.workload(model_id, task_id);
    pairs.push_back(std::move(wp));
  }

  StabilizePolicy policy = cfg.stabilize.value_or(StabilizePolicy{});
  if (!args.policy_path.empty())
    policy = policy_from_json(parse_json_file(args.policy_path));

  HarnessOptions opts;
  if (cfg.composite) opts.composite = *cfg.composite;

  std::vector<BenchmarkRecord> collected;
  RunReport report = benchmark_pairs(
      pairs, hw, *sensors, policy,
      [&](const BenchmarkRecord& r) { collected.push_back(r); }, opts);

  store.append_records(collected);
  std::cout << render_run_report(report);
  std::cout << "appended " << collected.size() << " records to "
            << store.records_path() << "\n";
  for (const auto& p : report.pairs)
    if (!p.completed)
      std::cerr << "warning: pair (" << p.model_id << ", " << p.task_id
                << ") failed: " << p.error << "\n";
}

// ---------------------------------------------------------------------------
// rank
// ---------------------------------------------------------------------------

struct RankArgs {
  std::string task_id, hardware_id;
  std::string weights_path, preset;
  std::string method = "copeland";
  std::string statistic = "mean";
  std::string combiner = "sum";
  std::string format = "table";
  std::string out_path;
};

void run_rank(const std::string& store_root, const RankArgs& args,
              const FileConfig& cfg) {
  auto statistic = parse_statistic(args.statistic);
  if (!statistic) throw DataError("unknown statistic '" + args.statistic + "'");
  auto combiner = parse_combiner(args.combiner);
  if (!combiner) throw DataError("unknown combiner '" + args.combiner + "'");
  WeightConfig weights = resolve_weights(args.weights_path, args.preset, cfg);

  Store store(store_root);
  Store::RecordFilter filter;
  filter.task_id = args.task_id;
  filter.hardware_id = args.hardware_id;
  auto records = store.query_records(filter);
  if (records.empty())
    throw DataError("no benchmark records for task '" + args.task_id +
                    "' on hardware '" + args.hardware_id + "'; run bench first");
  auto agg = aggregate_records(records, args.task_id, args.hardware_id, *statistic);
  print_warnings(agg.warnings);
  if (agg.per_model.empty())
    throw DataError("no fixed-batch records for task '" + args.task_id +
                    "' on hardware '" + args.hardware_id + "'");

  RankingTable table;
  if (args.method == "copeland") {
    std::vector<MetricRanking> rankings;
    for (const auto& [metric, weight] : weights.weights)
      if (weight > 0.0) rankings.push_back(rank_by_metric(agg.per_model, metric));
    table = weighted_copeland(rankings, weights);
  } else if (args.method == "objective") {
    std::map<std::string, ObjectiveCandidate> candidates;
    for (const auto& [model_id, metrics] : agg.per_model) {
      auto acc = metrics.find(Metric::Accuracy);
      if (acc == metrics.end())
        throw DataError("model '" + model_id +
                        "' has no accuracy measurement; the combined score needs one");
      candidates[model_id] = ObjectiveCandidate{acc->second, metrics};
    }
    table = rank_by_objective(candidates, weights, *combiner);
  } else {
    throw DataError("unknown method '" + args.method +
                    "' (expected copeland or objective)");
  }
  emit_table(table, args.format, args.out_path);
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string mode = "fusion";
  std::string data_dir;
  std::string hyper_path;
  std::string out_path;
  std::string log_path;
  std::string fusion_mode = "add";
  std::string weights_path, preset;
  bool refine = false;
};

ScorerKind kind_from_mode(const std::string& mode) {
  if (mode == "fusion") return ScorerKind::Fusion;
  if (mode == "task") return ScorerKind::TaskOnly;
  if (mode == "hardware") return ScorerKind::HardwareOnly;
  throw DataError("unknown mode '" + mode + "' (expected fusion, task, or hardware)");
}

void run_train(const std::string& store_root, const TrainArgs& args,
               const FileConfig& cfg) {
  ScorerKind kind = kind_from_mode(args.mode);
  auto fmode = parse_fusion_mode(args.fusion_mode);
  if (!fmode) throw DataError("unknown fusion mode '" + args.fusion_mode + "'");

  std::string world_path = (fs::path(args.data_dir) / "world.json").string();
  PlantedWorld world = world_from_json(parse_json_file(world_path));
  WeightConfig weights = resolve_weights(args.weights_path, args.preset, cfg);

  TrainHyper hyper;
  if (!args.hyper_path.empty()) {
    json j = parse_json_file(args.hyper_path);
    hyper.lr = j.value("lr", hyper.lr);
    hyper.epochs = j.value("epochs", hyper.epochs);
    hyper.seed = j.value("seed", hyper.seed);
    hyper.margin = j.value("margin", hyper.margin);
    hyper.token_dim = j.value("token_dim", hyper.token_dim);
    hyper.heads = j.value("heads", hyper.heads);
  }

  std::optional<Store> store;
  if (args.refine) store.emplace(store_root);

  std::vector<TrainingQuery> queries;
  std::vector<std::string> warnings;
  for (const auto& task : world.tasks) {
    for (const auto& hw : world.hardware) {
      TrainingQuery q;
      if (kind != ScorerKind::HardwareOnly) q.task_features = task_features_or_build(task);
      if (kind != ScorerKind::TaskOnly) q.hw_features = hw_features_or_build(hw);
      for (const auto& m : world.models) {
        q.candidate_ids.push_back(m.id);
        q.candidate_features.push_back(model_features_or_build(m));
      }
      if (args.refine) {
        auto refine = refine_map_from_store(*store, task.id, hw.id, &warnings);
        bool complete = !refine.empty();
        for (const auto& id : q.candidate_ids)
          complete = complete && refine.count(id) > 0;
        if (complete) {
          for (const auto& id : q.candidate_ids)
            q.refine_features.push_back(refine.at(id));
        } else {
          warnings.push_back("no complete benchmark coverage for (" + task.id +
                             ", " + hw.id + "); refinement skipped for this query");
        }
      }
      q.ground_truth = true_ranking(world, task.id, hw.id, weights).table;
      queries.push_back(std::move(q));
    }
  }
  print_warnings(warnings);

  TrainResult result = train_scorer(queries, hyper, kind, *fmode);
  write_json_file(args.out_path, scorer_to_json(result.params));
  if (!args.log_path.empty()) {
    std::ofstream f(args.log_path);
    if (!f) throw DataError("cannot open '" + args.log_path + "' for writing");
    write_training_log_csv(result.log, f);
  }
  const auto& last = result.log.back();
  char line[160];
  std::snprintf(line, sizeof(line),
                "trained %s scorer on %zu queries: epochs=%d loss=%.6f train_tau=%.4f\n",
                scorer_kind_name(kind), queries.size(), last.epoch, last.loss,
                last.train_tau);
  std::cout << line << "saved scorer to " << args.out_path << "\n";
}

// ---------------------------------------------------------------------------
// recommend
// ---------------------------------------------------------------------------

struct RecommendArgs {
  std::string mode = "fusion";
  std::string task_id, hardware_id;
  std::vector<std::string> scorer_paths;
  int top_k = 0;  // 0 = not given
  bool refine = false;
  std::string selector_weights_path;
  std::string format = "table";
  std::string out_path;
};

void run_recommend(const std::string& store_root, const RecommendArgs& args) {
  Store store(store_root);
  auto models = store.load_models();
  if (models.empty()) throw DataError("store has no models; ingest a registry first");
  auto tasks = store.load_tasks();
  auto hardware = store.load_hardware();

  const TaskDescriptor* task = nullptr;
  if (!args.task_id.empty()) task = &find_by_id(tasks, args.task_id, "task");
  const HardwareProfile* hw = nullptr;
  if (!args.hardware_id.empty())
    hw = &find_by_id(hardware, args.hardware_id, "hardware");

  if (args.scorer_paths.empty()) throw DataError("pass --scorer <artifact>");

  if (args.mode == "fusion") {
    if (args.scorer_paths.size() != 1)
      throw DataError("fusion mode takes exactly one --scorer");
    ScorerParams params = Store::load_scorer_file(args.scorer_paths.front());
    if (!task && params.kind != ScorerKind::HardwareOnly)
      throw DataError("this scorer needs --task");

    bool refine_requested = args.refine || args.top_k > 0;
    std::optional<int> top_k;
    std::map<std::string, std::vector<double>> refine;
    std::vector<std::string> warnings;
    if (refine_requested) {
      top_k = args.top_k > 0 ? args.top_k : 3;
      if (!task || !hw)
        throw DataError("--refine needs --task and --hardware to locate benchmark records");
      refine = refine_map_from_store(store, args.task_id, args.hardware_id, &warnings);
    }
    print_warnings(warnings);

    auto result = recommend_fusion(task ? *task : TaskDescriptor{}, hw, models,
                                   params, top_k,
                                   refine_requested ? &refine : nullptr);
    print_warnings(result.warnings);
    emit_table(result.table, args.format, args.out_path);
    return;
  }

  if (args.mode != "shadow")
    throw DataError("unknown mode '" + args.mode + "' (expected fusion or shadow)");

  std::vector<SelectorOutput> outputs;
  for (const auto& path : args.scorer_paths) {
    ScorerParams params = Store::load_scorer_file(path);
    if (params.kind == ScorerKind::HardwareOnly) {
      if (!hw) throw DataError("scorer '" + path + "' needs --hardware");
      outputs.push_back(hardware_selector(*hw, models, params));
    } else {
      if (!task) throw DataError("scorer '" + path + "' needs --task");
      outputs.push_back(task_selector(*task, models, params));
    }
  }
  std::optional<std::map<SelectorKind, double>> sel_weights;
  if (!args.selector_weights_path.empty()) {
    json j = parse_json_file(args.selector_weights_path);
    std::map<SelectorKind, double> w;
    for (const auto& [key, value] : j.items()) {
      auto kind = parse_selector_kind(key);
      if (!kind) throw DataError("unknown selector '" + key + "' in weights file");
      w[*kind] = value.get<double>();
    }
    sel_weights = std::move(w);
  }
  RankingTable table =
      combine_selectors(outputs, sel_weights ? &*sel_weights : nullptr);
  emit_table(table, args.format, args.out_path);
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

void run_eval(const std::string& pred_path, const std::string& truth_path) {
  RankingTable pred = parse_json_file(pred_path).get<RankingTable>();
  RankingTable truth = parse_json_file(truth_path).get<RankingTable>();
  double tau = kendall_tau(pred, truth);
  char line[64];
  std::snprintf(line, sizeof(line), "%.6f\n", tau);
  std::cout << line;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hardware-aware pre-trained-model recommendation"};
  app.require_subcommand(1);

  std::string store_root = "./hwrec_store";
  std::string config_path;
  app.add_option("--store", store_root, "Store directory")
      ->envname("HWREC_HOME");
  app.add_option("--config", config_path,
                 "JSON config with default weights, composite spec, and "
                 "stabilize policy; flags override");

  SynthgenArgs synth;
  auto* sub_synth = app.add_subcommand(
      "synthgen", "Generate a synthetic fleet: registries, performance world, "
                  "and reference rankings");
  sub_synth->add_option("--spec", synth.spec_path, "World spec JSON");
  sub_synth->add_option("--out", synth.out_dir, "Output directory")->required();
  sub_synth->add_option("--models", synth.models, "Model count override");
  sub_synth->add_option("--hardware", synth.hardware, "Hardware count override");
  sub_synth->add_option("--tasks", synth.tasks, "Task count override");
  sub_synth->add_option("--latent-dim", synth.latent_dim, "Latent dimension override");
  sub_synth->add_option("--seed", synth.seed, "Seed override");
  sub_synth->add_option("--noise", synth.noise, "Relative measurement noise sigma");
  sub_synth->add_option("--interaction", synth.interaction,
                        "Hardware-model interaction strength");
  sub_synth->add_option("--samples", synth.samples, "Samples per task override");
  sub_synth->add_option("--weights", synth.weights_path,
                        "Weight config JSON for the reference rankings");
  sub_synth->add_option("--preset", synth.preset,
                        "Weight preset: balanced|speed|energy|accuracy");

  std::string ingest_kind, ingest_file;
  auto* sub_ingest =
      app.add_subcommand("ingest", "Validate and install a registry file");
  sub_ingest->add_option("--kind", ingest_kind, "models|hardware|tasks")->required();
  sub_ingest->add_option("--file", ingest_file, "Registry JSON array")->required();

  BenchArgs bench;
  auto* sub_bench = app.add_subcommand(
      "bench", "Benchmark (model, task) pairs on one device and append the "
               "records to the store");
  sub_bench->add_option("--hardware", bench.hardware_id, "Hardware id")->required();
  sub_bench->add_option("--pairs", bench.pairs_path,
                        "JSON array of {model_id, task_id}");
  sub_bench->add_flag("--all-pairs", bench.all_pairs,
                      "Bench every model on every task");
  sub_bench
      ->add_option("--sensor", bench.sensor,
                   "Sensor provider: host|scripted|synthetic")
      ->envname("HWREC_SENSOR");
  sub_bench->add_option("--world", bench.world_path,
                        "World fixture JSON (default <store>/world.json)");
  sub_bench->add_option("--script", bench.script_path,
                        "Sensor script JSON for --sensor scripted");
  sub_bench->add_option("--policy", bench.policy_path, "Stabilize policy JSON");

  RankArgs rank;
  auto* sub_rank = app.add_subcommand(
      "rank", "Rank benchmarked models for one (task, hardware) scope");
  sub_rank->add_option("--task", rank.task_id, "Task id")->required();
  sub_rank->add_option("--hardware", rank.hardware_id, "Hardware id")->required();
  auto* rank_weights =
      sub_rank->add_option("--weights", rank.weights_path, "Weight config JSON");
  sub_rank->add_option("--preset", rank.preset,
                       "Weight preset: balanced|speed|energy|accuracy")
      ->excludes(rank_weights);
  sub_rank->add_option("--method", rank.method, "copeland|objective");
  sub_rank->add_option("--statistic", rank.statistic, "mean|median");
  sub_rank->add_option("--combiner", rank.combiner,
                       "sum|product (objective method)");
  sub_rank->add_option("--format", rank.format, "table|json|csv");
  sub_rank->add_option("--out", rank.out_path, "Write table to file (.csv or .json)");

  TrainArgs train;
  auto* sub_train =
      app.add_subcommand("train", "Train a similarity scorer on a world fixture");
  sub_train->add_option("--mode", train.mode, "fusion|task|hardware")->required();
  sub_train->add_option("--data", train.data_dir, "Directory with world.json")
      ->required();
  sub_train->add_option("--hyper", train.hyper_path,
                        "Hyperparameter JSON: lr, epochs, seed, margin, "
                        "token_dim, heads");
  sub_train->add_option("--out", train.out_path, "Scorer artifact path")->required();
  sub_train->add_option("--log", train.log_path, "Write per-epoch CSV log");
  sub_train->add_option("--fusion-mode", train.fusion_mode,
                        "How hardware enters the query token: add|concat");
  auto* train_weights = sub_train->add_option(
      "--weights", train.weights_path, "Weight config JSON for the training targets");
  sub_train->add_option("--preset", train.preset,
                        "Weight preset: balanced|speed|energy|accuracy")
      ->excludes(train_weights);
  sub_train->add_flag("--refine", train.refine,
                      "Attach benchmark-derived refinement features from the store");

  RecommendArgs rec;
  auto* sub_rec = app.add_subcommand(
      "recommend", "Rank candidate models with a trained scorer");
  sub_rec->add_option("--mode", rec.mode, "fusion|shadow");
  sub_rec->add_option("--task", rec.task_id, "Task id");
  sub_rec->add_option("--hardware", rec.hardware_id, "Hardware id");
  sub_rec->add_option("--scorer", rec.scorer_paths,
                      "Scorer artifact (repeat for shadow selectors)");
  sub_rec->add_option("--top-k", rec.top_k,
                      "Refinement depth; implies --refine (default 3)");
  sub_rec->add_flag("--refine", rec.refine,
                    "Re-score the top candidates with benchmark-derived features");
  sub_rec->add_option("--selector-weights", rec.selector_weights_path,
                      "JSON map selector->weight for shadow mode");
  sub_rec->add_option("--format", rec.format, "table|json|csv");
  sub_rec->add_option("--out", rec.out_path, "Write table to file (.csv or .json)");

  std::string eval_pred, eval_truth;
  auto* sub_eval = app.add_subcommand(
      "eval", "Kendall tau-b between a predicted and a reference ranking");
  sub_eval->add_option("--pred", eval_pred, "Predicted RankingTable JSON")->required();
  sub_eval->add_option("--truth", eval_truth, "Reference RankingTable JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    FileConfig cfg = load_file_config(config_path);
    if (sub_synth->parsed()) run_synthgen(synth, cfg);
    else if (sub_ingest->parsed()) run_ingest(store_root, ingest_kind, ingest_file);
    else if (sub_bench->parsed()) run_bench(store_root, bench, cfg);
    else if (sub_rank->parsed()) run_rank(store_root, rank, cfg);
    else if (sub_train->parsed()) run_train(store_root, train, cfg);
    else if (sub_rec->parsed()) run_recommend(store_root, rec);
    else run_eval(eval_pred, eval_truth);
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
