#include "hwrec/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hwrec/errors.hpp"
#include "hwrec/ranking.hpp"

namespace hwrec {

// ---------------------------------------------------------------------------
// Laws. Every law evaluates through one of these helpers, and the synthetic
// rig calls the same helpers on copied scalars, so a noiseless measurement
// reproduces the law value bit for bit.
// ---------------------------------------------------------------------------

namespace {

double eval_latency(double alpha, double beta, double speed, double factor,
                    int batch) {
  return (alpha + beta * static_cast<double>(batch)) * speed * factor;
}

double eval_memory(double weights_mb, double act_mb, int batch) {
  return weights_mb + act_mb * static_cast<double>(batch);
}

double eval_power(double base_w, double coef_w, double load) {
  return base_w + coef_w * load;
}

double eval_temp(double power_w) { return 38.0 + 2.5 * power_w; }

double interaction_factor(const std::vector<double>& u,
                          const std::vector<double>& v, double gamma) {
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d += u[i] * v[i];
  return std::max(0.05, 1.0 + gamma * std::tanh(d));
}

// Quantized to the fixed-batch grid: a full batch of 32 scores exactly
// 32 * accuracy correct samples.
double eval_accuracy(const std::vector<double>& u, const std::vector<double>& t,
                     double bias) {
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) d += u[i] * t[i];
  const double logistic = 1.0 / (1.0 + std::exp(-(2.0 * d + bias)));
  return std::round(32.0 * logistic) / 32.0;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  Rng r(seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
  return r.next_u64();
}

std::string padded_id(char prefix, int index, int count) {
  int width = 2;
  for (int v = count; v >= 100 && width < 10; v /= 10) ++width;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c%0*d", prefix, width, index + 1);
  return buf;
}

std::vector<double> unit_latent(Rng& rng, int dim) {
  std::vector<double> v(dim);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  for (auto& x : v) x = rng.normal() * scale;
  return v;
}

constexpr const char* kFamilies[] = {"resnet", "mobilenet", "transformer",
                                     "cnn", "rnn"};
constexpr const char* kSourceTasks[] = {"imagenet", "coco", "speech", "text"};
constexpr const char* kCpuModels[] = {"cortex-a53", "cortex-a72", "x86-atom",
                                      "riscv-u74"};

}  // namespace

int PlantedWorld::model_index(const std::string& id) const {
  for (std::size_t i = 0; i < models.size(); ++i)
    if (models[i].id == id) return static_cast<int>(i);
  throw DataError("unknown model id '" + id + "'");
}

int PlantedWorld::hardware_index(const std::string& id) const {
  for (std::size_t i = 0; i < hardware.size(); ++i)
    if (hardware[i].id == id) return static_cast<int>(i);
  throw DataError("unknown hardware id '" + id + "'");
}

int PlantedWorld::task_index(const std::string& id) const {
  for (std::size_t i = 0; i < tasks.size(); ++i)
    if (tasks[i].id == id) return static_cast<int>(i);
  throw DataError("unknown task id '" + id + "'");
}

PlantedWorld generate_world(const WorldSpec& spec) {
  if (spec.n_models < 1 || spec.n_hardware < 1 || spec.n_tasks < 1)
    throw DataError("world needs at least one model, hardware, and task");
  if (spec.latent_dim < 1) throw DataError("latent_dim must be >= 1");
  if (spec.noise_sigma < 0.0) throw DataError("noise_sigma must be >= 0");
  if (spec.samples_per_task < 0)
    throw DataError("samples_per_task must be >= 0");

  PlantedWorld w;
  w.seed = spec.seed;
  w.noise_sigma = spec.noise_sigma;
  w.interaction_strength = spec.interaction_strength;
  w.latent_dim = spec.latent_dim;
  Rng rng(spec.seed);

  for (int i = 0; i < spec.n_models; ++i) {
    ModelCard m;
    m.id = padded_id('m', i, spec.n_models);
    m.architecture_family = kFamilies[rng.uniform_int(0, 4)];
    m.name = m.architecture_family + "-" + m.id;
    m.source_task = kSourceTasks[rng.uniform_int(0, 3)];
    m.param_count = static_cast<std::int64_t>(
        std::exp(rng.uniform(std::log(1e5), std::log(5e7))));
    const double size = static_cast<double>(m.param_count) / 5e7;
    w.model_alpha_ms.push_back(2.0 + 8.0 * size);
    w.model_beta_ms.push_back(0.05 + 0.8 * size);
    w.model_load.push_back(0.5 + 2.5 * size);
    const double weights_mb = static_cast<double>(m.param_count) * 4.0 / 1e6;
    w.model_weights_mb.push_back(weights_mb);
    w.model_act_mb.push_back(weights_mb / 64.0);
    w.model_acc_bias.push_back(rng.uniform(-0.5, 0.5));
    w.model_latents.push_back(unit_latent(rng, spec.latent_dim));

    m.model_features.push_back(1.0);
    m.model_features.push_back(std::log10(static_cast<double>(m.param_count)) /
                               8.0);
    for (int f = 0; f < 5; ++f)
      m.model_features.push_back(m.architecture_family == kFamilies[f] ? 1.0
                                                                       : 0.0);
    for (double x : w.model_latents.back()) m.model_features.push_back(x);
    w.models.push_back(std::move(m));
  }

  for (int i = 0; i < spec.n_hardware; ++i) {
    HardwareProfile h;
    h.id = padded_id('h', i, spec.n_hardware);
    h.device_name = "device-" + h.id;
    h.cpu_model = kCpuModels[rng.uniform_int(0, 3)];
    const int core_choices[] = {2, 4, 8};
    h.cpu_cores = core_choices[rng.uniform_int(0, 2)];
    h.cpu_freq_mhz = rng.uniform(600.0, 2400.0);
    const double ram_choices[] = {512.0, 1024.0, 2048.0, 4096.0};
    h.ram_mb = ram_choices[rng.uniform_int(0, 3)];
    h.storage_mb = rng.uniform(4096.0, 65536.0);
    if (rng.uniform() < 0.25)
      h.accelerator = rng.uniform() < 0.5 ? "edgetpu" : "gpu";
    w.hw_speed.push_back(std::exp(rng.uniform(-0.7, 0.7)));
    w.hw_power_base_w.push_back(rng.uniform(1.0, 3.0));
    w.hw_power_coef_w.push_back(rng.uniform(0.5, 1.5));
    w.hw_latents.push_back(unit_latent(rng, spec.latent_dim));

    h.hw_features.push_back(1.0);
    h.hw_features.push_back(std::log2(static_cast<double>(h.cpu_cores)) / 4.0);
    h.hw_features.push_back(std::log2(h.cpu_freq_mhz) / 12.0);
    h.hw_features.push_back(std::log2(h.ram_mb) / 14.0);
    h.hw_features.push_back(std::log2(h.storage_mb) / 17.0);
    h.hw_features.push_back(h.accelerator ? 1.0 : 0.0);
    for (double x : w.hw_latents.back()) h.hw_features.push_back(x);
    w.hardware.push_back(std::move(h));
  }

  for (int i = 0; i < spec.n_tasks; ++i) {
    TaskDescriptor t;
    t.id = padded_id('t', i, spec.n_tasks);
    t.dataset_name = "synth-" + t.id;
    t.num_classes = rng.uniform_int(2, 12);
    t.num_samples = spec.samples_per_task > 0 ? spec.samples_per_task
                                              : 32 * rng.uniform_int(2, 4);
    t.input_shape = {3, 32, 32};
    w.task_latents.push_back(unit_latent(rng, spec.latent_dim));

    t.task_features.push_back(1.0);
    t.task_features.push_back(static_cast<double>(t.num_classes) / 10.0);
    t.task_features.push_back(
        std::log10(static_cast<double>(t.num_samples)) / 5.0);
    for (auto d : t.input_shape)
      t.task_features.push_back(static_cast<double>(d) / 64.0);
    for (double x : w.task_latents.back()) t.task_features.push_back(x);
    w.tasks.push_back(std::move(t));
  }

  return w;
}

double law_latency_ms(const PlantedWorld& w, int mi, int hi, int batch) {
  const double factor = interaction_factor(w.model_latents[mi], w.hw_latents[hi],
                                           w.interaction_strength);
  return eval_latency(w.model_alpha_ms[mi], w.model_beta_ms[mi], w.hw_speed[hi],
                      factor, batch);
}

double law_memory_mb(const PlantedWorld& w, int mi, int batch) {
  return eval_memory(w.model_weights_mb[mi], w.model_act_mb[mi], batch);
}

double law_power_w(const PlantedWorld& w, int mi, int hi) {
  return eval_power(w.hw_power_base_w[hi], w.hw_power_coef_w[hi],
                    w.model_load[mi]);
}

double law_cpu_temp_c(const PlantedWorld& w, int mi, int hi) {
  return eval_temp(law_power_w(w, mi, hi));
}

double law_accuracy(const PlantedWorld& w, int mi, int ti) {
  return eval_accuracy(w.model_latents[mi], w.task_latents[ti],
                       w.model_acc_bias[mi]);
}

MetricMap latent_metrics(const PlantedWorld& w, int mi, int ti, int hi,
                         int batch, const CompositeSpec& composite) {
  MetricMap m;
  m[Metric::ExecutionTimeMs] = law_latency_ms(w, mi, hi, batch);
  m[Metric::MemoryMb] = law_memory_mb(w, mi, batch);
  m[Metric::PowerW] = law_power_w(w, mi, hi);
  m[Metric::CpuTempC] = law_cpu_temp_c(w, mi, hi);
  m[Metric::CarbonFootprint] = carbon_footprint(m, composite);
  m[Metric::Accuracy] = law_accuracy(w, mi, ti);
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic rig
// ---------------------------------------------------------------------------

struct SyntheticDeviceState {
  // Copied world slices: enough to evaluate every law for this device.
  std::vector<std::string> model_ids, task_ids;
  std::vector<std::vector<double>> model_latents, task_latents;
  std::vector<double> alpha, beta, load, weights_mb, act_mb, acc_bias;
  std::vector<double> hw_latent;
  double speed = 1.0, power_base = 0.0, power_coef = 0.0;
  double gamma = 0.0, noise_sigma = 0.0;
  std::string hardware_id;
  Rng rng{1};

  // Dynamic device state the sensors observe.
  double idle_power_w = 0.5, idle_temp_c = 40.0;
  double last_power_w = 0.5, last_temp_c = 40.0;
  bool ran = false;
  double window_peak_mb = 0.0;
  MemoryWindow window_counter = 0;

  double noisy(double value) {
    // sigma == 0 must reproduce the law bit-exactly, so skip the arithmetic.
    if (noise_sigma == 0.0) return value;
    return value * (1.0 + noise_sigma * rng.normal());
  }

  int model_index(const std::string& id) const {
    for (std::size_t i = 0; i < model_ids.size(); ++i)
      if (model_ids[i] == id) return static_cast<int>(i);
    throw DataError("unknown model id '" + id + "'");
  }
  int task_index(const std::string& id) const {
    for (std::size_t i = 0; i < task_ids.size(); ++i)
      if (task_ids[i] == id) return static_cast<int>(i);
    throw DataError("unknown task id '" + id + "'");
  }
};

namespace {

class DeviceWorkload : public Workload {
 public:
  DeviceWorkload(std::shared_ptr<SyntheticDeviceState> state, int mi, int ti)
      : state_(std::move(state)) {
    auto& s = *state_;
    alpha_ = s.alpha[mi];
    beta_ = s.beta[mi];
    factor_ = interaction_factor(s.model_latents[mi], s.hw_latent, s.gamma);
    weights_mb_ = s.weights_mb[mi];
    act_mb_ = s.act_mb[mi];
    power_ = eval_power(s.power_base, s.power_coef, s.load[mi]);
    accuracy_ = eval_accuracy(s.model_latents[mi], s.task_latents[ti],
                              s.acc_bias[mi]);
    description_ = s.model_ids[mi] + " on " + s.task_ids[ti] + " @ " +
                   s.hardware_id;
  }

  WorkResult forward(int batch) override {
    auto& s = *state_;
    WorkResult result;
    result.latency_ms =
        s.noisy(eval_latency(alpha_, beta_, s.speed, factor_, batch));
    result.total = batch;
    // Accuracy gets the same multiplicative noise as every other metric, so
    // measurement jitter vanishes as sigma does; s.noisy already skips the
    // arithmetic entirely at sigma == 0, keeping the noiseless path exact.
    const double measured =
        std::clamp(s.noisy(accuracy_), 0.0, 1.0);
    result.correct = static_cast<std::int64_t>(
        std::llround(static_cast<double>(batch) * measured));
    s.window_peak_mb = std::max(
        s.window_peak_mb, s.noisy(eval_memory(weights_mb_, act_mb_, batch)));
    s.last_power_w = s.noisy(power_);
    s.last_temp_c = s.noisy(eval_temp(s.last_power_w));
    s.ran = true;
    return result;
  }

  std::string description() const override { return description_; }

 private:
  std::shared_ptr<SyntheticDeviceState> state_;
  double alpha_ = 0, beta_ = 0, factor_ = 1, weights_mb_ = 0, act_mb_ = 0;
  double power_ = 0, accuracy_ = 0;
  std::string description_;
};

class DeviceSensors : public SensorProvider {
 public:
  explicit DeviceSensors(std::shared_ptr<SyntheticDeviceState> state)
      : state_(std::move(state)) {}

  double cpu_util() override { return 0.05; }
  double ram_util() override { return 0.20; }
  double cpu_temp_c() override {
    return state_->ran ? state_->last_temp_c : state_->idle_temp_c;
  }
  double power_w() override {
    return state_->ran ? state_->last_power_w : state_->idle_power_w;
  }
  MemoryWindow begin_memory_window() override {
    state_->window_peak_mb = 0.0;
    return ++state_->window_counter;
  }
  double peak_memory_mb(MemoryWindow) override {
    return state_->window_peak_mb;
  }

 private:
  std::shared_ptr<SyntheticDeviceState> state_;
};

}  // namespace

SyntheticDevice::SyntheticDevice(const PlantedWorld& world,
                                 const std::string& hardware_id) {
  const int hi = world.hardware_index(hardware_id);
  state_ = std::make_shared<SyntheticDeviceState>();
  auto& s = *state_;
  for (const auto& m : world.models) s.model_ids.push_back(m.id);
  for (const auto& t : world.tasks) s.task_ids.push_back(t.id);
  s.model_latents = world.model_latents;
  s.task_latents = world.task_latents;
  s.alpha = world.model_alpha_ms;
  s.beta = world.model_beta_ms;
  s.load = world.model_load;
  s.weights_mb = world.model_weights_mb;
  s.act_mb = world.model_act_mb;
  s.acc_bias = world.model_acc_bias;
  s.hw_latent = world.hw_latents[hi];
  s.speed = world.hw_speed[hi];
  s.power_base = world.hw_power_base_w[hi];
  s.power_coef = world.hw_power_coef_w[hi];
  s.gamma = world.interaction_strength;
  s.noise_sigma = world.noise_sigma;
  s.hardware_id = hardware_id;
  s.rng = Rng(mix_seed(world.seed, static_cast<std::uint64_t>(hi) + 1));
  sensors_ = std::make_shared<DeviceSensors>(state_);
}

std::shared_ptr<Workload> SyntheticDevice::workload(const std::string& model_id,
                                                    const std::string& task_id) {
  return std::make_shared<DeviceWorkload>(state_, state_->model_index(model_id),
                                          state_->task_index(task_id));
}

SyntheticRig::SyntheticRig(const PlantedWorld& world, const std::string& model_id,
                           const std::string& task_id,
                           const std::string& hardware_id)
    : device_(world, hardware_id), workload_(device_.workload(model_id, task_id)) {}

SyntheticRig world_workload(const PlantedWorld& world, const std::string& model_id,
                            const std::string& task_id,
                            const std::string& hardware_id) {
  return SyntheticRig(world, model_id, task_id, hardware_id);
}

GroundTruthRanking true_ranking(const PlantedWorld& world,
                                const std::string& task_id,
                                const std::string& hardware_id,
                                const WeightConfig& config) {
  const int ti = world.task_index(task_id);
  const int hi = world.hardware_index(hardware_id);
  std::map<std::string, MetricMap> aggregates;
  for (std::size_t mi = 0; mi < world.models.size(); ++mi)
    aggregates[world.models[mi].id] =
        latent_metrics(world, static_cast<int>(mi), ti, hi);

  std::vector<MetricRanking> rankings;
  for (const auto& [metric, weight] : config.weights)
    rankings.push_back(rank_by_metric(aggregates, metric));

  GroundTruthRanking gt;
  gt.task_id = task_id;
  gt.hardware_id = hardware_id;
  gt.table = weighted_copeland(rankings, config);
  gt.table.method = "ground_truth";
  return gt;
}

// ---------------------------------------------------------------------------
// World serialization
// ---------------------------------------------------------------------------

json world_to_json(const PlantedWorld& w) {
  return json{{"seed", w.seed},
              {"noise_sigma", w.noise_sigma},
              {"interaction_strength", w.interaction_strength},
              {"latent_dim", w.latent_dim},
              {"models", w.models},
              {"hardware", w.hardware},
              {"tasks", w.tasks},
              {"model_latents", w.model_latents},
              {"task_latents", w.task_latents},
              {"hw_latents", w.hw_latents},
              {"model_alpha_ms", w.model_alpha_ms},
              {"model_beta_ms", w.model_beta_ms},
              {"model_load", w.model_load},
              {"model_weights_mb", w.model_weights_mb},
              {"model_act_mb", w.model_act_mb},
              {"model_acc_bias", w.model_acc_bias},
              {"hw_speed", w.hw_speed},
              {"hw_power_base_w", w.hw_power_base_w},
              {"hw_power_coef_w", w.hw_power_coef_w}};
}

PlantedWorld world_from_json(const json& j) {
  PlantedWorld w;
  j.at("seed").get_to(w.seed);
  j.at("noise_sigma").get_to(w.noise_sigma);
  j.at("interaction_strength").get_to(w.interaction_strength);
  j.at("latent_dim").get_to(w.latent_dim);
  j.at("models").get_to(w.models);
  j.at("hardware").get_to(w.hardware);
  j.at("tasks").get_to(w.tasks);
  j.at("model_latents").get_to(w.model_latents);
  j.at("task_latents").get_to(w.task_latents);
  j.at("hw_latents").get_to(w.hw_latents);
  j.at("model_alpha_ms").get_to(w.model_alpha_ms);
  j.at("model_beta_ms").get_to(w.model_beta_ms);
  j.at("model_load").get_to(w.model_load);
  j.at("model_weights_mb").get_to(w.model_weights_mb);
  j.at("model_act_mb").get_to(w.model_act_mb);
  j.at("model_acc_bias").get_to(w.model_acc_bias);
  j.at("hw_speed").get_to(w.hw_speed);
  j.at("hw_power_base_w").get_to(w.hw_power_base_w);
  j.at("hw_power_coef_w").get_to(w.hw_power_coef_w);
  return w;
}

}  // namespace hwrec
