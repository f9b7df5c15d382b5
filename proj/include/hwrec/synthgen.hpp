#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/harness.hpp"
#include "hwrec/json_io.hpp"
#include "hwrec/metrics.hpp"
#include "hwrec/rng.hpp"

namespace hwrec {

struct GroundTruthRanking {
  std::string task_id;
  std::string hardware_id;
  RankingTable table;  // method = "ground_truth"
};

struct WorldSpec {
  int n_models = 4;
  int n_hardware = 2;
  int n_tasks = 2;
  int latent_dim = 4;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;           // relative measurement noise
  double interaction_strength = 0.0;  // how much the best model depends on hardware
  int samples_per_task = 0;           // 0 -> random multiple of 32 in [64,128]
};

// A fully synthetic fleet: registries plus the latent performance laws that
// drive every measurement. The laws are simple monotone parametric forms:
//
//   latency_ms(m,h,b) = (alpha_m + beta_m*b) * speed_h
//                         * max(0.05, 1 + gamma*tanh(u_m . v_h))
//   memory_mb(m,b)    = weights_mb_m + act_mb_m * b
//   power_w(m,h)      = power_base_h + power_coef_h * load_m
//   cpu_temp_c(m,h)   = 38 + 2.5 * power_w(m,h)
//   accuracy(m,t)     = round(32 * logistic(2 * u_m . t_t + acc_bias_m)) / 32
//
// where u/v/t are per-entity latent vectors and gamma is
// interaction_strength. Accuracy is quantized to the fixed-batch grid of
// 1/32 so that a noiseless batched measurement reproduces the law value
// bit-exactly.
struct PlantedWorld {
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double interaction_strength = 0.0;
  int latent_dim = 0;

  std::vector<ModelCard> models;
  std::vector<HardwareProfile> hardware;
  std::vector<TaskDescriptor> tasks;

  std::vector<std::vector<double>> model_latents;
  std::vector<std::vector<double>> task_latents;
  std::vector<std::vector<double>> hw_latents;

  std::vector<double> model_alpha_ms;
  std::vector<double> model_beta_ms;
  std::vector<double> model_load;
  std::vector<double> model_weights_mb;
  std::vector<double> model_act_mb;
  std::vector<double> model_acc_bias;

  std::vector<double> hw_speed;
  std::vector<double> hw_power_base_w;
  std::vector<double> hw_power_coef_w;

  int model_index(const std::string& id) const;
  int hardware_index(const std::string& id) const;
  int task_index(const std::string& id) const;
};

PlantedWorld generate_world(const WorldSpec& spec);

double law_latency_ms(const PlantedWorld& w, int mi, int hi, int batch);
double law_memory_mb(const PlantedWorld& w, int mi, int batch);
double law_power_w(const PlantedWorld& w, int mi, int hi);
double law_cpu_temp_c(const PlantedWorld& w, int mi, int hi);
double law_accuracy(const PlantedWorld& w, int mi, int ti);

// Canonical per-model metric values at the fixed batch size, carbon included.
MetricMap latent_metrics(const PlantedWorld& w, int mi, int ti, int hi,
                         int batch = 32,
                         const CompositeSpec& composite = default_composite_spec());

struct SyntheticDeviceState;

// One simulated device: a sensor set bound to the hardware profile plus
// workloads for any (model, task) pair. Forward passes follow the world's
// laws with Gaussian relative noise of sigma = noise_sigma and update the
// device state the sensors report. Copies everything it needs; the world
// need not outlive it.
class SyntheticDevice {
 public:
  SyntheticDevice(const PlantedWorld& world, const std::string& hardware_id);

  SensorProvider& sensors() { return *sensors_; }
  std::shared_ptr<Workload> workload(const std::string& model_id,
                                     const std::string& task_id);

 private:
  std::shared_ptr<SyntheticDeviceState> state_;
  std::shared_ptr<SensorProvider> sensors_;
};

// Single-pair convenience over SyntheticDevice.
class SyntheticRig {
 public:
  SyntheticRig(const PlantedWorld& world, const std::string& model_id,
               const std::string& task_id, const std::string& hardware_id);

  Workload& workload() { return *workload_; }
  SensorProvider& sensors() { return device_.sensors(); }
  std::shared_ptr<Workload> shared_workload() { return workload_; }

 private:
  SyntheticDevice device_;
  std::shared_ptr<Workload> workload_;
};

SyntheticRig world_workload(const PlantedWorld& world, const std::string& model_id,
                            const std::string& task_id,
                            const std::string& hardware_id);

// The oracle ranking: metric rankings over the noiseless latent values,
// aggregated with weighted Copeland.
GroundTruthRanking true_ranking(const PlantedWorld& world,
                                const std::string& task_id,
                                const std::string& hardware_id,
                                const WeightConfig& config);

json world_to_json(const PlantedWorld& w);
PlantedWorld world_from_json(const json& j);

}  // namespace hwrec
