#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/json_io.hpp"
#include "hwrec/kernels.hpp"
#include "hwrec/linalg.hpp"

namespace hwrec {

// ---------------------------------------------------------------------------
// Tokens and scorer parameters
// ---------------------------------------------------------------------------

struct ModelToken {
  std::vector<double> vector;
  std::string model_id;
};

struct TaskToken {
  std::vector<double> vector;
  std::string task_id;
  std::optional<std::string> hardware_id;  // absent for hardware-agnostic queries
};

// How hardware features enter the query token: added through their own
// projection (keeps the token dimension fixed) or concatenated onto the task
// features before the task projection.
enum class FusionMode { Add, Concat };

// What the scorer was trained to answer. Fusion scores (task, hardware)
// queries; TaskOnly ignores hardware; HardwareOnly treats the device itself
// as the query.
enum class ScorerKind { Fusion, TaskOnly, HardwareOnly };

const char* fusion_mode_name(FusionMode m);
std::optional<FusionMode> parse_fusion_mode(std::string_view s);
const char* scorer_kind_name(ScorerKind k);
std::optional<ScorerKind> parse_scorer_kind(std::string_view s);

struct ScorerDims {
  int token_dim = 8;
  int heads = 2;
  int model_features = 0;
  int task_features = 0;   // query-side input width (hw width for HardwareOnly)
  int hw_features = 0;     // additive hardware projection width (Fusion+Add)
  int refine_features = 0; // 0 when no refinement projection is trained
};

// Learned linear extractors plus a multi-head bilinear similarity:
//   theta = W_model x_m          mu = W_task x_q (+ W_hw x_h)
//   sim   = sum_h head_w[h] * (Q_h mu) . (K_h theta) / sqrt(d)
// All gradients are hand-derived; no ML framework involved.
struct ScorerParams {
  ScorerKind kind = ScorerKind::Fusion;
  FusionMode fusion_mode = FusionMode::Add;
  ScorerDims dims;
  Mat w_model;
  Mat w_task;
  Mat w_hw;
  std::vector<Mat> q;  // one per head, d x d
  std::vector<Mat> k;
  std::vector<double> head_weights;
  Mat w_refine;
  bool trained = false;
};

// Uniform init in [-1/sqrt(d), 1/sqrt(d)], reproducible from the seed.
ScorerParams init_scorer(ScorerKind kind, FusionMode mode, const ScorerDims& dims,
                         std::uint64_t seed);

ModelToken extract_model_token(const ModelCard& card, const ScorerParams& params);

// Builds the query token. `task` may be null only for HardwareOnly scorers;
// `hw` may be null for hardware-agnostic scoring.
TaskToken extract_task_token(const ScorerParams& params, const TaskDescriptor* task,
                             const HardwareProfile* hw);

double similarity(const ModelToken& theta, const TaskToken& mu,
                  const ScorerParams& params);

std::vector<double> similarity_batch(const ScorerParams& params, const TaskToken& mu,
                                     const std::vector<ModelToken>& tokens,
                                     kernels::Exec exec = kernels::Exec::Parallel);

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

struct TrainingQuery {
  std::vector<double> task_features;  // empty for HardwareOnly queries
  std::vector<double> hw_features;    // empty when the query has no hardware
  std::vector<std::string> candidate_ids;
  std::vector<std::vector<double>> candidate_features;  // aligned with ids
  // Either empty or aligned with candidate_ids; when present the refinement
  // projection is trained jointly on refined tokens.
  std::vector<std::vector<double>> refine_features;
  RankingTable ground_truth;
};

struct TrainHyper {
  double lr = 0.01;
  int epochs = 200;
  std::uint64_t seed = 7;
  double margin = 0.1;
  int token_dim = 8;
  int heads = 2;
};

struct ScorerGradients {
  Mat w_model, w_task, w_hw, w_refine;
  std::vector<Mat> q, k;
  std::vector<double> head_weights;
};

// Mean pairwise hinge over every ground-truth-ordered candidate pair:
// for a ranked above b, the pair contributes max(0, margin - (sim_a - sim_b)).
// Fills analytic gradients when `grads` is non-null.
double ranking_loss(const ScorerParams& params,
                    const std::vector<TrainingQuery>& queries, double margin,
                    ScorerGradients* grads);

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double train_tau = 0.0;  // mean tau of predicted vs ground truth
};

struct TrainResult {
  ScorerParams params;
  std::vector<EpochStats> log;
};

// Full-batch gradient descent with a fixed learning rate. Deterministic for
// a fixed seed. Throws DataError with lr/epoch diagnostics if the loss goes
// non-finite.
TrainResult train_scorer(const std::vector<TrainingQuery>& train_set,
                         const TrainHyper& hyper, ScorerKind kind,
                         FusionMode mode = FusionMode::Add);

// ---------------------------------------------------------------------------
// Recommendation
// ---------------------------------------------------------------------------

struct RecommendResult {
  RankingTable table;  // method = "fusion"
  std::vector<std::string> warnings;
};

// Ranks candidates by similarity. When top_k and refine are given, the
// top-K tokens are augmented with the per-model refinement features through
// W_refine and re-scored; membership of the top-K set never changes, only
// its internal order.
RecommendResult recommend_fusion(
    const TaskDescriptor& task, const HardwareProfile* hw,
    const std::vector<ModelCard>& candidates, const ScorerParams& params,
    std::optional<int> top_k = std::nullopt,
    const std::map<std::string, std::vector<double>>* refine = nullptr);

// ---------------------------------------------------------------------------
// Feature builders for callers that start from raw registry entries
// ---------------------------------------------------------------------------

struct FeatureOptions {
  int hash_buckets = 16;  // one-hot bucket count per categorical field
};

std::vector<double> model_feature_vector(const ModelCard& card,
                                         const FeatureOptions& opts = {});
// Numeric fields on a log scale plus hashed one-hot buckets for the
// categorical fields (cpu model, accelerator).
std::vector<double> hardware_feature_vector(const HardwareProfile& hw,
                                            const FeatureOptions& opts = {});
std::vector<double> task_feature_vector(const TaskDescriptor& task);

// Benchmark-derived per-model aggregates as refinement input (fixed width 4).
std::vector<double> refinement_features(const MetricMap& aggregates);
inline constexpr int kRefineFeatureDim = 4;

void write_training_log_csv(const std::vector<EpochStats>& log, std::ostream& out);

json scorer_to_json(const ScorerParams& params);
ScorerParams scorer_from_json(const json& j);

}  // namespace hwrec
