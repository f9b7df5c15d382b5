#include "hwrec/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hwrec/errors.hpp"
#include "hwrec/ranking.hpp"
#include "hwrec/rng.hpp"

namespace hwrec {

const char* fusion_mode_name(FusionMode m) {
  return m == FusionMode::Add ? "add" : "concat";
}

std::optional<FusionMode> parse_fusion_mode(std::string_view s) {
  if (s == "add") return FusionMode::Add;
  if (s == "concat") return FusionMode::Concat;
  return std::nullopt;
}

const char* scorer_kind_name(ScorerKind k) {
  switch (k) {
    case ScorerKind::Fusion: return "fusion";
    case ScorerKind::TaskOnly: return "task_only";
    case ScorerKind::HardwareOnly: return "hardware_only";
  }
  return "?";
}

std::optional<ScorerKind> parse_scorer_kind(std::string_view s) {
  if (s == "fusion") return ScorerKind::Fusion;
  if (s == "task_only") return ScorerKind::TaskOnly;
  if (s == "hardware_only") return ScorerKind::HardwareOnly;
  return std::nullopt;
}

namespace {

void check_dims(ScorerKind kind, FusionMode mode, const ScorerDims& dims) {
  if (dims.token_dim < 1) throw DataError("token_dim must be >= 1");
  if (dims.heads < 1) throw DataError("heads must be >= 1");
  if (dims.model_features < 1) throw DataError("model_features must be >= 1");
  if (dims.task_features < 1) throw DataError("task_features must be >= 1");
  if (dims.hw_features < 0 || dims.refine_features < 0)
    throw DataError("feature widths must be >= 0");
  if (dims.hw_features > 0 && (kind != ScorerKind::Fusion || mode != FusionMode::Add))
    throw DataError(
        "a separate hardware projection only exists for fusion scorers in "
        "add mode; fold hardware features into the query side otherwise");
}

Mat init_mat(std::size_t rows, std::size_t cols, double bound, Rng& rng) {
  Mat m(rows, cols);
  for (auto& x : m.data) x = rng.uniform(-bound, bound);
  return m;
}

double inv_sqrt_d(const ScorerParams& params) {
  return 1.0 / std::sqrt(static_cast<double>(params.dims.token_dim));
}

}  // namespace

ScorerParams init_scorer(ScorerKind kind, FusionMode mode, const ScorerDims& dims,
                         std::uint64_t seed) {
  check_dims(kind, mode, dims);
  ScorerParams p;
  p.kind = kind;
  p.fusion_mode = mode;
  p.dims = dims;

  Rng rng(seed);
  const std::size_t d = static_cast<std::size_t>(dims.token_dim);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dims.token_dim));
  p.w_model = init_mat(d, dims.model_features, bound, rng);
  p.w_task = init_mat(d, dims.task_features, bound, rng);
  if (dims.hw_features > 0) p.w_hw = init_mat(d, dims.hw_features, bound, rng);
  for (int h = 0; h < dims.heads; ++h) {
    p.q.push_back(init_mat(d, d, bound, rng));
    p.k.push_back(init_mat(d, d, bound, rng));
  }
  if (dims.refine_features > 0)
    p.w_refine = init_mat(d, dims.refine_features, bound, rng);
  p.head_weights.assign(dims.heads, 1.0 / static_cast<double>(dims.heads));
  return p;
}

namespace {

std::vector<double> project(const Mat& w, const std::vector<double>& x,
                            const char* what) {
  if (w.cols != x.size())
    throw DataError(std::string(what) + ": expected " + std::to_string(w.cols) +
                    " features, got " + std::to_string(x.size()));
  return matvec(w, x);
}

// Core query-token computation over raw feature vectors. `hw` may be empty
// (hardware-agnostic query); for HardwareOnly scorers the hardware features
// ARE the query and flow through w_task.
std::vector<double> query_token(const ScorerParams& params,
                                const std::vector<double>& task_feats,
                                const std::vector<double>& hw_feats) {
  switch (params.kind) {
    case ScorerKind::HardwareOnly:
      return project(params.w_task, hw_feats, "hardware query");
    case ScorerKind::TaskOnly:
      return project(params.w_task, task_feats, "task query");
    case ScorerKind::Fusion:
      break;
  }
  if (params.fusion_mode == FusionMode::Concat) {
    std::vector<double> joint = task_feats;
    if (!hw_feats.empty()) {
      joint.insert(joint.end(), hw_feats.begin(), hw_feats.end());
    } else {
      // Absent hardware is a zero block, which matches the ablated query.
      joint.resize(params.w_task.cols, 0.0);
    }
    return project(params.w_task, joint, "fused query");
  }
  std::vector<double> mu = project(params.w_task, task_feats, "task query");
  if (!hw_feats.empty()) {
    if (params.w_hw.empty())
      throw DataError("scorer has no hardware projection");
    axpy(mu, 1.0, project(params.w_hw, hw_feats, "hardware query"));
  }
  return mu;
}

}  // namespace

ModelToken extract_model_token(const ModelCard& card, const ScorerParams& params) {
  ModelToken token;
  token.model_id = card.id;
  token.vector = project(params.w_model, card.model_features,
                         ("model '" + card.id + "'").c_str());
  return token;
}

TaskToken extract_task_token(const ScorerParams& params, const TaskDescriptor* task,
                             const HardwareProfile* hw) {
  if (!task && params.kind != ScorerKind::HardwareOnly)
    throw DataError("this scorer needs a task to build its query");
  if (params.kind == ScorerKind::HardwareOnly && !hw)
    throw DataError("a hardware-only scorer needs a hardware profile");
  TaskToken token;
  if (task) token.task_id = task->id;
  if (hw) token.hardware_id = hw->id;
  static const std::vector<double> kNone;
  token.vector = query_token(params, task ? task->task_features : kNone,
                             hw ? hw->hw_features : kNone);
  return token;
}

double similarity(const ModelToken& theta, const TaskToken& mu,
                  const ScorerParams& params) {
  const double scale = inv_sqrt_d(params);
  double sim = 0.0;
  for (std::size_t h = 0; h < params.q.size(); ++h) {
    const auto qmu = matvec(params.q[h], mu.vector);
    const auto kth = matvec(params.k[h], theta.vector);
    sim += params.head_weights[h] * dot(qmu, kth) * scale;
  }
  return sim;
}

std::vector<double> similarity_batch(const ScorerParams& params,
                                     const TaskToken& mu,
                                     const std::vector<ModelToken>& tokens,
                                     kernels::Exec exec) {
  // Q_h mu is shared across candidates; per-candidate work is independent.
  const double scale = inv_sqrt_d(params);
  std::vector<std::vector<double>> qmu;
  qmu.reserve(params.q.size());
  for (const auto& q : params.q) qmu.push_back(matvec(q, mu.vector));

  std::vector<double> scores(tokens.size(), 0.0);
  const auto score_one = [&](std::size_t i) {
    double sim = 0.0;
    for (std::size_t h = 0; h < params.k.size(); ++h) {
      const auto kth = matvec(params.k[h], tokens[i].vector);
      sim += params.head_weights[h] * dot(qmu[h], kth) * scale;
    }
    return sim;
  };

  if (exec == kernels::Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(tokens.size());
         ++i)
      scores[static_cast<std::size_t>(i)] =
          score_one(static_cast<std::size_t>(i));
  } else {
    for (std::size_t i = 0; i < tokens.size(); ++i) scores[i] = score_one(i);
  }
  return scores;
}

// ---------------------------------------------------------------------------
// Training
// ---------------------------------------------------------------------------

namespace {

ScorerGradients zero_gradients(const ScorerParams& p) {
  ScorerGradients g;
  g.w_model = Mat(p.w_model.rows, p.w_model.cols);
  g.w_task = Mat(p.w_task.rows, p.w_task.cols);
  if (!p.w_hw.empty()) g.w_hw = Mat(p.w_hw.rows, p.w_hw.cols);
  if (!p.w_refine.empty()) g.w_refine = Mat(p.w_refine.rows, p.w_refine.cols);
  for (const auto& q : p.q) g.q.emplace_back(q.rows, q.cols);
  for (const auto& k : p.k) g.k.emplace_back(k.rows, k.cols);
  g.head_weights.assign(p.head_weights.size(), 0.0);
  return g;
}

struct QueryEval {
  std::vector<double> mu;
  std::vector<std::vector<double>> thetas;   // refined when refine features exist
  std::vector<std::vector<double>> qmu;      // per head
  std::vector<double> scores;
};

QueryEval evaluate_query(const ScorerParams& params, const TrainingQuery& query) {
  QueryEval eval;
  eval.mu = query_token(params, query.task_features, query.hw_features);
  for (const auto& q : params.q) eval.qmu.push_back(matvec(q, eval.mu));

  const bool refine =
      !query.refine_features.empty() && !params.w_refine.empty();
  const double scale = inv_sqrt_d(params);
  for (std::size_t j = 0; j < query.candidate_features.size(); ++j) {
    auto theta = project(params.w_model, query.candidate_features[j],
                         "training candidate");
    if (refine)
      axpy(theta, 1.0,
           project(params.w_refine, query.refine_features[j],
                   "refinement features"));
    double sim = 0.0;
    for (std::size_t h = 0; h < params.k.size(); ++h) {
      const auto kth = matvec(params.k[h], theta);
      sim += params.head_weights[h] * dot(eval.qmu[h], kth) * scale;
    }
    eval.scores.push_back(sim);
    eval.thetas.push_back(std::move(theta));
  }
  return eval;
}

void validate_query(const TrainingQuery& query, std::size_t index) {
  const auto fail = [&](const std::string& msg) {
    throw DataError("training query #" + std::to_string(index) + ": " + msg);
  };
  if (query.candidate_ids.size() < 2) fail("needs at least two candidates");
  if (query.candidate_features.size() != query.candidate_ids.size())
    fail("one feature vector per candidate required");
  if (!query.refine_features.empty() &&
      query.refine_features.size() != query.candidate_ids.size())
    fail("refinement features must align with candidates");
  std::vector<std::string> ids = query.candidate_ids;
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> gt = query.ground_truth.candidate_ids;
  std::sort(gt.begin(), gt.end());
  if (ids != gt) fail("ground truth covers a different candidate set");
}

}  // namespace

double ranking_loss(const ScorerParams& params,
                    const std::vector<TrainingQuery>& queries, double margin,
                    ScorerGradients* grads) {
  if (queries.empty()) throw DataError("no training queries");
  if (grads) *grads = zero_gradients(params);

  // Count strict ground-truth pairs first so each contribution is already
  // scaled by 1/N (keeps one pass over the data).
  std::int64_t total_pairs = 0;
  std::vector<std::vector<int>> gt_positions(queries.size());
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    validate_query(queries[qi], qi);
    const auto by_id = position_by_id(queries[qi].ground_truth);
    auto& pos = gt_positions[qi];
    pos.reserve(queries[qi].candidate_ids.size());
    for (const auto& id : queries[qi].candidate_ids) pos.push_back(by_id.at(id));
    for (std::size_t a = 0; a < pos.size(); ++a)
      for (std::size_t b = a + 1; b < pos.size(); ++b)
        if (pos[a] != pos[b]) ++total_pairs;
  }
  if (total_pairs == 0) return 0.0;
  const double inv_n = 1.0 / static_cast<double>(total_pairs);
  const double scale = inv_sqrt_d(params);

  double loss = 0.0;
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const auto& query = queries[qi];
    const auto eval = evaluate_query(params, query);
    const auto& pos = gt_positions[qi];

    // coeff[j] = d(loss)/d(score_j); hinge active when margin not met.
    std::vector<double> coeff(eval.scores.size(), 0.0);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      for (std::size_t b = a + 1; b < pos.size(); ++b) {
        if (pos[a] == pos[b]) continue;
        const std::size_t hi = pos[a] < pos[b] ? a : b;  // ranked above
        const std::size_t lo = hi == a ? b : a;
        const double h = margin - (eval.scores[hi] - eval.scores[lo]);
        if (h > 0.0) {
          loss += h * inv_n;
          coeff[hi] -= inv_n;
          coeff[lo] += inv_n;
        }
      }
    }
    if (!grads) continue;

    const bool refine =
        !query.refine_features.empty() && !params.w_refine.empty();
    std::vector<double> g_mu(eval.mu.size(), 0.0);
    for (std::size_t j = 0; j < eval.scores.size(); ++j) {
      const double c = coeff[j];
      if (c == 0.0) continue;
      std::vector<double> g_theta(eval.thetas[j].size(), 0.0);
      for (std::size_t h = 0; h < params.q.size(); ++h) {
        const auto kth = matvec(params.k[h], eval.thetas[j]);
        const double wh_scale = c * params.head_weights[h] * scale;
        grads->head_weights[h] += c * dot(eval.qmu[h], kth) * scale;
        add_outer(grads->q[h], wh_scale, kth, eval.mu);
        add_outer(grads->k[h], wh_scale, eval.qmu[h], eval.thetas[j]);
        axpy(g_theta, wh_scale, matvec_t(params.k[h], eval.qmu[h]));
        axpy(g_mu, wh_scale, matvec_t(params.q[h], kth));
      }
      add_outer(grads->w_model, 1.0, g_theta, query.candidate_features[j]);
      if (refine)
        add_outer(grads->w_refine, 1.0, g_theta, query.refine_features[j]);
    }

    // Route the query-side gradient through the same path query_token took.
    if (params.kind == ScorerKind::HardwareOnly) {
      add_outer(grads->w_task, 1.0, g_mu, query.hw_features);
    } else if (params.kind == ScorerKind::Fusion &&
               params.fusion_mode == FusionMode::Concat) {
      std::vector<double> joint = query.task_features;
      joint.insert(joint.end(), query.hw_features.begin(),
                   query.hw_features.end());
      joint.resize(params.w_task.cols, 0.0);
      add_outer(grads->w_task, 1.0, g_mu, joint);
    } else {
      add_outer(grads->w_task, 1.0, g_mu, query.task_features);
      if (params.kind == ScorerKind::Fusion && !query.hw_features.empty() &&
          !params.w_hw.empty())
        add_outer(grads->w_hw, 1.0, g_mu, query.hw_features);
    }
  }
  return loss;
}

namespace {

void apply_update(Mat& m, const Mat& g, double lr) {
  for (std::size_t i = 0; i < m.data.size(); ++i) m.data[i] -= lr * g.data[i];
}

double mean_train_tau(const ScorerParams& params,
                      const std::vector<TrainingQuery>& queries) {
  double sum = 0.0;
  int counted = 0;
  for (const auto& query : queries) {
    const auto eval = evaluate_query(params, query);
    std::vector<std::pair<std::string, double>> scored;
    for (std::size_t j = 0; j < query.candidate_ids.size(); ++j)
      scored.emplace_back(query.candidate_ids[j], eval.scores[j]);
    const auto table = make_ranking_table(std::move(scored), "fusion");
    const double tau = kendall_tau(table, query.ground_truth);
    if (std::isfinite(tau)) {
      sum += tau;
      ++counted;
    }
  }
  return counted > 0 ? sum / counted : 0.0;
}

}  // namespace

TrainResult train_scorer(const std::vector<TrainingQuery>& train_set,
                         const TrainHyper& hyper, ScorerKind kind,
                         FusionMode mode) {
  if (train_set.empty()) throw DataError("empty training set");
  if (hyper.lr <= 0.0) throw DataError("learning rate must be positive");
  if (hyper.epochs < 0) throw DataError("epochs must be >= 0");

  const auto& first = train_set.front();
  validate_query(first, 0);
  ScorerDims dims;
  dims.token_dim = hyper.token_dim;
  dims.heads = hyper.heads;
  dims.model_features = static_cast<int>(first.candidate_features.front().size());
  dims.refine_features =
      first.refine_features.empty()
          ? 0
          : static_cast<int>(first.refine_features.front().size());
  switch (kind) {
    case ScorerKind::HardwareOnly:
      dims.task_features = static_cast<int>(first.hw_features.size());
      break;
    case ScorerKind::TaskOnly:
      dims.task_features = static_cast<int>(first.task_features.size());
      break;
    case ScorerKind::Fusion:
      if (mode == FusionMode::Concat) {
        dims.task_features = static_cast<int>(first.task_features.size() +
                                              first.hw_features.size());
      } else {
        dims.task_features = static_cast<int>(first.task_features.size());
        dims.hw_features = static_cast<int>(first.hw_features.size());
      }
      break;
  }

  TrainResult result;
  result.params = init_scorer(kind, mode, dims, hyper.seed);

  const auto diverged = [&](int epoch) {
    return DataError("training diverged at epoch " + std::to_string(epoch) +
                     " (lr=" + std::to_string(hyper.lr) + ")");
  };
  const auto record = [&](int epoch, double loss) {
    // A blow-up can surface either as a non-finite loss or as non-finite
    // similarity scores inside the tau computation (the hinge can stay
    // finite while the scores overflow).
    if (!std::isfinite(loss)) throw diverged(epoch);
    try {
      result.log.push_back(
          {epoch, loss, mean_train_tau(result.params, train_set)});
    } catch (const DataError&) {
      throw diverged(epoch);
    }
  };

  record(0, ranking_loss(result.params, train_set, hyper.margin, nullptr));
  for (int epoch = 1; epoch <= hyper.epochs; ++epoch) {
    ScorerGradients grads;
    const double loss =
        ranking_loss(result.params, train_set, hyper.margin, &grads);
    if (!std::isfinite(loss)) throw diverged(epoch);
    auto& p = result.params;
    apply_update(p.w_model, grads.w_model, hyper.lr);
    apply_update(p.w_task, grads.w_task, hyper.lr);
    if (!p.w_hw.empty()) apply_update(p.w_hw, grads.w_hw, hyper.lr);
    if (!p.w_refine.empty()) apply_update(p.w_refine, grads.w_refine, hyper.lr);
    for (std::size_t h = 0; h < p.q.size(); ++h) {
      apply_update(p.q[h], grads.q[h], hyper.lr);
      apply_update(p.k[h], grads.k[h], hyper.lr);
      p.head_weights[h] -= hyper.lr * grads.head_weights[h];
    }
    record(epoch, ranking_loss(p, train_set, hyper.margin, nullptr));
  }
  result.params.trained = hyper.epochs > 0;
  return result;
}

// ---------------------------------------------------------------------------
// Recommendation
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<std::size_t>> tie_groups(const std::vector<double>& scores) {
  std::vector<std::vector<std::size_t>> ties;
  std::size_t i = 0;
  while (i < scores.size()) {
    std::size_t j = i + 1;
    while (j < scores.size() && scores[j] == scores[i]) ++j;
    if (j - i > 1) {
      std::vector<std::size_t> group;
      for (std::size_t g = i; g < j; ++g) group.push_back(g);
      ties.push_back(std::move(group));
    }
    i = j;
  }
  return ties;
}

}  // namespace

RecommendResult recommend_fusion(
    const TaskDescriptor& task, const HardwareProfile* hw,
    const std::vector<ModelCard>& candidates, const ScorerParams& params,
    std::optional<int> top_k,
    const std::map<std::string, std::vector<double>>* refine) {
  if (candidates.empty()) throw DataError("no candidates to rank");
  RecommendResult result;
  if (!params.trained)
    result.warnings.push_back("scorer is untrained; scores are random projections");

  const TaskToken mu = extract_task_token(params, &task, hw);
  std::vector<ModelToken> tokens;
  tokens.reserve(candidates.size());
  for (const auto& card : candidates)
    tokens.push_back(extract_model_token(card, params));
  const auto scores = similarity_batch(params, mu, tokens);

  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scored.emplace_back(candidates[i].id, scores[i]);
  RankingTable stage1 = make_ranking_table(std::move(scored), "fusion");

  const bool can_refine = top_k.has_value() && refine && !params.w_refine.empty();
  if (top_k && *top_k < 1) throw DataError("top_k must be >= 1");
  if (!can_refine) {
    if (top_k && refine && params.w_refine.empty())
      result.warnings.push_back(
          "scorer has no refinement projection; returning first-stage order");
    else if (top_k && !refine)
      result.warnings.push_back(
          "no refinement features supplied; returning first-stage order");
    result.table = std::move(stage1);
    return result;
  }

  std::size_t k = static_cast<std::size_t>(*top_k);
  if (k > stage1.candidate_ids.size()) {
    result.warnings.push_back("top_k " + std::to_string(k) + " exceeds the " +
                              std::to_string(stage1.candidate_ids.size()) +
                              " candidates; clamped");
    k = stage1.candidate_ids.size();
  }
  std::unordered_map<std::string, std::size_t> token_index;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    token_index.emplace(tokens[i].model_id, i);

  // Re-score the top-K block with refined tokens; the block stays on top.
  std::vector<std::pair<std::string, double>> block;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& id = stage1.candidate_ids[i];
    ModelToken token = tokens[token_index.at(id)];
    auto feats = refine->find(id);
    if (feats == refine->end()) {
      result.warnings.push_back("no refinement features for '" + id +
                                "'; token kept as-is");
    } else {
      axpy(token.vector, 1.0,
           project(params.w_refine, feats->second, "refinement features"));
    }
    block.emplace_back(id, similarity(token, mu, params));
  }
  std::sort(block.begin(), block.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  // The table contract wants non-increasing scores. If refinement left the
  // block exactly where stage one put it, keep those scores (a zero refine
  // projection reproduces stage one bit for bit); otherwise shift the block
  // uniformly above the rest, preserving its internal order and tie groups.
  RankingTable table;
  table.method = "fusion";
  bool unchanged = true;
  for (std::size_t i = 0; i < k; ++i)
    if (block[i].first != stage1.candidate_ids[i] ||
        block[i].second != stage1.scores[i])
      unchanged = false;
  if (unchanged) {
    table = std::move(stage1);
  } else {
    double shift = 0.0;
    if (k < stage1.candidate_ids.size()) {
      const double rest_max = stage1.scores[k];
      const double block_min = block.back().second;
      if (block_min <= rest_max) shift = rest_max - block_min + 1.0;
    }
    for (const auto& [id, score] : block) {
      table.candidate_ids.push_back(id);
      table.scores.push_back(score + shift);
    }
    for (std::size_t i = k; i < stage1.candidate_ids.size(); ++i) {
      table.candidate_ids.push_back(stage1.candidate_ids[i]);
      table.scores.push_back(stage1.scores[i]);
    }
    table.ties = tie_groups(table.scores);
  }
  result.table = std::move(table);
  return result;
}

// ---------------------------------------------------------------------------
// Feature builders
// ---------------------------------------------------------------------------

namespace {

std::size_t fnv1a_bucket(std::string_view s, int buckets) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h % static_cast<std::uint64_t>(buckets));
}

void append_onehot(std::vector<double>& out, std::string_view value,
                   int buckets) {
  std::vector<double> hot(buckets, 0.0);
  hot[fnv1a_bucket(value, buckets)] = 1.0;
  out.insert(out.end(), hot.begin(), hot.end());
}

}  // namespace

std::vector<double> model_feature_vector(const ModelCard& card,
                                         const FeatureOptions& opts) {
  if (card.param_count <= 0)
    throw DataError("model '" + card.id + "' has no positive param_count");
  std::vector<double> f;
  f.push_back(1.0);
  f.push_back(std::log10(static_cast<double>(card.param_count)) / 8.0);
  append_onehot(f, card.architecture_family, opts.hash_buckets);
  f.insert(f.end(), card.model_features.begin(), card.model_features.end());
  return f;
}

std::vector<double> hardware_feature_vector(const HardwareProfile& hw,
                                            const FeatureOptions& opts) {
  std::vector<double> f;
  f.push_back(1.0);
  f.push_back(std::log2(static_cast<double>(std::max(hw.cpu_cores, 1))) / 4.0);
  f.push_back(std::log2(std::max(hw.cpu_freq_mhz, 1.0)) / 12.0);
  f.push_back(std::log2(std::max(hw.ram_mb, 1.0)) / 14.0);
  f.push_back(std::log2(std::max(hw.storage_mb, 1.0)) / 17.0);
  f.push_back(hw.accelerator ? 1.0 : 0.0);
  append_onehot(f, hw.cpu_model, opts.hash_buckets);
  append_onehot(f, hw.accelerator ? *hw.accelerator : "none", opts.hash_buckets);
  f.insert(f.end(), hw.hw_features.begin(), hw.hw_features.end());
  return f;
}

std::vector<double> task_feature_vector(const TaskDescriptor& task) {
  std::vector<double> f;
  f.push_back(1.0);
  f.push_back(static_cast<double>(task.num_classes) / 10.0);
  f.push_back(std::log10(static_cast<double>(std::max<std::int64_t>(
                  task.num_samples, 1))) /
              5.0);
  for (std::size_t i = 0; i < 3; ++i)
    f.push_back(i < task.input_shape.size()
                    ? static_cast<double>(task.input_shape[i]) / 64.0
                    : 0.0);
  f.insert(f.end(), task.task_features.begin(), task.task_features.end());
  return f;
}

std::vector<double> refinement_features(const MetricMap& aggregates) {
  const auto need = [&](Metric m) {
    auto it = aggregates.find(m);
    if (it == aggregates.end())
      throw DataError(std::string("refinement features need metric ") +
                      metric_name(m));
    return it->second;
  };
  return {need(Metric::ExecutionTimeMs) / 100.0, need(Metric::MemoryMb) / 1024.0,
          need(Metric::PowerW) / 5.0, need(Metric::Accuracy)};
}

void write_training_log_csv(const std::vector<EpochStats>& log,
                            std::ostream& out) {
  out << "epoch,loss,train_tau\n";
  std::ostringstream row;
  row << std::setprecision(17);
  for (const auto& e : log) {
    row.str("");
    row << e.epoch << ',' << e.loss << ',' << e.train_tau << '\n';
    out << row.str();
  }
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

json mat_to_json(const Mat& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Mat mat_from_json(const json& j) {
  Mat m;
  j.at("rows").get_to(m.rows);
  j.at("cols").get_to(m.cols);
  j.at("data").get_to(m.data);
  if (m.data.size() != m.rows * m.cols)
    throw DataError("matrix data does not match its shape");
  return m;
}

}  // namespace

json scorer_to_json(const ScorerParams& p) {
  json heads_q = json::array(), heads_k = json::array();
  for (const auto& q : p.q) heads_q.push_back(mat_to_json(q));
  for (const auto& k : p.k) heads_k.push_back(mat_to_json(k));
  return json{{"format_version", 1},
              {"kind", scorer_kind_name(p.kind)},
              {"fusion_mode", fusion_mode_name(p.fusion_mode)},
              {"dims",
               {{"token_dim", p.dims.token_dim},
                {"heads", p.dims.heads},
                {"model_features", p.dims.model_features},
                {"task_features", p.dims.task_features},
                {"hw_features", p.dims.hw_features},
                {"refine_features", p.dims.refine_features}}},
              {"w_model", mat_to_json(p.w_model)},
              {"w_task", mat_to_json(p.w_task)},
              {"w_hw", p.w_hw.empty() ? json(nullptr) : mat_to_json(p.w_hw)},
              {"q", heads_q},
              {"k", heads_k},
              {"head_weights", p.head_weights},
              {"w_refine",
               p.w_refine.empty() ? json(nullptr) : mat_to_json(p.w_refine)},
              {"trained", p.trained}};
}

ScorerParams scorer_from_json(const json& j) {
  if (!j.contains("format_version") || j.at("format_version").get<int>() != 1)
    throw DataError("unsupported scorer format");
  ScorerParams p;
  const auto kind = parse_scorer_kind(j.at("kind").get<std::string>());
  const auto mode = parse_fusion_mode(j.at("fusion_mode").get<std::string>());
  if (!kind) throw DataError("unknown scorer kind");
  if (!mode) throw DataError("unknown fusion mode");
  p.kind = *kind;
  p.fusion_mode = *mode;
  const auto& d = j.at("dims");
  d.at("token_dim").get_to(p.dims.token_dim);
  d.at("heads").get_to(p.dims.heads);
  d.at("model_features").get_to(p.dims.model_features);
  d.at("task_features").get_to(p.dims.task_features);
  d.at("hw_features").get_to(p.dims.hw_features);
  d.at("refine_features").get_to(p.dims.refine_features);
  p.w_model = mat_from_json(j.at("w_model"));
  p.w_task = mat_from_json(j.at("w_task"));
  if (!j.at("w_hw").is_null()) p.w_hw = mat_from_json(j.at("w_hw"));
  for (const auto& q : j.at("q")) p.q.push_back(mat_from_json(q));
  for (const auto& k : j.at("k")) p.k.push_back(mat_from_json(k));
  j.at("head_weights").get_to(p.head_weights);
  if (!j.at("w_refine").is_null()) p.w_refine = mat_from_json(j.at("w_refine"));
  j.at("trained").get_to(p.trained);
  if (p.q.size() != static_cast<std::size_t>(p.dims.heads) ||
      p.k.size() != p.q.size() ||
      p.head_weights.size() != p.q.size())
    throw DataError("scorer head count mismatch");
  return p;
}

}  // namespace hwrec
