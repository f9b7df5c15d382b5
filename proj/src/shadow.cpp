#include "hwrec/shadow.hpp"

#include "hwrec/errors.hpp"
#include "hwrec/ranking.hpp"

namespace hwrec {

const char* selector_kind_name(SelectorKind k) {
  switch (k) {
    case SelectorKind::Task: return "task";
    case SelectorKind::Hardware: return "hardware";
    case SelectorKind::Energy: return "energy";
    case SelectorKind::Cost: return "cost";
  }
  return "?";
}

std::optional<SelectorKind> parse_selector_kind(std::string_view s) {
  if (s == "task") return SelectorKind::Task;
  if (s == "hardware") return SelectorKind::Hardware;
  if (s == "energy") return SelectorKind::Energy;
  if (s == "cost") return SelectorKind::Cost;
  return std::nullopt;
}

namespace {

RankingTable score_candidates(const TaskToken& mu,
                              const std::vector<ModelCard>& candidates,
                              const ScorerParams& params, std::string method) {
  if (candidates.empty()) throw DataError("no candidates to rank");
  std::vector<ModelToken> tokens;
  tokens.reserve(candidates.size());
  for (const auto& card : candidates)
    tokens.push_back(extract_model_token(card, params));
  const auto scores = similarity_batch(params, mu, tokens);
  std::vector<std::pair<std::string, double>> scored;
  for (std::size_t i = 0; i < candidates.size(); ++i)
    scored.emplace_back(candidates[i].id, scores[i]);
  return make_ranking_table(std::move(scored), std::move(method));
}

}  // namespace

SelectorOutput task_selector(const TaskDescriptor& task,
                             const std::vector<ModelCard>& candidates,
                             const ScorerParams& params) {
  if (params.kind == ScorerKind::HardwareOnly)
    throw DataError("task selector cannot use a hardware-only scorer");
  // No hardware profile: any hardware contribution to the query is ablated.
  const TaskToken mu = extract_task_token(params, &task, nullptr);
  return {SelectorKind::Task,
          score_candidates(mu, candidates, params, "task_selector")};
}

SelectorOutput hardware_selector(const HardwareProfile& hw,
                                 const std::vector<ModelCard>& candidates,
                                 const ScorerParams& params) {
  if (params.kind != ScorerKind::HardwareOnly)
    throw DataError("hardware selector needs a hardware-only scorer");
  const TaskToken mu = extract_task_token(params, nullptr, &hw);
  return {SelectorKind::Hardware,
          score_candidates(mu, candidates, params, "hardware_selector")};
}

RankingTable combine_selectors(const std::vector<SelectorOutput>& outputs,
                               const std::map<SelectorKind, double>* weights) {
  if (outputs.empty()) throw DataError("no selector outputs to combine");
  std::vector<RankingTable> tables;
  std::vector<double> w;
  tables.reserve(outputs.size());
  double sum = 0.0;
  for (const auto& out : outputs) {
    tables.push_back(out.table);
    double weight = 1.0;
    if (weights) {
      auto it = weights->find(out.selector);
      if (it == weights->end())
        throw DataError(std::string("no weight for selector ") +
                        selector_kind_name(out.selector));
      if (it->second < 0.0)
        throw DataError(std::string("negative weight for selector ") +
                        selector_kind_name(out.selector));
      weight = it->second;
    }
    w.push_back(weight);
    sum += weight;
  }
  if (sum <= 0.0) throw DataError("selector weights sum to zero");
  for (auto& x : w) x /= sum;
  return weighted_copeland_tables(tables, w, "shadow");
}

}  // namespace hwrec
