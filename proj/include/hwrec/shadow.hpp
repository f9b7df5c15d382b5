#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hwrec/domain.hpp"
#include "hwrec/fusion.hpp"

namespace hwrec {

// Independent selectors each produce a full ranking; the combiner merges
// them by weighted pairwise voting. Adding a selector (energy, cost, ...)
// means producing one more table, never touching the combine step.
enum class SelectorKind { Task, Hardware, Energy, Cost };

const char* selector_kind_name(SelectorKind k);
std::optional<SelectorKind> parse_selector_kind(std::string_view s);

struct SelectorOutput {
  SelectorKind selector = SelectorKind::Task;
  RankingTable table;
};

// Scores candidates against the task alone; any hardware term in the scorer
// is ablated (zero hardware contribution to the query token).
SelectorOutput task_selector(const TaskDescriptor& task,
                             const std::vector<ModelCard>& candidates,
                             const ScorerParams& params);

// Treats the device as the query: hardware features drive the query token.
// `params` must be a HardwareOnly scorer.
SelectorOutput hardware_selector(const HardwareProfile& hw,
                                 const std::vector<ModelCard>& candidates,
                                 const ScorerParams& params);

// Weighted pairwise-vote merge of the selector tables (method = "shadow").
// Null weights means equal; otherwise every present selector kind must have
// a weight and weights are normalized to sum 1.
RankingTable combine_selectors(const std::vector<SelectorOutput>& outputs,
                               const std::map<SelectorKind, double>* weights = nullptr);

}  // namespace hwrec
