#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hwrec::kernels {

// Every kernel has a plain-loop serial path and an OpenMP path. The two are
// bit-identical by construction: parallelism is only ever across independent
// output cells (or integer reductions), never across a floating-point
// accumulation order. Exec::Serial is the reference used by tests and the
// kernel benchmark.
enum class Exec { Serial, Parallel };

// Two tallies closer than this are a pairwise tie. Shared by the Copeland
// scoring and anything that wants to reproduce it.
inline constexpr double kPairwiseTieEps = 1e-9;

// Accumulated voter weight for "row candidate ranked strictly above column
// candidate". positions[v][i] is candidate i's rank position under voter v,
// ties sharing a position. Result is a row-major n*n matrix with zero
// diagonal.
std::vector<double> pairwise_win_matrix(
    std::size_t n, const std::vector<std::vector<int>>& positions,
    const std::vector<double>& weights, Exec exec = Exec::Parallel);

// Copeland score per candidate: one point per pairwise win, half per
// pairwise tie (|wins[a][b] - wins[b][a]| <= tie_eps).
std::vector<double> copeland_scores(const std::vector<double>& wins,
                                    std::size_t n,
                                    double tie_eps = kPairwiseTieEps,
                                    Exec exec = Exec::Parallel);

struct TauCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied_a = 0;  // pairs tied under a (regardless of b)
  std::int64_t tied_b = 0;  // pairs tied under b (regardless of a)
  std::int64_t pairs = 0;
};

// Pair classification for Kendall tau-b over two position vectors.
TauCounts tau_counts(const std::vector<int>& pos_a,
                     const std::vector<int>& pos_b,
                     Exec exec = Exec::Parallel);

double tau_b_from_counts(const TauCounts& c);

}  // namespace hwrec::kernels
