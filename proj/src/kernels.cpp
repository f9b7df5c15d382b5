#include "hwrec/kernels.hpp"

#include <cmath>

namespace hwrec::kernels {

// Each cell (a,b) sums voter weights in voter order, independently of every
// other cell, so the parallel path reproduces the serial one bit for bit.
std::vector<double> pairwise_win_matrix(
    std::size_t n, const std::vector<std::vector<int>>& positions,
    const std::vector<double>& weights, Exec exec) {
  std::vector<double> wins(n * n, 0.0);
  const std::size_t voters = positions.size();
  const auto cell = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t v = 0; v < voters; ++v)
      if (positions[v][a] < positions[v][b]) acc += weights[v];
    return acc;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t cellidx = 0;
         cellidx < static_cast<std::ptrdiff_t>(n * n); ++cellidx) {
      const std::size_t a = static_cast<std::size_t>(cellidx) / n;
      const std::size_t b = static_cast<std::size_t>(cellidx) % n;
      if (a != b) wins[a * n + b] = cell(a, b);
    }
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        if (a != b) wins[a * n + b] = cell(a, b);
  }
  return wins;
}

std::vector<double> copeland_scores(const std::vector<double>& wins,
                                    std::size_t n, double tie_eps, Exec exec) {
  std::vector<double> scores(n, 0.0);
  const auto row_score = [&](std::size_t a) {
    double s = 0.0;
    for (std::size_t b = 0; b < n; ++b) {
      if (b == a) continue;
      const double diff = wins[a * n + b] - wins[b * n + a];
      if (diff > tie_eps)
        s += 1.0;
      else if (diff >= -tie_eps)
        s += 0.5;
    }
    return s;
  };

  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a)
      scores[static_cast<std::size_t>(a)] =
          row_score(static_cast<std::size_t>(a));
  } else {
    for (std::size_t a = 0; a < n; ++a) scores[a] = row_score(a);
  }
  return scores;
}

TauCounts tau_counts(const std::vector<int>& pos_a, const std::vector<int>& pos_b,
                     Exec exec) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pos_a.size());
  TauCounts c;
  c.pairs = static_cast<std::int64_t>(n) * (n - 1) / 2;

  std::int64_t conc = 0, disc = 0, ta = 0, tb = 0;
  // Integer reductions: exact in any order, so the schedules agree.
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static) reduction(+ : conc, disc, ta, tb)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const int da = pos_a[i] - pos_a[j];
        const int db = pos_b[i] - pos_b[j];
        if (da == 0) ++ta;
        if (db == 0) ++tb;
        if (da != 0 && db != 0) {
          if ((da < 0) == (db < 0))
            ++conc;
          else
            ++disc;
        }
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      for (std::ptrdiff_t j = i + 1; j < n; ++j) {
        const int da = pos_a[i] - pos_a[j];
        const int db = pos_b[i] - pos_b[j];
        if (da == 0) ++ta;
        if (db == 0) ++tb;
        if (da != 0 && db != 0) {
          if ((da < 0) == (db < 0))
            ++conc;
          else
            ++disc;
        }
      }
    }
  }
  c.concordant = conc;
  c.discordant = disc;
  c.tied_a = ta;
  c.tied_b = tb;
  return c;
}

double tau_b_from_counts(const TauCounts& c) {
  const double na = static_cast<double>(c.pairs - c.tied_a);
  const double nb = static_cast<double>(c.pairs - c.tied_b);
  if (na <= 0.0 || nb <= 0.0) return std::nan("");
  return static_cast<double>(c.concordant - c.discordant) / std::sqrt(na * nb);
}

}  // namespace hwrec::kernels
