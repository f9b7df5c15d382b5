#pragma once

#include <cstddef>
#include <vector>

namespace hwrec {

// Dense row-major matrix. Sizes here are tiny (token dims), so this stays
// deliberately minimal instead of pulling in a linear algebra library.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool empty() const { return data.empty(); }
};

std::vector<double> matvec(const Mat& a, const std::vector<double>& x);
// y = A^T x
std::vector<double> matvec_t(const Mat& a, const std::vector<double>& x);
// A += scale * u v^T
void add_outer(Mat& a, double scale, const std::vector<double>& u,
               const std::vector<double>& v);
void axpy(std::vector<double>& y, double alpha, const std::vector<double>& x);
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hwrec
