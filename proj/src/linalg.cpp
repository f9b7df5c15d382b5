#include "hwrec/linalg.hpp"

#include <cassert>

namespace hwrec {

std::vector<double> matvec(const Mat& a, const std::vector<double>& x) {
  assert(a.cols == x.size());
  std::vector<double> y(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double acc = 0.0;
    const double* row = a.data.data() + i * a.cols;
    for (std::size_t j = 0; j < a.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
  return y;
}

std::vector<double> matvec_t(const Mat& a, const std::vector<double>& x) {
  assert(a.rows == x.size());
  std::vector<double> y(a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = a.data.data() + i * a.cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < a.cols; ++j) y[j] += xi * row[j];
  }
  return y;
}

void add_outer(Mat& a, double scale, const std::vector<double>& u,
               const std::vector<double>& v) {
  assert(a.rows == u.size() && a.cols == v.size());
  for (std::size_t i = 0; i < a.rows; ++i) {
    double* row = a.data.data() + i * a.cols;
    const double su = scale * u[i];
    for (std::size_t j = 0; j < a.cols; ++j) row[j] += su * v[j];
  }
}

void axpy(std::vector<double>& y, double alpha, const std::vector<double>& x) {
  assert(y.size() == x.size());
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  assert(a.size() == b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace hwrec
