#include "revpart/rng.hpp"

#include <cmath>

namespace revpart {

double Rng::uniform01() {
  // 53 uniform bits, stable across standard libraries.
  return double(gen_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

int Rng::uniform_int(int lo, int hi) {
  return lo + int(gen_() % std::uint64_t(hi - lo + 1));
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01();
  } while (u1 <= 0.0);
  double u2 = uniform01();
  double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * M_PI * u2);
  have_spare_ = true;
  return r * std::cos(2.0 * M_PI * u2);
}

Complex Rng::cgaussian() {
  double re = gaussian();
  double im = gaussian();
  return Complex(re, im) / std::sqrt(2.0);
}

CMat Rng::gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
  CMat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cgaussian();
  return m;
}

CMat Rng::hermitian(Eigen::Index d) {
  CMat m = gaussian_matrix(d, d);
  return 0.5 * (m + m.adjoint());
}

Eigen::VectorXd Rng::simplex(Eigen::Index n, double floor) {
  Eigen::VectorXd v(n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = -std::log(1.0 - uniform01());
    sum += v(i);
  }
  v /= sum;
  if (floor > 0.0) {
    v = (1.0 - floor * double(n)) * v;
    v.array() += floor;
  }
  return v;
}

CVec Rng::unit_vector(Eigen::Index d) {
  CVec v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = cgaussian();
  return v / v.norm();
}

}  // namespace revpart
