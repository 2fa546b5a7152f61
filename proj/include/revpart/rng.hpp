#pragma once

#include "revpart/numerics.hpp"

#include <cstdint>
#include <random>

namespace revpart {

// Deterministic random source. Gaussians are produced by Box-Muller over raw
// mt19937_64 bits so that streams are identical across standard libraries;
// std::normal_distribution is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  double uniform01();                      // [0, 1)
  double uniform(double lo, double hi);
  int uniform_int(int lo, int hi);         // inclusive
  double gaussian();
  Complex cgaussian();                     // standard complex gaussian

  CMat gaussian_matrix(Eigen::Index rows, Eigen::Index cols);
  CMat hermitian(Eigen::Index d);
  Eigen::VectorXd simplex(Eigen::Index n, double floor = 0.0);  // sums to 1
  CVec unit_vector(Eigen::Index d);

 private:
  std::mt19937_64 gen_;
  std::uint64_t seed_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace revpart
