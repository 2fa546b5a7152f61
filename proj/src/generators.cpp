#include "revpart/generators.hpp"

#include <Eigen/LU>

#include <cmath>

namespace revpart {

namespace {

CMat diag_complex(const Eigen::VectorXd& v) {
  return v.asDiagonal().toDenseMatrix().cast<Complex>();
}

void require_distribution(const Eigen::VectorXd& v) {
  if (v.size() == 0 || v.minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidParams, "state weights must be positive");
  if (std::abs(v.sum() - 1.0) > 1e-9)
    throw Error(ErrorKind::InvalidParams, "state weights must sum to 1",
                std::abs(v.sum() - 1.0));
}

}  // namespace

Channel SystemSpec::make_channel() const {
  if (!kraus.empty()) return Channel::from_kraus(kraus);
  return Channel::from_superop(superop);
}

Qds make_qds(const SystemSpec& spec) {
  return Qds::validate(spec.make_channel(),
                       SystemState::from_density(spec.rho, spec.tol), spec.tol);
}

SystemSpec gen_dephasing(Eigen::Index d, double p, const Eigen::VectorXd& rho_diag) {
  if (p < 0.0 || p > 1.0)
    throw Error(ErrorKind::InvalidParams, "dephasing weight must lie in [0, 1]", p);
  if (rho_diag.size() != d)
    throw Error(ErrorKind::InvalidParams, "state weights must have length d");
  require_distribution(rho_diag);

  SystemSpec spec;
  spec.dim = d;
  spec.rho = diag_complex(rho_diag);
  if (d == 2) {
    CMat sz(2, 2);
    sz << 1, 0, 0, -1;
    spec.kraus = {std::sqrt((1.0 + p) / 2.0) * CMat::Identity(2, 2),
                  std::sqrt((1.0 - p) / 2.0) * sz};
  } else {
    // Clock phases implement the pinching part for general d.
    spec.kraus.push_back(std::sqrt(p) * CMat::Identity(d, d));
    for (Eigen::Index k = 0; k < d; ++k) {
      CMat z = CMat::Zero(d, d);
      for (Eigen::Index j = 0; j < d; ++j) {
        double angle = 2.0 * M_PI * double(k) * double(j) / double(d);
        z(j, j) = Complex(std::cos(angle), std::sin(angle));
      }
      spec.kraus.push_back(std::sqrt((1.0 - p) / double(d)) * z);
    }
  }
  return spec;
}

SystemSpec gen_unitary(Eigen::Index d, const Eigen::VectorXd& phases,
                       const Eigen::VectorXd& rho_diag) {
  Eigen::VectorXd theta = phases;
  if (theta.size() == 1 && d == 2) {
    theta.resize(2);
    theta << 0.0, phases(0);
  }
  if (theta.size() != d)
    throw Error(ErrorKind::InvalidParams, "need one phase per dimension");
  if (rho_diag.size() != d)
    throw Error(ErrorKind::InvalidParams, "state weights must have length d");
  require_distribution(rho_diag);

  SystemSpec spec;
  spec.dim = d;
  spec.rho = diag_complex(rho_diag);
  CMat u = CMat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    u(j, j) = Complex(std::cos(theta(j)), std::sin(theta(j)));
  spec.kraus = {u};
  return spec;
}

Eigen::VectorXd stationary_law(const Eigen::MatrixXd& p) {
  Eigen::Index d = p.rows();
  Eigen::MatrixXd m = p.transpose() - Eigen::MatrixXd::Identity(d, d);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(1e-10);
  Eigen::MatrixXd kernel = lu.kernel();
  if (kernel.cols() != 1)
    throw Error(ErrorKind::InvalidParams,
                "chain does not have a unique stationary law",
                double(kernel.cols()));
  Eigen::VectorXd pi = kernel.col(0);
  pi /= pi.sum();
  if (pi.minCoeff() <= 0.0)
    throw Error(ErrorKind::InvalidParams,
                "stationary law is not strictly positive");
  return pi;
}

SystemSpec gen_classical(const Eigen::MatrixXd& p) {
  Eigen::Index d = p.rows();
  if (p.cols() != d || d < 1)
    throw Error(ErrorKind::InvalidParams, "transition matrix must be square");
  for (Eigen::Index i = 0; i < d; ++i) {
    if (p.row(i).minCoeff() < 0.0)
      throw Error(ErrorKind::InvalidParams, "negative transition probability");
    if (std::abs(p.row(i).sum() - 1.0) > 1e-9)
      throw Error(ErrorKind::InvalidParams, "rows must sum to 1",
                  std::abs(p.row(i).sum() - 1.0));
  }
  Eigen::VectorXd pi = stationary_law(p);

  SystemSpec spec;
  spec.dim = d;
  spec.rho = diag_complex(pi);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (p(i, j) > 0.0) {
        CMat k = CMat::Zero(d, d);
        k(j, i) = std::sqrt(p(i, j));
        spec.kraus.push_back(k);
      }
  return spec;
}

SystemSpec gen_shift_dephase(Eigen::Index d) {
  if (d < 2) throw Error(ErrorKind::InvalidParams, "need dimension at least 2");
  SystemSpec spec;
  spec.dim = d;
  spec.rho = CMat::Identity(d, d) / double(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    CMat k = CMat::Zero(d, d);
    k((i + 1) % d, i) = 1.0;
    spec.kraus.push_back(k);
  }
  return spec;
}

SystemSpec gen_random_covariant(Eigen::Index d, Rng& rng) {
  if (d < 2) throw Error(ErrorKind::InvalidParams, "need dimension at least 2");

  Eigen::VectorXd law = rng.simplex(d, 0.5 / double(d));
  Eigen::VectorXd weights = rng.simplex(3, 0.1);

  std::vector<CMat> kraus;

  // (i) a unitary commuting with rho.
  CMat u = CMat::Zero(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    double angle = rng.uniform(0.0, 2.0 * M_PI);
    u(j, j) = Complex(std::cos(angle), std::sin(angle));
  }
  kraus.push_back(std::sqrt(weights(0)) * u);

  // (ii) dephasing in the eigenbasis of rho.
  Eigen::VectorXd mix = rng.simplex(3, 0.1);
  for (int m = 0; m < 3; ++m) {
    CMat z = CMat::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      double angle = rng.uniform(0.0, 2.0 * M_PI);
      z(j, j) = Complex(std::cos(angle), std::sin(angle));
    }
    kraus.push_back(std::sqrt(weights(1) * mix(m)) * z);
  }

  // (iii) a classical channel with the matching stationary law: Metropolis
  // over a uniform proposal, mixed toward the rank-one chain for a uniform
  // spectral-gap floor.
  Eigen::MatrixXd walk = Eigen::MatrixXd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    double off = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (i == j) continue;
      walk(i, j) = (1.0 / double(d)) * std::min(1.0, law(j) / law(i));
      off += walk(i, j);
    }
    walk(i, i) = 1.0 - off;
  }
  Eigen::MatrixXd chain = 0.8 * walk;
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) chain(i, j) += 0.2 * law(j);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      CMat k = CMat::Zero(d, d);
      k(j, i) = std::sqrt(weights(2) * chain(i, j));
      kraus.push_back(k);
    }

  SystemSpec spec;
  spec.dim = d;
  spec.rho = diag_complex(law);
  spec.kraus = std::move(kraus);
  return spec;
}

std::vector<std::pair<std::string, SystemSpec>> canonical_fixtures() {
  std::vector<std::pair<std::string, SystemSpec>> out;

  Eigen::VectorXd rho2(2);
  rho2 << 0.6, 0.4;
  out.emplace_back("dephasing", gen_dephasing(2, 0.5, rho2));

  Eigen::VectorXd phases(2);
  phases << 0.0, 1.0;
  out.emplace_back("unitary", gen_unitary(2, phases, rho2));

  Eigen::MatrixXd p(2, 2);
  p << 0.9, 0.1, 0.3, 0.7;
  out.emplace_back("classical", gen_classical(p));

  out.emplace_back("shift_dephase", gen_shift_dephase(3));

  Rng rng(7);
  out.emplace_back("random_covariant", gen_random_covariant(3, rng));
  return out;
}

}  // namespace revpart
