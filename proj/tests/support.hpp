#pragma once

#include <cmath>
#include <complex>

#include "qre/entropy.hpp"
#include "qre/io.hpp"
#include "qre/rng.hpp"

namespace qre::test {

inline const std::complex<double> ii{0.0, 1.0};

inline HermitianMatrix pauli_x() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianMatrix(m);
}

inline HermitianMatrix pauli_y() {
  Eigen::MatrixXcd m(2, 2);
  m << 0, -ii, ii, 0;
  return HermitianMatrix(m);
}

inline HermitianMatrix pauli_z() {
  Eigen::MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianMatrix(m);
}

/// Seeded random Hermitian matrix with independent N(0,1)-scaled entries.
inline HermitianMatrix random_hermitian(int n, Rng& rng) {
  Eigen::MatrixXcd m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      m(r, c) = std::complex<double>(rng.normal(), rng.normal());
    }
  }
  return HermitianMatrix(m);  // constructor symmetrizes
}

/// Qubit constraint set {I, sigma_z} with the given sigma_z estimate.
inline ConstraintSet qubit_z_constraints(double fhat2) {
  return ConstraintSet({HermitianMatrix::identity(2), pauli_z()}, {1.0, fhat2});
}

/// Consistent constraint set from a true state: estimates are exact traces,
/// so the problem is feasible (full rank when rho_true is).
inline ConstraintSet consistent_constraints(const HermitianMatrix& rho_true,
                                            const std::vector<HermitianMatrix>& zs) {
  std::vector<HermitianMatrix> observables;
  std::vector<double> estimates;
  observables.push_back(HermitianMatrix::identity(rho_true.dim()));
  estimates.push_back(1.0);
  for (const auto& z : zs) {
    observables.push_back(z);
    estimates.push_back(frobenius_inner(rho_true, z));
  }
  return ConstraintSet(std::move(observables), std::move(estimates));
}

/// Random feasible instance: full-rank true state plus random observables.
inline ConstraintSet random_instance(int n, int extra_observables, Rng& rng,
                                     std::uint64_t density_seed) {
  const HermitianMatrix rho_true = random_density(n, n, density_seed);
  std::vector<HermitianMatrix> zs;
  for (int i = 0; i < extra_observables; ++i) zs.push_back(random_hermitian(n, rng));
  return consistent_constraints(rho_true, zs);
}

/// Independent oracle for the auxiliary minimum on {I, sigma_z} qubit
/// problems: bisection on the smallest uniform lift that makes the
/// pseudo-state PSD (off-diagonal directions never help on this family).
inline double qubit_mu_oracle(double fhat2) {
  const double d1 = (1.0 + fhat2) / 2.0;
  const double d2 = (1.0 - fhat2) / 2.0;
  double lo = -2.0, hi = 2.0;  // mu is within [-1/sqrt(2), ...] for |fhat2| <= 3
  const double root2 = std::sqrt(2.0);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double lift = mid / root2;
    (std::min(d1, d2) + lift >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Brute-force Bloch-ball minimum of S(rho||tau) over states with
/// tr(rho sigma_z) = fz (pass NaN to leave it free). Grid resolution `steps`
/// per axis.
inline double bloch_grid_entropy_min(const Prior& tau, double fz, int steps) {
  double best = std::numeric_limits<double>::infinity();
  const double h = 2.0 / steps;
  for (int ix = 0; ix <= steps; ++ix) {
    for (int iy = 0; iy <= steps; ++iy) {
      for (int iz = 0; iz <= steps; ++iz) {
        const double x = -1 + ix * h, y = -1 + iy * h;
        double z = -1 + iz * h;
        if (!std::isnan(fz)) {
          if (iz > 0) continue;
          z = fz;
        }
        if (x * x + y * y + z * z > 1.0) continue;
        Eigen::MatrixXcd m(2, 2);
        m << 1.0 + z, x - ii * y, x + ii * y, 1.0 - z;
        const HermitianMatrix rho(0.5 * m);
        if (min_eigenvalue(rho) < 1e-12) continue;
        best = std::min(best, relative_entropy(rho, tau));
      }
    }
  }
  return best;
}

inline double trace_distance(const HermitianMatrix& a, const HermitianMatrix& b) {
  return 0.5 * eig(a - b).values.cwiseAbs().sum();
}

}  // namespace qre::test
