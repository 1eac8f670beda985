#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace qre {

/// Seeded random stream with platform-independent output: mt19937_64 is
/// bit-specified by the standard and the distributions are hand-rolled
/// (std:: distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1).
  double uniform01();

  /// Standard normal via Box-Muller.
  double normal();

  Eigen::VectorXd normal_vector(int length);

  /// Index sampled from the given nonnegative weights (need not sum to 1).
  int categorical(const Eigen::VectorXd& weights);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qre
