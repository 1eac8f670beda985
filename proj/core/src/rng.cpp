#include "qre/rng.hpp"

#include <cmath>
#include <numbers>

#include "qre/errors.hpp"

namespace qre {

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = std::max(uniform01(), 0x1.0p-53);
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Eigen::VectorXd Rng::normal_vector(int length) {
  Eigen::VectorXd v(length);
  for (int i = 0; i < length; ++i) v(i) = normal();
  return v;
}

int Rng::categorical(const Eigen::VectorXd& weights) {
  const double total = weights.sum();
  if (!(total > 0.0)) throw Error("categorical: weights sum to zero");
  double u = uniform01() * total;
  for (int i = 0; i < weights.size(); ++i) {
    u -= weights(i);
    if (u < 0.0) return i;
  }
  return static_cast<int>(weights.size()) - 1;
}

}  // namespace qre
