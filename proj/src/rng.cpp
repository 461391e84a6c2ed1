#include "rcthresh/rng.hpp"

#include <cmath>
#include <numbers>

namespace rcthresh {

double RandomSequence::next_normal() {
  if (has_pending_) {
    has_pending_ = false;
    return pending_normal_;
  }
  // Box-Muller on a (0,1] pair; u1 > 0 keeps the log finite.
  const double u1 = next_unit();
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  pending_normal_ = r * std::sin(angle);
  has_pending_ = true;
  return r * std::cos(angle);
}

}  // namespace rcthresh
