#pragma once

#include "masspart/harness.hpp"

namespace masspart::harness::detail {

/// The instance as the solvers see it: discrete assignments mollified per the
/// config, kinetic families given their smoothing scale.
Instance prepared(const Instance& inst);

/// Unit vector from hyperspherical angles; n == 1 reads cos(angles(0)).
Vec sphere_point(int n, const Vec& angles);

}  // namespace masspart::harness::detail
