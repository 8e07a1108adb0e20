#pragma once

#include <cstddef>
#include <optional>

#include "pbd/trajectory.hpp"

namespace pbd::metrics {

struct SmoothnessReport {
  double mean_jerk = 0.0;  // m/s^3
  double deviation = 0.0;  // m
  double variation = 0.0;  // m^2
};

/// Mean norm of the third finite difference of position on the uniform grid.
/// Needs at least 4 waypoints (TooShort) spaced evenly (NonUniform).
double mean_jerk(const Trajectory& traj);

/// Mean perpendicular distance of waypoints from the start-to-end chord.
/// With coincident endpoints this is the mean distance from the start point.
double deviation(const Trajectory& traj);

/// Sum of squared displacements between consecutive waypoints.
double variation(const Trajectory& traj);

/// Mean squared position distance after phase-resampling both to n points.
double mse(const Trajectory& a, const Trajectory& b, std::size_t n = 1000);

SmoothnessReport smoothness(const Trajectory& traj);

}  // namespace pbd::metrics
