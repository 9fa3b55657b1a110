#pragma once

#include <cstdint>

#include "boxcup/trilinear.hpp"

namespace boxcup {

/// Closed-form 4-volume of the convex hull of the graph of x1*x2*x3 over a
/// labeled box. Throws std::invalid_argument if `labeled` violates the
/// labeling condition.
double vol_hull(const Bounds3& labeled);

/// Volume of the double-McCormick relaxation for `choice`: the hull volume
/// plus a nonnegative excess term that vanishes when a lower bound is zero.
double vol_double_mccormick(const Bounds3& labeled, GroupingChoice choice);

/// vol_double_mccormick - vol_hull.
double excess_volume(const Bounds3& labeled, GroupingChoice choice);

/// Volume of the Euclidean unit ball in dimension d (pi^2/2 for d = 4).
double unit_ball_volume(int d);

/// Radius of the d-ball with volume `vol`.
double idealized_radius(double vol, int d);

/// |idealized_radius(v1) - idealized_radius(v2)|.
double idealized_radial_distance(double v1, double v2, int d);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t hits = 0;
};

/// Rejection-sampling estimate of the volume of an (f, x1, x2, x3) system over
/// the box [a1,b1] x [a2,b2] x [a3,b3] x [a1a2a3, b1b2b3]. `bounds` must be the
/// box the system was built on (for the double-McCormick systems: the labeled
/// box). Samples are drawn in fixed-size chunks with one seed-derived stream
/// per chunk; hit counts add up in chunk order, so the result does not depend
/// on `threads`.
McEstimate mc_volume_estimate(const Bounds3& bounds, const InequalitySystem& system,
                              std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace boxcup
