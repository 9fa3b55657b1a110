#include "boxcup/volume.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxcup/parallel.hpp"
#include "boxcup/rng.hpp"

namespace boxcup {

namespace {

void require_labeled(const Bounds3& labeled) {
  if (!satisfies_omega(labeled)) {
    throw std::invalid_argument("volume formulas need bounds satisfying the labeling condition");
  }
}

}  // namespace

double vol_hull(const Bounds3& x) {
  require_labeled(x);
  const double a1 = x.lower(0), a2 = x.lower(1), a3 = x.lower(2);
  const double b1 = x.upper(0), b2 = x.upper(1), b3 = x.upper(2);
  return (b1 - a1) * (b2 - a2) * (b3 - a3) *
         (b1 * (5 * b2 * b3 - a2 * b3 - b2 * a3 - 3 * a2 * a3) +
          a1 * (5 * a2 * a3 - b2 * a3 - a2 * b3 - 3 * b2 * b3)) /
         24.0;
}

double excess_volume(const Bounds3& x, GroupingChoice choice) {
  require_labeled(x);
  const double a1 = x.lower(0), a2 = x.lower(1), a3 = x.lower(2);
  const double b1 = x.upper(0), b2 = x.upper(1), b3 = x.upper(2);
  const double common = (b1 - a1) * (b2 - a2) * (b2 - a2) * (b3 - a3) * (b3 - a3);
  switch (choice.system_index()) {
    case 1:
      return common *
             (3 * (b1 * b2 * a3 - a1 * b2 * a3 + b1 * a2 * b3 - a1 * a2 * b3) +
              2 * (a1 * b2 * b3 - b1 * a2 * a3)) /
             (24 * (b2 * b3 - a2 * a3));
    case 2:
      return common * (5 * (a1 * b1 * b3 - a1 * b1 * a3) + 3 * (b1 * b1 * a3 - a1 * a1 * b3)) /
             (24 * (b1 * b3 - a1 * a3));
    default:
      return common * (5 * (a1 * b1 * b2 - a1 * b1 * a2) + 3 * (b1 * b1 * a2 - a1 * a1 * b2)) /
             (24 * (b1 * b2 - a1 * a2));
  }
}

double vol_double_mccormick(const Bounds3& labeled, GroupingChoice choice) {
  return vol_hull(labeled) + excess_volume(labeled, choice);
}

double unit_ball_volume(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (d == 4) return std::numbers::pi * std::numbers::pi / 2.0;
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

double idealized_radius(double vol, int d) {
  if (vol < 0.0) throw std::invalid_argument("volume must be nonnegative");
  return std::pow(vol / unit_ball_volume(d), 1.0 / d);
}

double idealized_radial_distance(double v1, double v2, int d) {
  return std::abs(idealized_radius(v1, d) - idealized_radius(v2, d));
}

McEstimate mc_volume_estimate(const Bounds3& bounds, const InequalitySystem& system,
                              std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples == 0) throw std::invalid_argument("need at least one sample");
  const double f_lo = bounds.lower(0) * bounds.lower(1) * bounds.lower(2);
  const double f_hi = bounds.upper(0) * bounds.upper(1) * bounds.upper(2);
  const double box = (bounds.upper(0) - bounds.lower(0)) * (bounds.upper(1) - bounds.lower(1)) *
                     (bounds.upper(2) - bounds.lower(2)) * (f_hi - f_lo);
  if (!(box > 0.0)) throw std::invalid_argument("sampling box has zero volume");

  const MembershipTester tester(system);
  constexpr std::uint64_t kChunk = 1 << 16;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);

  parallel_ranges(chunks, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      Rng rng(derive_seed(seed, "mc/" + std::to_string(c)));
      const std::uint64_t n = std::min(kChunk, samples - c * kChunk);
      std::uint64_t count = 0;
      std::array<double, 4> p{};
      for (std::uint64_t s = 0; s < n; ++s) {
        p[1] = bounds.lower(0) + uniform01(rng) * (bounds.upper(0) - bounds.lower(0));
        p[2] = bounds.lower(1) + uniform01(rng) * (bounds.upper(1) - bounds.lower(1));
        p[3] = bounds.lower(2) + uniform01(rng) * (bounds.upper(2) - bounds.lower(2));
        p[0] = f_lo + uniform01(rng) * (f_hi - f_lo);
        if (tester.contains(p, 0.0)) ++count;
      }
      hits[c] = count;
    }
  });

  McEstimate out;
  out.samples = samples;
  out.seed = seed;
  for (auto h : hits) out.hits += h;
  const double p = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.estimate = p * box;
  out.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(samples)) * box;
  return out;
}

}  // namespace boxcup
