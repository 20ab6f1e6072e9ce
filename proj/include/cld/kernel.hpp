#pragma once
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cld/grid.hpp"

namespace cld {

constexpr int max_axes = 4; // up to 3 spatial + time

/// Discrete radial mollifier bound to a grid: the C^2 bump
/// (1 - (|s|/eps)^2)^3 sampled on lattice offsets with |s| < eps along the
/// selected axes, renormalized to exact unit mass. `weights` include the
/// cell measure, so a convolution is a plain weighted sum. `dweights[a]`
/// holds the analytic kernel-derivative stencil along axis a, renormalized
/// so affine fields differentiate exactly (first-moment correction).
struct Kernel {
  double epsilon = 0.0;
  std::string profile = "c2-bump";
  std::vector<std::uint8_t> axes;                  // per grid axis: smoothed?
  std::vector<double> spacings;                    // per grid axis (copied from grid)
  std::vector<std::array<int, max_axes>> offsets;  // per tap
  std::vector<double> weights;                     // per tap, sums to 1
  std::vector<std::vector<double>> dweights;       // per axis, per tap (empty if unsmoothed)
  std::vector<int> radius;                         // per axis, max |offset|

  /// Sum of weights * s_axis^2 — the discrete second moment m2 along an axis.
  double second_moment(int axis) const;
  int tap_count() const { return static_cast<int>(offsets.size()); }
};

/// Build the kernel on `grid` at scale `epsilon`, smoothing along the axes
/// with a nonzero mask entry (empty mask = all axes). Requires
/// epsilon >= 2 * max spacing on the smoothed axes and, on periodic axes,
/// a support diameter smaller than the period.
Kernel mollifier_kernel(const Grid& grid, double epsilon,
                        std::span<const std::uint8_t> axes_mask = {});

/// Convenience mask: smooth spatial axes only (time left untouched).
std::vector<std::uint8_t> spatial_axes_mask(const Grid& grid);

} // namespace cld
