#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cld/errors.hpp"

namespace cld {

/// @file grid.hpp
/// Uniform rectilinear lattices over boxes, with an optional leading time
/// axis and per-axis periodicity, plus the index-box regions every
/// diagnostic integrates over.
///
/// Conventions used throughout the library:
///  * Axis order is [time, x1, ..., xk] when a time axis is present,
///    [x1, ..., xk] otherwise. The time axis is never periodic.
///  * Bounded (non-periodic) axes are cell-centered: point i sits at
///    (i + 1/2) * spacing, so the domain is (0, extent * spacing) and no
///    sample lies on a face. Midpoint Riemann sums are then exact for
///    constants on every axis.
///  * Periodic axes place point i at i * spacing on a circle of
///    circumference extent * spacing.
///  * Storage is row-major over the axis order (last axis fastest).

struct Grid {
  int spatial_dims = 0;                  ///< k, in {1,2,3}
  bool has_time = false;                 ///< leading time axis present?
  std::vector<std::size_t> extents;      ///< per axis, time first
  std::vector<double> spacings;          ///< per axis
  std::vector<std::uint8_t> periodic;    ///< per axis (0/1)

  int axis_count() const { return static_cast<int>(extents.size()); }
  bool axis_is_time(int a) const { return has_time && a == 0; }
  int time_axis() const { return has_time ? 0 : -1; }
  /// Grid axis carrying spatial direction j (j in [0, spatial_dims)).
  int spatial_axis(int j) const { return has_time ? j + 1 : j; }

  std::size_t point_count() const;
  double cell_volume() const;            ///< product of spacings
  double spatial_cell_volume() const;    ///< product of spatial spacings
  double axis_length(int a) const { return static_cast<double>(extents[a]) * spacings[a]; }

  /// Physical coordinate of index i along axis a (see file conventions).
  double coord(int a, std::size_t i) const {
    return periodic[a] ? static_cast<double>(i) * spacings[a]
                       : (static_cast<double>(i) + 0.5) * spacings[a];
  }

  std::size_t stride(int a) const;
  std::size_t flatten(std::span<const std::size_t> idx) const;
  void unflatten(std::size_t flat, std::span<std::size_t> idx) const;

  bool any_bounded_spatial() const;
  bool compatible_with(const Grid& other) const;
};

/// Build and validate a grid. `extents`, `spacings`, `periodic` are per axis,
/// time first when `with_time`; every extent must be >= 2, spacings positive,
/// and the time axis non-periodic.
Grid make_grid(int spatial_dims, std::vector<std::size_t> extents,
               std::vector<double> spacings, std::vector<std::uint8_t> periodic,
               bool with_time);

/// Axis-aligned index region, half-open per axis: lo[a] <= i < hi[a].
/// All integration regions in this library are boxes of this form.
struct IndexBox {
  std::vector<std::size_t> lo, hi;

  bool empty() const;
  std::size_t count() const;
  std::size_t axis_count() const { return lo.size(); }
  std::size_t size(std::size_t a) const { return hi[a] - lo[a]; }
  bool contains(std::span<const std::size_t> idx) const;
};

/// The whole grid as a region.
IndexBox full_box(const Grid& g);
/// Points at physical distance >= margin from every bounded face (periodic
/// axes are kept whole). `margin` <= 0 returns the full box.
IndexBox margin_box(const Grid& g, double margin);
/// Per-axis fractional sub-box: keeps indices whose coordinate lies in
/// [lo_frac * L, hi_frac * L) along each axis.
IndexBox fraction_box(const Grid& g, std::span<const double> lo_frac,
                      std::span<const double> hi_frac);
/// Intersection; throws if the result is empty.
IndexBox intersect(const IndexBox& a, const IndexBox& b);

/// Linear enumeration of a box: maps r in [0, count) to absolute
/// multi-indices and flat grid offsets. Used to parallelize box loops.
struct BoxIndexer {
  explicit BoxIndexer(const Grid& g, const IndexBox& b);

  std::size_t total = 0;
  /// Absolute multi-index of enumeration position r.
  void at(std::size_t r, std::span<std::size_t> idx) const;
  /// Flat grid index of enumeration position r.
  std::size_t flat_at(std::size_t r) const;

  std::vector<std::size_t> dims;     // box extents per axis
  std::vector<std::size_t> lo;       // box origin
  std::vector<std::size_t> strides;  // grid strides per axis
};

/// Distance-to-boundary geometry of the bounded spatial faces of a grid.
/// Composed per axis: d(x) is the minimum over bounded spatial axes of the
/// distance to the nearer face; the projected boundary point sigma(x) and
/// the outward normal live on the axis attaining that minimum (ties broken
/// toward the smallest axis index).
struct BoundaryGeometry {
  Grid grid;
  std::vector<int> bounded_spatial;               // grid axes with faces
  std::vector<std::vector<double>> axis_distance; // per bounded axis, per index
  std::vector<std::vector<int>> axis_side;        // -1 near face 0, +1 near face L

  /// Distance from the grid point to the nearest bounded face. Positive for
  /// every point (cell-centered sampling keeps points off the faces).
  double distance(std::span<const std::size_t> idx) const;
  /// Grid axis attaining the distance (smallest axis index on ties).
  int nearest_axis(std::span<const std::size_t> idx) const;
  /// Outward unit normal at sigma(x), as spatial components (size k).
  void normal(std::span<const std::size_t> idx, std::span<double> n_out) const;
  /// Projection of the point onto the boundary, spatial coordinates (size k).
  void sigma(std::span<const std::size_t> idx, std::span<double> x_out) const;
};

/// Build boundary geometry; throws if the grid has no bounded spatial axis.
BoundaryGeometry boundary_geometry(const Grid& g);

/// Largest admissible boundary-layer scale: half the shortest bounded
/// spatial extent.
double epsilon0(const Grid& g);

/// Short display name of an axis: "t", then "x"/"y"/"z" ("x<j>" past three
/// spatial dimensions). Used in component names and error messages.
std::string axis_label(const Grid& g, int a);

} // namespace cld
