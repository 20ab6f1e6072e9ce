#include "cld/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace cld {

std::size_t Grid::point_count() const {
  std::size_t n = 1;
  for (std::size_t e : extents) n *= e;
  return n;
}

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : spacings) v *= h;
  return v;
}

double Grid::spatial_cell_volume() const {
  double v = 1.0;
  for (int j = 0; j < spatial_dims; ++j) v *= spacings[static_cast<std::size_t>(spatial_axis(j))];
  return v;
}

std::size_t Grid::stride(int a) const {
  std::size_t s = 1;
  for (int b = axis_count() - 1; b > a; --b) s *= extents[static_cast<std::size_t>(b)];
  return s;
}

std::size_t Grid::flatten(std::span<const std::size_t> idx) const {
  std::size_t flat = 0;
  for (int a = 0; a < axis_count(); ++a) flat = flat * extents[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)];
  return flat;
}

void Grid::unflatten(std::size_t flat, std::span<std::size_t> idx) const {
  for (int a = axis_count() - 1; a >= 0; --a) {
    const std::size_t e = extents[static_cast<std::size_t>(a)];
    idx[static_cast<std::size_t>(a)] = flat % e;
    flat /= e;
  }
}

bool Grid::any_bounded_spatial() const {
  for (int j = 0; j < spatial_dims; ++j)
    if (!periodic[static_cast<std::size_t>(spatial_axis(j))]) return true;
  return false;
}

bool Grid::compatible_with(const Grid& other) const {
  return spatial_dims == other.spatial_dims && has_time == other.has_time &&
         extents == other.extents && spacings == other.spacings && periodic == other.periodic;
}

Grid make_grid(int spatial_dims, std::vector<std::size_t> extents,
               std::vector<double> spacings, std::vector<std::uint8_t> periodic,
               bool with_time) {
  if (spatial_dims < 1 || spatial_dims > 3)
    throw error("make_grid: spatial_dims must be 1, 2 or 3 (got " + std::to_string(spatial_dims) + ")");
  const std::size_t axes = static_cast<std::size_t>(spatial_dims) + (with_time ? 1u : 0u);
  if (extents.size() != axes || spacings.size() != axes || periodic.size() != axes)
    throw error("make_grid: extents/spacings/periodic must each have one entry per axis");
  for (std::size_t a = 0; a < axes; ++a) {
    if (extents[a] < 2) throw error("make_grid: every axis needs extent >= 2");
    if (!(spacings[a] > 0.0) || !std::isfinite(spacings[a]))
      throw error("make_grid: spacings must be positive and finite");
  }
  if (with_time && periodic[0]) throw error("make_grid: the time axis cannot be periodic");
  Grid g;
  g.spatial_dims = spatial_dims;
  g.has_time = with_time;
  g.extents = std::move(extents);
  g.spacings = std::move(spacings);
  g.periodic = std::move(periodic);
  return g;
}

bool IndexBox::empty() const {
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (hi[a] <= lo[a]) return true;
  return lo.empty();
}

std::size_t IndexBox::count() const {
  if (empty()) return 0;
  std::size_t n = 1;
  for (std::size_t a = 0; a < lo.size(); ++a) n *= hi[a] - lo[a];
  return n;
}

bool IndexBox::contains(std::span<const std::size_t> idx) const {
  for (std::size_t a = 0; a < lo.size(); ++a)
    if (idx[a] < lo[a] || idx[a] >= hi[a]) return false;
  return true;
}

IndexBox full_box(const Grid& g) {
  IndexBox b;
  b.lo.assign(static_cast<std::size_t>(g.axis_count()), 0);
  b.hi = g.extents;
  return b;
}

IndexBox margin_box(const Grid& g, double margin) {
  IndexBox b = full_box(g);
  if (margin <= 0.0) return b;
  for (int a = 0; a < g.axis_count(); ++a) {
    const std::size_t ua = static_cast<std::size_t>(a);
    if (g.periodic[ua]) continue;
    // cell-centered: coord >= margin  <=>  i >= margin/h - 1/2
    const double h = g.spacings[ua];
    const auto cut = static_cast<std::size_t>(std::max(0.0, std::ceil(margin / h - 0.5)));
    if (2 * cut >= g.extents[ua])
      throw error("margin_box: margin leaves no points on a bounded axis");
    b.lo[ua] = cut;
    b.hi[ua] = g.extents[ua] - cut;
  }
  return b;
}

IndexBox fraction_box(const Grid& g, std::span<const double> lo_frac,
                      std::span<const double> hi_frac) {
  const auto axes = static_cast<std::size_t>(g.axis_count());
  if (lo_frac.size() != axes || hi_frac.size() != axes)
    throw error("fraction_box: need one fraction pair per axis");
  IndexBox b;
  b.lo.resize(axes);
  b.hi.resize(axes);
  for (std::size_t a = 0; a < axes; ++a) {
    if (!(lo_frac[a] < hi_frac[a]) || lo_frac[a] < 0.0 || hi_frac[a] > 1.0)
      throw error("fraction_box: fractions must satisfy 0 <= lo < hi <= 1");
    const double L = g.axis_length(static_cast<int>(a));
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < g.extents[a]; ++i) {
      const double c = g.coord(static_cast<int>(a), i);
      if (c < lo_frac[a] * L) lo = i + 1;
      if (c < hi_frac[a] * L) hi = i + 1;
    }
    b.lo[a] = lo;
    b.hi[a] = hi;
  }
  if (b.empty()) throw error("fraction_box: empty region");
  return b;
}

IndexBox intersect(const IndexBox& a, const IndexBox& b) {
  if (a.lo.size() != b.lo.size()) throw error("intersect: mismatched box ranks");
  IndexBox r;
  r.lo.resize(a.lo.size());
  r.hi.resize(a.lo.size());
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    r.lo[i] = std::max(a.lo[i], b.lo[i]);
    r.hi[i] = std::min(a.hi[i], b.hi[i]);
  }
  if (r.empty()) throw error("intersect: empty region");
  return r;
}

BoxIndexer::BoxIndexer(const Grid& g, const IndexBox& b) {
  const auto axes = static_cast<std::size_t>(g.axis_count());
  if (b.lo.size() != axes) throw error("BoxIndexer: box rank does not match grid");
  if (b.empty()) throw error("BoxIndexer: empty region");
  dims.resize(axes);
  strides.resize(axes);
  lo = b.lo;
  total = 1;
  for (std::size_t a = 0; a < axes; ++a) {
    if (b.hi[a] > g.extents[a]) throw error("BoxIndexer: box exceeds grid");
    dims[a] = b.hi[a] - b.lo[a];
    strides[a] = g.stride(static_cast<int>(a));
    total *= dims[a];
  }
}

void BoxIndexer::at(std::size_t r, std::span<std::size_t> idx) const {
  for (std::size_t a = dims.size(); a-- > 0;) {
    idx[a] = lo[a] + r % dims[a];
    r /= dims[a];
  }
}

std::size_t BoxIndexer::flat_at(std::size_t r) const {
  std::size_t flat = 0;
  for (std::size_t a = dims.size(); a-- > 0;) {
    flat += (lo[a] + r % dims[a]) * strides[a];
    r /= dims[a];
  }
  return flat;
}

double BoundaryGeometry::distance(std::span<const std::size_t> idx) const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < bounded_spatial.size(); ++b)
    d = std::min(d, axis_distance[b][idx[static_cast<std::size_t>(bounded_spatial[b])]]);
  return d;
}

int BoundaryGeometry::nearest_axis(std::span<const std::size_t> idx) const {
  double best = std::numeric_limits<double>::infinity();
  int axis = bounded_spatial.front();
  for (std::size_t b = 0; b < bounded_spatial.size(); ++b) {
    const double d = axis_distance[b][idx[static_cast<std::size_t>(bounded_spatial[b])]];
    if (d < best) {  // strict: ties keep the smallest axis index
      best = d;
      axis = bounded_spatial[b];
    }
  }
  return axis;
}

void BoundaryGeometry::normal(std::span<const std::size_t> idx, std::span<double> n_out) const {
  for (int j = 0; j < grid.spatial_dims; ++j) n_out[static_cast<std::size_t>(j)] = 0.0;
  const int axis = nearest_axis(idx);
  std::size_t b = 0;
  while (bounded_spatial[b] != axis) ++b;
  const int side = axis_side[b][idx[static_cast<std::size_t>(axis)]];
  const int j = grid.has_time ? axis - 1 : axis;
  n_out[static_cast<std::size_t>(j)] = static_cast<double>(side);
}

void BoundaryGeometry::sigma(std::span<const std::size_t> idx, std::span<double> x_out) const {
  for (int j = 0; j < grid.spatial_dims; ++j) {
    const int a = grid.spatial_axis(j);
    x_out[static_cast<std::size_t>(j)] = grid.coord(a, idx[static_cast<std::size_t>(a)]);
  }
  const int axis = nearest_axis(idx);
  std::size_t b = 0;
  while (bounded_spatial[b] != axis) ++b;
  const int side = axis_side[b][idx[static_cast<std::size_t>(axis)]];
  const int j = grid.has_time ? axis - 1 : axis;
  x_out[static_cast<std::size_t>(j)] = side < 0 ? 0.0 : grid.axis_length(axis);
}

BoundaryGeometry boundary_geometry(const Grid& g) {
  BoundaryGeometry bg;
  bg.grid = g;
  for (int j = 0; j < g.spatial_dims; ++j) {
    const int a = g.spatial_axis(j);
    if (g.periodic[static_cast<std::size_t>(a)]) continue;
    bg.bounded_spatial.push_back(a);
    const std::size_t e = g.extents[static_cast<std::size_t>(a)];
    const double L = g.axis_length(a);
    std::vector<double> dist(e);
    std::vector<int> side(e);
    for (std::size_t i = 0; i < e; ++i) {
      const double c = g.coord(a, i);
      const double dlo = c, dhi = L - c;
      dist[i] = std::min(dlo, dhi);
      side[i] = dlo <= dhi ? -1 : +1;
    }
    bg.axis_distance.push_back(std::move(dist));
    bg.axis_side.push_back(std::move(side));
  }
  if (bg.bounded_spatial.empty())
    throw error("boundary_geometry: grid has no bounded spatial axis");
  return bg;
}

double epsilon0(const Grid& g) {
  double e0 = std::numeric_limits<double>::infinity();
  bool any = false;
  for (int j = 0; j < g.spatial_dims; ++j) {
    const int a = g.spatial_axis(j);
    if (g.periodic[static_cast<std::size_t>(a)]) continue;
    any = true;
    e0 = std::min(e0, 0.5 * g.axis_length(a));
  }
  if (!any) throw error("epsilon0: grid has no bounded spatial axis");
  return e0;
}

std::string axis_label(const Grid& g, int a) {
  if (g.axis_is_time(a)) return "t";
  const int j = a - (g.has_time ? 1 : 0);
  static const char* const xyz[3] = {"x", "y", "z"};
  if (g.spatial_dims <= 3) return xyz[j];
  return "x" + std::to_string(j + 1);
}

} // namespace cld
