#include "cld/reference.hpp"

#include <cmath>
#include <vector>

#include "cld/mollify.hpp"

namespace cld::ref {

namespace {

// Row-major strides of the full grid (last axis fastest).
std::vector<std::size_t> grid_strides(const Grid& g) {
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  std::vector<std::size_t> st(na, 1);
  for (std::size_t a = na - 1; a > 0; --a) st[a - 1] = st[a] * g.extents[a];
  return st;
}

// Advances a multi-index through `box` in row-major order; false when done.
bool advance(std::vector<std::size_t>& idx, const IndexBox& box) {
  for (std::size_t a = idx.size(); a-- > 0;) {
    if (++idx[a] < box.hi[a]) return true;
    idx[a] = box.lo[a];
  }
  return false;
}

// All lattice offsets with |z .* spacing| <= eps, in ascending row-major
// order over the bounding cube, squared radius accumulated axis by axis.
std::vector<std::vector<int>> ball(const Grid& g, double eps) {
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  std::vector<int> bound(na);
  for (std::size_t a = 0; a < na; ++a)
    bound[a] = static_cast<int>(std::floor(eps / g.spacings[a])) + 1;
  std::vector<std::vector<int>> offs;
  std::vector<int> z(na);
  for (std::size_t a = 0; a < na; ++a) z[a] = -bound[a];
  const double eps2 = eps * eps;
  while (true) {
    double r2 = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      const double s = z[a] * g.spacings[a];
      r2 += s * s;
    }
    if (r2 <= eps2) offs.push_back(z);
    bool more = false;
    for (std::size_t a = na; a-- > 0;) {
      if (++z[a] <= bound[a]) {
        more = true;
        break;
      }
      z[a] = -bound[a];
    }
    if (!more) return offs;
  }
}

std::size_t wrapped_flat(const Grid& g, const std::vector<std::size_t>& st,
                         const std::vector<std::size_t>& idx,
                         std::span<const int> z, int sign) {
  std::size_t flat = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    long long ni = static_cast<long long>(idx[a]) + sign * z[a];
    if (g.periodic[a]) {
      const auto e = static_cast<long long>(g.extents[a]);
      if (ni < 0) ni += e;
      else if (ni >= e) ni -= e;
    }
    flat += static_cast<std::size_t>(ni) * st[a];
  }
  return flat;
}

} // namespace

double vmo_modulus(const Field& f, double eps, const IndexBox& region) {
  const Grid& g = f.grid;
  if (eps <= 0.0) throw error("ref::vmo_modulus: ball radius must be positive");
  if (region.empty()) throw error("ref::vmo_modulus: empty region");
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  const std::vector<std::size_t> st = grid_strides(g);
  const std::vector<std::vector<int>> offs = ball(g, eps);
  const auto cnt = static_cast<double>(offs.size());
  const std::size_t points = f.points();

  double total = 0.0;
  std::vector<std::size_t> idx(region.lo);
  do {
    std::size_t base = 0;
    for (std::size_t a = 0; a < na; ++a) base += idx[a] * st[a];
    double inner = 0.0;
    for (const auto& z : offs) {
      const std::size_t other = wrapped_flat(g, st, idx, z, +1);
      double m = 0.0;
      for (int c = 0; c < f.n_components; ++c) {
        const double d = f.data[c * points + base] - f.data[c * points + other];
        m += d * d;
      }
      inner += m * std::sqrt(m);
    }
    total += inner / cnt;
  } while (advance(idx, region));
  return total * g.cell_volume() / eps;
}

double lp_norm(const Field& f, double p, const IndexBox& region) {
  const Grid& g = f.grid;
  if (p < 1.0) throw error("ref::lp_norm: p must be >= 1");
  if (region.empty()) throw error("ref::lp_norm: empty region");
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  const std::vector<std::size_t> st = grid_strides(g);
  const std::size_t points = f.points();
  const double vol = g.cell_volume();

  double total = 0.0;
  std::vector<std::size_t> idx(region.lo);
  do {
    std::size_t flat = 0;
    for (std::size_t a = 0; a < na; ++a) flat += idx[a] * st[a];
    double m2 = 0.0;
    for (int c = 0; c < f.n_components; ++c) {
      const double v = f.data[c * points + flat];
      m2 += v * v;
    }
    total += std::pow(std::sqrt(m2), p) * vol;
  } while (advance(idx, region));
  return std::pow(total, 1.0 / p);
}

InteriorField mollify(const Field& f, const Kernel& k) {
  const Grid& g = f.grid;
  const IndexBox box = mollified_box(g, k);
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  const std::vector<std::size_t> st = grid_strides(g);
  const int nt = k.tap_count();

  Field out = make_field(g, f.n_components, f.component_names);
  std::vector<std::size_t> idx(box.lo);
  do {
    std::size_t base = 0;
    for (std::size_t a = 0; a < na; ++a) base += idx[a] * st[a];
    for (int c = 0; c < f.n_components; ++c) {
      const double* src = f.comp(c);
      double acc = 0.0;
      for (int t = 0; t < nt; ++t) {
        std::span<const int> z(k.offsets[static_cast<std::size_t>(t)].data(), na);
        acc += k.weights[static_cast<std::size_t>(t)] *
               src[wrapped_flat(g, st, idx, z, -1)];
      }
      out.at(c, base) = acc;
    }
  } while (advance(idx, box));
  return InteriorField{std::move(out), box};
}

double directional_modulus(const Field& f, std::span<const int> shift) {
  const Grid& g = f.grid;
  const std::size_t na = static_cast<std::size_t>(g.axis_count());
  if (shift.size() != na) throw error("ref::directional_modulus: shift size mismatch");
  double len2 = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const double s = shift[a] * g.spacings[a];
    len2 += s * s;
  }
  const double len = std::sqrt(len2);
  if (len == 0.0) throw error("ref::directional_modulus: shift must be nonzero");

  IndexBox box = full_box(g);
  for (std::size_t a = 0; a < na; ++a) {
    const auto mag = static_cast<std::size_t>(std::abs(shift[a]));
    if (mag >= g.extents[a])
      throw error("ref::directional_modulus: shift does not fit the grid");
    if (!g.periodic[a]) {
      if (shift[a] > 0) box.hi[a] = g.extents[a] - mag;
      else box.lo[a] = mag;
    }
  }
  if (box.empty()) throw error("ref::directional_modulus: shift does not fit the grid");

  const std::vector<std::size_t> st = grid_strides(g);
  const std::size_t points = f.points();
  double total = 0.0;
  std::vector<std::size_t> idx(box.lo);
  do {
    std::size_t base = 0;
    for (std::size_t a = 0; a < na; ++a) base += idx[a] * st[a];
    const std::size_t other = wrapped_flat(g, st, idx, shift, +1);
    double m = 0.0;
    for (int c = 0; c < f.n_components; ++c) {
      const double d = f.data[c * points + other] - f.data[c * points + base];
      m += d * d;
    }
    total += m * std::sqrt(m);
  } while (advance(idx, box));
  return total * g.cell_volume() / len;
}

} // namespace cld::ref
