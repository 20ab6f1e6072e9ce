#include "cld/field.hpp"

#include <cmath>
#include <string>

#include "cld/parallel.hpp"

namespace cld {

Field make_field(Grid grid, int n_components, std::vector<std::string> names) {
  if (n_components < 1) throw error("make_field: need at least one component");
  Field f;
  f.grid = std::move(grid);
  f.n_components = n_components;
  if (names.empty()) {
    for (int c = 0; c < n_components; ++c) names.push_back("c" + std::to_string(c));
  } else if (static_cast<int>(names.size()) != n_components) {
    throw error("make_field: component name count does not match");
  }
  f.component_names = std::move(names);
  f.data.assign(static_cast<std::size_t>(n_components) * f.points(), 0.0);
  return f;
}

void require_finite(const Field& f) {
  const std::size_t pts = f.points();
  for (int c = 0; c < f.n_components; ++c) {
    const double* v = f.comp(c);
    for (std::size_t i = 0; i < pts; ++i)
      if (!std::isfinite(v[i]))
        throw error("field has non-finite sample: component '" + f.component_names[static_cast<std::size_t>(c)] +
                    "' at index " + std::to_string(i));
  }
}

namespace {

double lp_norm_impl(const Field& f, double p, const IndexBox& region, std::span<const int> comps) {
  if (p < 1.0) throw error("lp_norm: p must be >= 1");
  if (region.empty()) throw error("lp_norm: empty region");
  BoxIndexer bx(f.grid, region);
  const double vol = f.grid.cell_volume();
  std::vector<int> all;
  if (comps.empty()) {
    for (int c = 0; c < f.n_components; ++c) all.push_back(c);
    comps = all;
  }
  for (int c : comps)
    if (c < 0 || c >= f.n_components) throw error("lp_norm: component index out of range");
  const double s = par::sum(bx.total, [&](std::size_t r) {
    const std::size_t flat = bx.flat_at(r);
    double m2 = 0.0;
    for (int c : comps) {
      const double v = f.at(c, flat);
      m2 += v * v;
    }
    if (p == 2.0) return m2 * vol;
    const double mag = std::sqrt(m2);
    if (p == 1.0) return mag * vol;
    if (p == 3.0) return m2 * mag * vol;
    return std::pow(mag, p) * vol;
  });
  return std::pow(s, 1.0 / p);
}

} // namespace

double lp_norm(const Field& f, double p) { return lp_norm_impl(f, p, full_box(f.grid), {}); }

double integrate(const Field& f, int c, const IndexBox& region) {
  if (c < 0 || c >= f.n_components) throw error("integrate: component index out of range");
  if (region.empty()) throw error("integrate: empty region");
  BoxIndexer bx(f.grid, region);
  const double vol = f.grid.cell_volume();
  const double* v = f.comp(c);
  return par::sum(bx.total, [&](std::size_t r) { return v[bx.flat_at(r)]; }) * vol;
}

double lp_norm(const Field& f, double p, const IndexBox& region, std::span<const int> comps) {
  return lp_norm_impl(f, p, region, comps);
}

double lp_norm(const InteriorField& f, double p) { return lp_norm_impl(f.field, p, f.box, {}); }

double lp_norm(const InteriorField& f, double p, const IndexBox& restrict_to,
               std::span<const int> comps) {
  return lp_norm_impl(f.field, p, intersect(f.box, restrict_to), comps);
}

} // namespace cld
