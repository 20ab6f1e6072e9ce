#pragma once
#include <span>
#include <string>
#include <vector>

#include "cld/grid.hpp"

namespace cld {

/// Multi-component sample array over a Grid. Storage is component-major:
/// data[c * points + flat] with flat the row-major point index, matching the
/// on-disk snapshot layout exactly.
struct Field {
  Grid grid;
  int n_components = 0;
  std::vector<std::string> component_names;
  std::vector<double> data;

  std::size_t points() const { return grid.point_count(); }
  double* comp(int c) { return data.data() + static_cast<std::size_t>(c) * points(); }
  const double* comp(int c) const { return data.data() + static_cast<std::size_t>(c) * points(); }
  double& at(int c, std::size_t flat) { return data[static_cast<std::size_t>(c) * points() + flat]; }
  double at(int c, std::size_t flat) const { return data[static_cast<std::size_t>(c) * points() + flat]; }
};

/// Zero-initialized field; names default to c0, c1, ...
Field make_field(Grid grid, int n_components, std::vector<std::string> names = {});

/// Throws naming the first non-finite sample (component and flat index).
void require_finite(const Field& f);

/// L^p norm (p >= 1) of the pointwise Euclidean magnitude over a region,
/// as a midpoint Riemann sum: (sum |U(X)|^p * cellvol)^(1/p).
/// `region` defaults to the full grid; `comps` restricts the components
/// entering the magnitude (empty = all). Throws on an empty region.
double lp_norm(const Field& f, double p);
double lp_norm(const Field& f, double p, const IndexBox& region,
               std::span<const int> comps = {});

/// Midpoint Riemann sum of one component over a region:
/// sum f_c(X) * cellvol. Throws on an empty region.
double integrate(const Field& f, int c, const IndexBox& region);

/// Field restricted to a valid index box: produced by mollification, which
/// only defines values on the shrunk interior of bounded axes. Storage keeps
/// the full-grid layout (zeros outside the box).
struct InteriorField {
  Field field;
  IndexBox box;
};

double lp_norm(const InteriorField& f, double p);
double lp_norm(const InteriorField& f, double p, const IndexBox& restrict_to,
               std::span<const int> comps = {});

} // namespace cld
