#include "cld/besov.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "cld/errors.hpp"
#include "cld/kernel.hpp"
#include "cld/parallel.hpp"

namespace cld {

FitResult scaling_fit(std::span<const double> epsilons,
                      std::span<const double> values) {
  if (epsilons.size() != values.size()) {
    throw error("epsilon and value series differ in length");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (epsilons[i] <= 0.0) throw error("epsilons must be positive");
    if (values[i] <= 0.0) {
      std::fprintf(stderr,
                   "warning: dropping nonpositive value %.17g at epsilon "
                   "%.17g from the fit\n",
                   values[i], epsilons[i]);
      continue;
    }
    lx.push_back(std::log(epsilons[i]));
    ly.push_back(std::log(values[i]));
  }
  const auto m = lx.size();
  if (m < 4) {
    throw error("scaling fit needs at least 4 positive points, have " +
                std::to_string(m));
  }

  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = lx[i] - mx, dy = ly[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw error("all epsilons coincide; slope undefined");

  FitResult fit;
  fit.exponent = sxy / sxx;
  fit.log_prefactor = my - fit.exponent * mx;
  fit.points_used = static_cast<int>(m);
  // A constant series has zero total variation: the flat line is an exact
  // fit, so report R^2 = 1 rather than 0/0.
  const double ss_res = syy - sxy * sxy / sxx;
  fit.r_squared = (syy <= 1e-30) ? 1.0 : std::max(0.0, 1.0 - ss_res / syy);
  return fit;
}

SweepReport make_sweep_report(std::string region_label,
                              std::vector<double> epsilons,
                              std::vector<double> values) {
  SweepReport rep;
  rep.region_label = std::move(region_label);
  rep.epsilons = std::move(epsilons);
  rep.values = std::move(values);
  if (rep.epsilons.size() != rep.values.size()) {
    throw error("epsilon and value series differ in length");
  }
  for (std::size_t i = 1; i < rep.epsilons.size(); ++i) {
    if (!(rep.epsilons[i] < rep.epsilons[i - 1])) {
      throw error("sweep epsilons must be strictly decreasing");
    }
  }
  std::size_t positive = 0;
  for (double v : rep.values) {
    if (v < 0.0) throw error("sweep values must be nonnegative");
    if (v > 0.0) ++positive;
  }
  if (positive >= 4) {
    rep.fit = scaling_fit(rep.epsilons, rep.values);
    rep.fit_valid = true;
  } else {
    std::fprintf(stderr,
                 "warning: sweep '%s' has only %zu positive values; exponent "
                 "fit skipped\n",
                 rep.region_label.c_str(), positive);
  }
  return rep;
}

std::vector<double> default_epsilon_sweep(const Grid& g) {
  double h = 0.0;
  for (double s : g.spacings) h = std::max(h, s);
  std::vector<double> eps;
  for (int i = 0; i < 5; ++i) {
    eps.push_back(16.0 * h / std::pow(std::sqrt(2.0), i));
  }
  return eps;
}

namespace {

// Offsets of the discrete Euclidean ball |Z| <= eps (center included).
// The membership test accumulates the squared length in ascending axis
// order; any independent reimplementation must do the same so that
// borderline offsets land on the same side of the cut.
std::vector<std::array<int, max_axes>> ball_offsets(const Grid& g,
                                                    double eps) {
  const std::size_t na = g.axis_count();
  std::vector<int> bound(na);
  for (std::size_t a = 0; a < na; ++a) {
    bound[a] = static_cast<int>(std::floor(eps / g.spacings[a])) + 1;
  }
  std::vector<std::array<int, max_axes>> offsets;
  std::array<int, max_axes> z{};
  const double eps2 = eps * eps;
  auto descend = [&](auto&& self, std::size_t a) -> void {
    if (a == na) {
      double r2 = 0.0;
      for (std::size_t b = 0; b < na; ++b) {
        const double s = z[b] * g.spacings[b];
        r2 += s * s;
      }
      if (r2 <= eps2) offsets.push_back(z);
      return;
    }
    for (int i = -bound[a]; i <= bound[a]; ++i) {
      z[a] = i;
      self(self, a + 1);
    }
  };
  descend(descend, 0);
  return offsets;
}

std::vector<int> all_components(const Field& f) {
  std::vector<int> comps(f.n_components);
  for (int c = 0; c < f.n_components; ++c) comps[c] = c;
  return comps;
}

void require_components(const Field& f, std::span<const int> comps) {
  if (comps.empty()) throw error("component selection is empty");
  for (int c : comps) {
    if (c < 0 || c >= f.n_components) {
      throw error("component index " + std::to_string(c) + " out of range");
    }
  }
}

} // namespace

double vmo_modulus(const Field& f, double eps, const IndexBox& region,
                   std::span<const int> comps) {
  const Grid& g = f.grid;
  if (eps <= 0.0) throw error("ball radius must be positive");
  if (region.empty()) throw error("empty region");
  std::vector<int> all;
  if (comps.empty()) {
    all = all_components(f);
    comps = all;
  }
  require_components(f, comps);

  const std::size_t na = g.axis_count();
  const auto offsets = ball_offsets(g, eps);

  std::vector<int> rad(na, 0);
  for (const auto& z : offsets) {
    for (std::size_t a = 0; a < na; ++a) rad[a] = std::max(rad[a], std::abs(z[a]));
  }
  for (std::size_t a = 0; a < na; ++a) {
    if (g.periodic[a]) {
      if (2 * static_cast<std::size_t>(rad[a]) + 1 > g.extents[a]) {
        throw error("ball wraps a periodic axis onto itself");
      }
    } else {
      if (region.lo[a] < static_cast<std::size_t>(rad[a]) ||
          region.hi[a] + static_cast<std::size_t>(rad[a]) > g.extents[a]) {
        throw error("region reaches within " + std::to_string(eps) +
                    " of a bounded face; shrink it or the ball");
      }
    }
  }

  const auto cnt = static_cast<double>(offsets.size());
  const BoxIndexer bi(g, region);
  const std::size_t points = f.points();

  const double total = par::sum(bi.total, [&](std::size_t r) {
    std::array<std::size_t, max_axes> idx{};
    bi.at(r, std::span<std::size_t>(idx.data(), na));
    std::size_t base = 0;
    for (std::size_t a = 0; a < na; ++a) base += idx[a] * bi.strides[a];

    double inner = 0.0;
    for (const auto& z : offsets) {
      std::size_t other = 0;
      for (std::size_t a = 0; a < na; ++a) {
        long long ni = static_cast<long long>(idx[a]) + z[a];
        if (g.periodic[a]) {
          const auto e = static_cast<long long>(g.extents[a]);
          if (ni < 0) ni += e;
          else if (ni >= e) ni -= e;
        }
        other += static_cast<std::size_t>(ni) * bi.strides[a];
      }
      double m = 0.0;
      for (int c : comps) {
        const double d = f.data[c * points + base] - f.data[c * points + other];
        m += d * d;
      }
      inner += m * std::sqrt(m);
    }
    return inner / cnt;
  });
  return total * g.cell_volume() / eps;
}

double vmo_modulus(const Field& f, double eps, std::span<const int> comps) {
  return vmo_modulus(f, eps, margin_box(f.grid, eps), comps);
}

double directional_modulus(const Field& f, std::span<const int> shift,
                           std::span<const int> comps) {
  const Grid& g = f.grid;
  const std::size_t na = g.axis_count();
  if (shift.size() != na) {
    throw error("shift has " + std::to_string(shift.size()) +
                " entries for a " + std::to_string(na) + "-axis grid");
  }
  std::vector<int> all;
  if (comps.empty()) {
    all = all_components(f);
    comps = all;
  }
  require_components(f, comps);

  double len2 = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    const double s = shift[a] * g.spacings[a];
    len2 += s * s;
  }
  const double len = std::sqrt(len2);
  if (len == 0.0) throw error("shift must be nonzero");

  IndexBox box = full_box(g);
  for (std::size_t a = 0; a < na; ++a) {
    const auto mag = static_cast<std::size_t>(std::abs(shift[a]));
    if (mag >= g.extents[a]) {
      throw error(g.periodic[a]
                      ? "shift wraps a periodic axis onto itself"
                      : "shift exceeds the domain on a bounded axis");
    }
    if (!g.periodic[a]) {
      if (shift[a] > 0) box.hi[a] = g.extents[a] - mag;
      else box.lo[a] = mag;
    }
  }
  if (box.empty()) throw error("shift exceeds the domain on a bounded axis");

  const BoxIndexer bi(g, box);
  const std::size_t points = f.points();
  const double total = par::sum(bi.total, [&](std::size_t r) {
    std::array<std::size_t, max_axes> idx{};
    bi.at(r, std::span<std::size_t>(idx.data(), na));
    std::size_t base = 0, other = 0;
    for (std::size_t a = 0; a < na; ++a) {
      base += idx[a] * bi.strides[a];
      long long ni = static_cast<long long>(idx[a]) + shift[a];
      if (g.periodic[a]) {
        const auto e = static_cast<long long>(g.extents[a]);
        if (ni < 0) ni += e;
        else if (ni >= e) ni -= e;
      }
      other += static_cast<std::size_t>(ni) * bi.strides[a];
    }
    double m = 0.0;
    for (int c : comps) {
      const double d = f.data[c * points + other] - f.data[c * points + base];
      m += d * d;
    }
    return m * std::sqrt(m);
  });
  return total * g.cell_volume() / len;
}

ExponentCheck exponent_condition_check(double alpha, double beta,
                                       const std::string& criterion) {
  if (alpha < 0.0 || alpha > 1.0 || beta < 0.0 || beta > 1.0) {
    throw error("exponents must lie in [0, 1]");
  }
  ExponentCheck out;
  if (criterion == "inhom-euler") {
    out.margin = 2.0 * alpha + beta - 1.0;
    out.satisfied = out.margin > 0.0;
  } else if (criterion == "comp-euler") {
    out.margin = beta - std::max(1.0 - 2.0 * alpha, (1.0 - alpha) / 2.0);
    out.satisfied = out.margin > 0.0;
  } else if (criterion == "mhd-caflisch") {
    out.margin = std::min(alpha - 1.0 / 3.0, alpha + 2.0 * beta - 1.0);
    out.satisfied = out.margin > 0.0;
  } else if (criterion == "mhd-kang-lee") {
    out.margin = std::min(alpha - 1.0 / 3.0, alpha + 2.0 * beta - 1.0);
    out.satisfied = out.margin >= 0.0;
  } else {
    throw error("unknown exponent criterion '" + criterion +
                "' (try: inhom-euler, comp-euler, mhd-caflisch, mhd-kang-lee)");
  }
  return out;
}

} // namespace cld
