#include "cld/residuals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cld/parallel.hpp"

namespace cld {

namespace {

// Quintic smoothstep 6t^5 - 15t^4 + 10t^3 and its derivative 30t^2(1-t)^2:
// C^2 across both junctions, which keeps the bump twice differentiable.
double smoothstep5(double t) { return t * t * t * (10.0 + t * (6.0 * t - 15.0)); }
double dsmoothstep5(double t) {
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

// Flux column contracted with derivatives along grid axis `a`: spatial axis
// j pairs with column j, the time axis with the transport column k.
int paired_column(const Grid& g, int a, int k) {
  return g.axis_is_time(a) ? k : a - (g.has_time ? 1 : 0);
}

} // namespace

TestFunction bump_test_function(const Grid& g, double lo_frac, double hi_frac) {
  if (!(lo_frac >= 0.0 && lo_frac < hi_frac && hi_frac <= 1.0))
    throw error("bump_test_function: need 0 <= lo_frac < hi_frac <= 1");
  const int na = g.axis_count();

  // Per-axis factor tables.  The argument |x - c| makes mirrored samples
  // evaluate through identical floating-point expressions, so the tables
  // are bitwise symmetric on symmetric grids.
  std::vector<std::vector<double>> val(na), dval(na);
  TestFunction tf;
  tf.support.lo.assign(na, 0);
  tf.support.hi.assign(na, 0);
  tf.support_margin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < na; ++a) {
    const std::size_t ext = g.extents[a];
    const double L = g.axis_length(a);
    const double c = 0.5 * (lo_frac + hi_frac) * L;
    const double halfw = 0.5 * (hi_frac - lo_frac) * L;
    val[a].assign(ext, 0.0);
    dval[a].assign(ext, 0.0);
    std::size_t first = ext, last = 0;
    for (std::size_t i = 0; i < ext; ++i) {
      const double x = g.coord(a, i);
      const double u = std::abs(x - c) / halfw;
      if (u >= 1.0) continue;
      const double t = 1.0 - u;
      val[a][i] = smoothstep5(t);
      const double sgn = x >= c ? 1.0 : -1.0;
      dval[a][i] = -sgn * dsmoothstep5(t) / halfw;
      if (first == ext) first = i;
      last = i;
    }
    if (first == ext)
      throw error("bump_test_function: support holds no grid point along axis " +
                  axis_label(g, a));
    tf.support.lo[a] = first;
    tf.support.hi[a] = last + 1;
    tf.support_margin =
        std::min(tf.support_margin, std::min(lo_frac * L, (1.0 - hi_frac) * L));
  }

  tf.values = make_field(g, 1, {"psi"});
  std::vector<std::string> gnames;
  for (int a = 0; a < na; ++a) gnames.push_back("d" + axis_label(g, a) + "_psi");
  tf.gradient = make_field(g, na, gnames);

  BoxIndexer bi(g, tf.support);
  par::for_each(bi.total, [&](std::size_t r) {
    thread_local std::vector<std::size_t> idx;
    idx.resize(static_cast<std::size_t>(na));
    bi.at(r, idx);
    std::size_t flat = 0;
    double v = 1.0;
    for (int a = 0; a < na; ++a) {
      flat += idx[a] * bi.strides[a];
      v *= val[a][idx[a]];
    }
    tf.values.at(0, flat) = v;
    for (int a = 0; a < na; ++a) {
      double dv = dval[a][idx[a]];
      for (int b = 0; b < na; ++b)
        if (b != a) dv *= val[b][idx[b]];
      tf.gradient.at(a, flat) = dv;
    }
  });
  return tf;
}

std::vector<double> weak_residual(const Field& state, const SystemSpec& sys,
                                  const TestFunction& psi) {
  const Grid& g = state.grid;
  if (!g.has_time) throw error("weak_residual: state needs a time axis");
  if (!psi.values.grid.compatible_with(g))
    throw error("weak_residual: test function was built for a different grid");
  if (!(psi.support_margin > 0.0))
    throw error("weak_residual: test-function support touches a box face");

  const Field G = evaluate(sys, state, Eval::G);
  const int nr = sys.n_rows;
  const int k = sys.k;
  BoxIndexer bi(g, psi.support);
  std::vector<double> r =
      par::sum_vec(bi.total, static_cast<std::size_t>(nr), [&](std::size_t p, double* acc) {
        const std::size_t flat = bi.flat_at(p);
        const double dt_psi = psi.gradient.at(0, flat);
        for (int row = 0; row < nr; ++row) {
          double term = dt_psi * G.at(k * nr + row, flat);
          for (int j = 0; j < k; ++j)
            term += psi.gradient.at(1 + j, flat) * G.at(j * nr + row, flat);
          acc[row] += term;
        }
      });
  const double vol = g.cell_volume();
  for (double& v : r) v *= vol;
  return r;
}

double tol_weak(const Field& state, const SystemSpec& sys,
                const TestFunction& psi) {
  const Field F = evaluate(sys, state, Eval::F);
  const double flux_l1 = lp_norm(F, 1.0);
  double c1 = 0.0;
  for (double v : psi.values.data) c1 = std::max(c1, std::abs(v));
  for (double v : psi.gradient.data) c1 = std::max(c1, std::abs(v));
  const double dx =
      *std::max_element(state.grid.spacings.begin(), state.grid.spacings.end());
  return 10.0 * dx * flux_l1 * c1;
}

namespace {

// Shared preamble of the companion diagnostics: the state and its flux
// block smoothed at the kernel scale, the flux of the smoothed state, and
// their difference (the commutator), all carried on the mollified box.
struct CommutatorParts {
  InteriorField state_m;  // [U]e
  InteriorField flux_m;   // [G(U)]e
  InteriorField flux_of;  // G([U]e)
  InteriorField comm;     // [G(U)]e - G([U]e)
};

CommutatorParts commutator_parts(const Field& state, const SystemSpec& sys,
                                 const Kernel& k) {
  CommutatorParts p;
  {
    Field flux = evaluate(sys, state, Eval::G);
    p.flux_m = mollify(flux, k);
  }
  p.state_m = mollify(state, k);
  p.flux_of = evaluate(sys, p.state_m, Eval::G);
  p.comm.box = p.state_m.box;
  p.comm.field = make_field(state.grid, p.flux_m.field.n_components,
                            p.flux_m.field.component_names);
  BoxIndexer bi(state.grid, p.comm.box);
  const int nc = p.comm.field.n_components;
  par::for_each(bi.total, [&](std::size_t r) {
    const std::size_t flat = bi.flat_at(r);
    for (int c = 0; c < nc; ++c)
      p.comm.field.at(c, flat) =
          p.flux_m.field.at(c, flat) - p.flux_of.field.at(c, flat);
  });
  return p;
}

// Erodes `box` by one cell along every axis in `need_axis`, making room for
// central differences of box-carried data, except where the box wraps
// (periodic axis covered in full).  Marks wrapping axes in `wrap`.
IndexBox difference_box(const Grid& g, const IndexBox& box,
                        const std::vector<std::uint8_t>& need_axis,
                        std::vector<std::uint8_t>& wrap, const char* who) {
  const int na = g.axis_count();
  wrap.assign(static_cast<std::size_t>(na), 0);
  IndexBox out = box;
  for (int a = 0; a < na; ++a) {
    if (!need_axis[static_cast<std::size_t>(a)]) continue;
    const bool spans = box.lo[a] == 0 && box.hi[a] == g.extents[a];
    if (g.periodic[static_cast<std::size_t>(a)] && spans) {
      wrap[static_cast<std::size_t>(a)] = 1;
      continue;
    }
    if (out.hi[a] - out.lo[a] < 3)
      throw error(std::string(who) +
                  ": no room for central differences along axis " +
                  axis_label(g, a));
    ++out.lo[a];
    --out.hi[a];
  }
  return out;
}

} // namespace

CompanionResult companion_residual(const Field& state, const SystemSpec& sys,
                                   const TestFunction& psi, const Kernel& k) {
  const Grid& g = state.grid;
  if (!psi.values.grid.compatible_with(g))
    throw error("companion_residual: test function was built for a different grid");

  const int na = g.axis_count();
  const int nr = sys.n_rows;
  const int ns = sys.n_states;
  const int kk = sys.k;

  CommutatorParts parts = commutator_parts(state, sys, k);
  const InteriorField Bf = evaluate(sys, parts.state_m, Eval::B);
  const InteriorField DUk = mollified_gradient(state, k);
  const std::vector<int> sm = smoothed_axes(k);
  std::vector<int> slot_of(static_cast<std::size_t>(na), -1);
  for (std::size_t i = 0; i < sm.size(); ++i) slot_of[static_cast<std::size_t>(sm[i])] = static_cast<int>(i);

  // Every grid axis is contracted; the smoothed ones come from the kernel's
  // analytic stencils, the rest need a central-difference neighborhood in
  // the smoothed state.
  std::vector<std::uint8_t> need(static_cast<std::size_t>(na), 0);
  for (int a = 0; a < na; ++a)
    need[static_cast<std::size_t>(a)] = slot_of[static_cast<std::size_t>(a)] < 0;
  std::vector<std::uint8_t> wrap;
  const IndexBox ibox =
      difference_box(g, parts.comm.box, need, wrap, "companion_residual");
  for (int a = 0; a < na; ++a) {
    if (psi.support.lo[a] < ibox.lo[a] || psi.support.hi[a] > ibox.hi[a])
      throw error("companion_residual: test-function support leaves the "
                  "mollified interior along axis " +
                  axis_label(g, a));
  }

  // The integrand vanishes off the support of psi (both psi and its
  // gradient are zero there), so the sum runs over the support box only.
  BoxIndexer bi(g, psi.support);
  const double vol = g.cell_volume();
  const std::vector<double> sums = par::sum_vec(bi.total, 3, [&](std::size_t r, double* acc) {
    thread_local std::vector<std::size_t> idx;
    thread_local std::vector<double> U, dB, DU;
    idx.resize(static_cast<std::size_t>(na));
    U.resize(static_cast<std::size_t>(ns));
    dB.resize(static_cast<std::size_t>(nr * ns));
    DU.resize(static_cast<std::size_t>(na * ns));

    bi.at(r, idx);
    std::size_t flat = 0;
    for (int a = 0; a < na; ++a) flat += idx[a] * bi.strides[a];

    const double p = psi.values.at(0, flat);
    for (int s = 0; s < ns; ++s) U[s] = parts.state_m.field.at(s, flat);
    sys.dB(U, dB);
    for (int a = 0; a < na; ++a) {
      if (slot_of[a] >= 0) {
        const int base = slot_of[a] * ns;
        for (int s = 0; s < ns; ++s)
          DU[a * ns + s] = DUk.field.at(base + s, flat);
      } else {
        const std::size_t ext = g.extents[a];
        const std::size_t st = bi.strides[a];
        std::size_t ip = idx[a] + 1, im = idx[a] - 1;
        if (wrap[static_cast<std::size_t>(a)]) {
          if (idx[a] + 1 == ext) ip = 0;
          if (idx[a] == 0) im = ext - 1;
        }
        const std::size_t off = flat - idx[a] * st;
        const double inv2h = 1.0 / (2.0 * g.spacings[a]);
        for (int s = 0; s < ns; ++s)
          DU[a * ns + s] = (parts.state_m.field.at(s, off + ip * st) -
                            parts.state_m.field.at(s, off + im * st)) *
                           inv2h;
      }
    }

    double res = 0.0, defect = 0.0, t3 = 0.0;
    for (int a = 0; a < na; ++a) {
      const int col = paired_column(g, a, kk);
      const double dp = psi.gradient.at(a, flat);
      for (int row = 0; row < nr; ++row) {
        double dBU = 0.0;
        for (int s = 0; s < ns; ++s) dBU += dB[row * ns + s] * DU[a * ns + s];
        const double t = dBU * p + Bf.field.at(row, flat) * dp;
        const double cm = parts.comm.field.at(col * nr + row, flat);
        const double fm = parts.flux_m.field.at(col * nr + row, flat);
        res -= cm * t;  // (G([U]e) - [G(U)]e) : T  =  -C : T
        defect += fm * t;
        t3 += t * t;
      }
    }
    acc[0] += res;
    acc[1] += defect;
    acc[2] += t3 * std::sqrt(t3);
  });

  CompanionResult out;
  out.residual = sums[0] * vol;
  out.weak_defect = sums[1] * vol;
  out.commutator_norm = lp_norm(parts.comm, 1.5);
  out.multiplier_grad_norm = std::cbrt(sums[2] * vol);
  out.majorant = out.commutator_norm * out.multiplier_grad_norm;
  return out;
}

InteriorField dissipation_density(const Field& state, const SystemSpec& sys,
                                  const Kernel& k) {
  const Grid& g = state.grid;
  const int na = g.axis_count();
  const int nr = sys.n_rows;
  const int kk = sys.k;

  CommutatorParts parts = commutator_parts(state, sys, k);
  const InteriorField Bf = evaluate(sys, parts.state_m, Eval::B);

  // A column whose commutator vanishes identically contributes nothing to
  // the divergence; skipping it avoids eroding its axis.  Transport columns
  // of systems whose time block just selects state components are exact
  // zeros, so time axes typically survive untouched.
  const int ncol = kk + 1;
  std::vector<std::uint8_t> col_active(static_cast<std::size_t>(ncol), 0);
  {
    BoxIndexer bc(g, parts.comm.box);
    for (int c = 0; c < ncol; ++c) {
      for (std::size_t r = 0; r < bc.total; ++r) {
        const std::size_t flat = bc.flat_at(r);
        bool hit = false;
        for (int row = 0; row < nr; ++row)
          if (parts.comm.field.at(c * nr + row, flat) != 0.0) {
            hit = true;
            break;
          }
        if (hit) {
          col_active[static_cast<std::size_t>(c)] = 1;
          break;
        }
      }
    }
  }

  std::vector<std::uint8_t> need(static_cast<std::size_t>(na), 0);
  for (int a = 0; a < na; ++a)
    need[static_cast<std::size_t>(a)] =
        col_active[static_cast<std::size_t>(paired_column(g, a, kk))];
  std::vector<std::uint8_t> wrap;
  const IndexBox obox =
      difference_box(g, parts.comm.box, need, wrap, "dissipation_density");

  Field out = make_field(g, 1, {"D"});
  BoxIndexer bi(g, obox);
  par::for_each(bi.total, [&](std::size_t r) {
    thread_local std::vector<std::size_t> idx;
    idx.resize(static_cast<std::size_t>(na));
    bi.at(r, idx);
    std::size_t flat = 0;
    for (int a = 0; a < na; ++a) flat += idx[a] * bi.strides[a];

    double acc = 0.0;
    for (int a = 0; a < na; ++a) {
      const int col = paired_column(g, a, kk);
      if (!col_active[static_cast<std::size_t>(col)]) continue;
      const std::size_t ext = g.extents[a];
      const std::size_t st = bi.strides[a];
      std::size_t ip = idx[a] + 1, im = idx[a] - 1;
      if (wrap[static_cast<std::size_t>(a)]) {
        if (idx[a] + 1 == ext) ip = 0;
        if (idx[a] == 0) im = ext - 1;
      }
      const std::size_t off = flat - idx[a] * st;
      const double inv2h = 1.0 / (2.0 * g.spacings[a]);
      for (int row = 0; row < nr; ++row) {
        const double dC = (parts.comm.field.at(col * nr + row, off + ip * st) -
                           parts.comm.field.at(col * nr + row, off + im * st)) *
                          inv2h;
        acc -= Bf.field.at(row, flat) * dC;  // B . div(-C)
      }
    }
    out.at(0, flat) = acc;
  });
  return InteriorField{std::move(out), obox};
}

SweepReport epsilon_sweep_residual(const Field& state, const SystemSpec& sys,
                                   const TestFunction& psi,
                                   std::span<const double> epsilons,
                                   std::span<const std::uint8_t> axes_mask) {
  std::vector<double> eps(epsilons.begin(), epsilons.end());
  std::vector<double> vals;
  vals.reserve(eps.size());
  for (double e : eps) {
    const Kernel k = mollifier_kernel(state.grid, e, axes_mask);
    vals.push_back(std::abs(companion_residual(state, sys, psi, k).residual));
  }
  return make_sweep_report("companion-residual", std::move(eps), std::move(vals));
}

} // namespace cld
