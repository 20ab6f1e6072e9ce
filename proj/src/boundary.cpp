#include "cld/boundary.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cld/parallel.hpp"
#include "cld/residuals.hpp"

namespace cld {

namespace {

// Spatial part of a grid: identical axes with the time axis dropped.
Grid spatial_part(const Grid& g) {
  if (!g.has_time) return g;
  std::vector<std::size_t> ext(g.extents.begin() + 1, g.extents.end());
  std::vector<double> sp(g.spacings.begin() + 1, g.spacings.end());
  std::vector<std::uint8_t> per(g.periodic.begin() + 1, g.periodic.end());
  return make_grid(g.spatial_dims, std::move(ext), std::move(sp), std::move(per), false);
}

double smoothstep5(double t) { return t * t * t * (10.0 + t * (6.0 * t - 15.0)); }
double dsmoothstep5(double t) {
  const double u = t * (1.0 - t);
  return 30.0 * u * u;
}

} // namespace

ShellSpec make_shell(const Grid& g, double epsilon) {
  if (!(epsilon > 0.0)) throw error("make_shell: epsilon must be positive");
  if (!(epsilon < epsilon0(g)))
    throw error("make_shell: epsilon must lie below half the narrowest bounded extent");

  ShellSpec shell;
  shell.epsilon = epsilon;
  shell.spatial = spatial_part(g);
  const BoundaryGeometry bg = boundary_geometry(shell.spatial);
  const int k = shell.spatial.spatial_dims;
  const double inner = shell.inner_fraction * epsilon;
  const double outer = shell.outer_fraction * epsilon;

  const std::size_t total = shell.spatial.point_count();
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  std::vector<double> n(static_cast<std::size_t>(k));
  for (std::size_t flat = 0; flat < total; ++flat) {
    shell.spatial.unflatten(flat, idx);
    const double d = bg.distance(idx);
    if (d < inner || d > outer) continue;
    shell.points.push_back(flat);
    bg.normal(idx, n);
    for (int j = 0; j < k; ++j) shell.normals.push_back(n[static_cast<std::size_t>(j)]);
  }
  if (shell.points.empty())
    throw error("make_shell: shell band holds no grid points (epsilon under-resolved)");
  return shell;
}

double shell_integral(const Field& state, const SystemSpec& sys,
                      const ShellSpec& shell, std::size_t t_begin,
                      std::size_t t_end) {
  const Grid& g = state.grid;
  if (!spatial_part(g).compatible_with(shell.spatial))
    throw error("shell_integral: shell was built for a different grid");

  const Field q = evaluate(sys, state, Eval::Q);
  const int k = sys.k;
  const double svol = shell.spatial.cell_volume();
  const std::size_t pts = shell.points.size();
  const std::size_t slice = shell.spatial.point_count();

  auto band_sum = [&](std::size_t t_off) {
    return par::sum(pts, [&](std::size_t p) {
      const std::size_t flat = t_off + shell.points[p];
      double qn = 0.0;
      for (int j = 0; j < k; ++j)
        qn += q.at(j, flat) * shell.normals[p * static_cast<std::size_t>(k) + j];
      return std::abs(qn);
    });
  };

  double total = 0.0;
  if (g.has_time) {
    const std::size_t nt = g.extents[0];
    const std::size_t e = std::min(t_end, nt);
    if (t_begin >= e) throw error("shell_integral: empty snapshot range");
    for (std::size_t j = t_begin; j < e; ++j) total += band_sum(j * slice) * g.spacings[0];
  } else {
    total = band_sum(0);
  }
  return total * svol / shell.epsilon;
}

TestFunction boundary_test_function(const Grid& g, double epsilon,
                                    const std::string& profile) {
  if (profile != "quintic")
    throw error("boundary_test_function: unknown profile '" + profile +
                "' (try: quintic)");
  if (!(epsilon > 0.0)) throw error("boundary_test_function: epsilon must be positive");
  if (!(epsilon < epsilon0(g)))
    throw error("boundary_test_function: epsilon must lie below half the "
                "narrowest bounded extent");

  const Grid gs = spatial_part(g);
  const BoundaryGeometry bg = boundary_geometry(gs);
  const int k = gs.spatial_dims;
  const double inner = 0.25 * epsilon;
  const double outer = 0.5 * epsilon;

  TestFunction tf;
  tf.values = make_field(gs, 1, {"phi"});
  std::vector<std::string> gnames;
  for (int a = 0; a < k; ++a) gnames.push_back("d" + axis_label(gs, a) + "_phi");
  tf.gradient = make_field(gs, k, gnames);

  // Support box: per bounded axis the cells with coordinate beyond eps/4
  // of either face (phi vanishes on the closed inner collar).
  tf.support = full_box(gs);
  tf.support_margin = inner;
  for (int a = 0; a < k; ++a) {
    if (gs.periodic[static_cast<std::size_t>(a)]) continue;
    const double h = gs.spacings[static_cast<std::size_t>(a)];
    const double f = std::floor(inner / h - 0.5) + 1.0;
    const std::size_t first = f < 0.0 ? 0 : static_cast<std::size_t>(f);
    if (2 * first >= gs.extents[a])
      throw error("boundary_test_function: no interior plateau along axis " +
                  axis_label(gs, a));
    tf.support.lo[a] = first;
    tf.support.hi[a] = gs.extents[a] - first;
  }

  par::for_each(gs.point_count(), [&](std::size_t flat) {
    thread_local std::vector<std::size_t> idx;
    thread_local std::vector<double> n;
    idx.resize(static_cast<std::size_t>(k));
    n.resize(static_cast<std::size_t>(k));
    gs.unflatten(flat, idx);
    const double d = bg.distance(idx);
    if (d <= inner) return;  // value and gradient stay exactly zero
    if (d >= outer) {
      tf.values.at(0, flat) = 1.0;
      return;
    }
    const double t = (d / epsilon - 0.25) * 4.0;
    tf.values.at(0, flat) = smoothstep5(t);
    const double dphi = 4.0 * dsmoothstep5(t);  // phi'(d/eps)
    bg.normal(idx, n);
    for (int j = 0; j < k; ++j)
      tf.gradient.at(j, flat) = -(dphi / epsilon) * n[static_cast<std::size_t>(j)];
  });
  return tf;
}

BalanceReport global_balance(const Field& state, const SystemSpec& sys,
                             const Kernel& kernel, double epsilon) {
  const Grid& g = state.grid;
  if (!g.has_time) throw error("global_balance: state needs a time axis");
  const std::size_t nt = g.extents[0];
  if (nt < 3) throw error("global_balance: need at least three time snapshots");
  const double dt = g.spacings[0];
  const std::size_t slice = g.point_count() / nt;
  const double svol = g.spatial_cell_volume();

  BalanceReport rep;
  rep.times.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) rep.times[j] = g.coord(0, j);

  // E(t): entropy integrated over the whole domain, one value per snapshot.
  {
    const Field eta = evaluate(sys, state, Eval::Eta);
    rep.energy.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      const double* v = eta.comp(0) + j * slice;
      rep.energy[j] = par::sum(slice, [&](std::size_t s) { return v[s]; }) * svol;
    }
  }
  rep.dEdt.resize(nt);
  rep.dEdt[0] = (rep.energy[1] - rep.energy[0]) / dt;
  for (std::size_t j = 1; j + 1 < nt; ++j)
    rep.dEdt[j] = (rep.energy[j + 1] - rep.energy[j - 1]) / (2.0 * dt);
  rep.dEdt[nt - 1] = (rep.energy[nt - 1] - rep.energy[nt - 2]) / dt;

  // Interior dissipation, restricted to the eps-deep core.
  {
    const InteriorField D = dissipation_density(state, sys, kernel);
    if (D.box.lo[0] != 0 || D.box.hi[0] != nt)
      throw error("global_balance: dissipation is undefined at the end "
                  "snapshots (the kernel must not smooth the time axis, and "
                  "the transport flux must stay out of the divergence)");
    IndexBox reg = D.box;
    for (int j = 0; j < g.spatial_dims; ++j) {
      const int a = g.spatial_axis(j);
      if (g.periodic[static_cast<std::size_t>(a)]) continue;
      const double h = g.spacings[static_cast<std::size_t>(a)];
      const auto cut =
          static_cast<std::size_t>(std::max(0.0, std::ceil(epsilon / h - 0.5)));
      if (cut > reg.lo[a]) reg.lo[a] = cut;
      if (g.extents[a] - cut < reg.hi[a]) reg.hi[a] = g.extents[a] - cut;
      if (reg.lo[a] >= reg.hi[a])
        throw error("global_balance: interior region is empty along axis " +
                    axis_label(g, a));
    }
    rep.interior.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      IndexBox rj = reg;
      rj.lo[0] = j;
      rj.hi[0] = j + 1;
      BoxIndexer bi(g, rj);
      rep.interior[j] =
          par::sum(bi.total, [&](std::size_t r) { return D.field.at(0, bi.flat_at(r)); }) *
          svol;
    }
  }

  // Inward boundary flux through the collar.
  {
    const TestFunction phi = boundary_test_function(g, epsilon);
    const ShellSpec shell = make_shell(g, epsilon);
    const Field q = evaluate(sys, state, Eval::Q);
    const int k = sys.k;
    rep.shell.resize(nt);
    for (std::size_t j = 0; j < nt; ++j) {
      const std::size_t off = j * slice;
      rep.shell[j] = par::sum(shell.points.size(), [&](std::size_t p) {
        const std::size_t s = shell.points[p];
        double dot = 0.0;
        for (int c = 0; c < k; ++c)
          dot += phi.gradient.at(c, s) * q.at(c, off + s);
        return dot;
      }) * svol;
    }
  }

  rep.closure.resize(nt);
  for (std::size_t j = 0; j < nt; ++j)
    rep.closure[j] = rep.dEdt[j] - rep.shell[j] - rep.interior[j];
  return rep;
}

} // namespace cld
