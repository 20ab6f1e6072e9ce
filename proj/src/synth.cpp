#include "cld/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <vector>

#include "cld/parallel.hpp"
#include "cld/rng.hpp"

namespace cld {

namespace {

constexpr double two_pi = 6.283185307179586476925286766559;

// Lexicographically positive integer modes in the cube |z_a| <= cutoff:
// exactly one of each +-z pair, enumerated in a fixed ascending order so
// phase streams always line up with the same modes.
std::vector<std::array<int, 3>> half_space_modes(int d, int cutoff) {
  std::vector<std::array<int, 3>> modes;
  std::array<int, 3> z{0, 0, 0};
  const int lo = -cutoff;
  auto lex_positive = [&]() {
    for (int a = 0; a < d; ++a) {
      if (z[static_cast<std::size_t>(a)] > 0) return true;
      if (z[static_cast<std::size_t>(a)] < 0) return false;
    }
    return false;  // the zero mode is a constant, not an oscillation
  };
  // Odometer over the cube, first axis slowest.
  std::array<int, 3> c{lo, lo, lo};
  for (int a = d; a < 3; ++a) c[static_cast<std::size_t>(a)] = 0;
  while (true) {
    for (int a = 0; a < 3; ++a) z[static_cast<std::size_t>(a)] = a < d ? c[static_cast<std::size_t>(a)] : 0;
    if (lex_positive()) modes.push_back(z);
    int a = d - 1;
    for (; a >= 0; --a) {
      if (++c[static_cast<std::size_t>(a)] <= cutoff) break;
      c[static_cast<std::size_t>(a)] = lo;
    }
    if (a < 0) break;
  }
  return modes;
}

} // namespace

Field holder_field(const Grid& g, double alpha, int n_components,
                   std::uint64_t seed, int cutoff) {
  if (g.has_time) throw error("holder_field: needs a space-only grid");
  for (int a = 0; a < g.axis_count(); ++a)
    if (!g.periodic[static_cast<std::size_t>(a)])
      throw error("holder_field: every axis must be periodic");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw error("holder_field: alpha must lie in (0, 1)");
  if (n_components < 1) throw error("holder_field: need at least one component");

  const int d = g.spatial_dims;
  const std::size_t min_ext =
      *std::min_element(g.extents.begin(), g.extents.end());
  const int max_cut = static_cast<int>(min_ext / 2);
  if (cutoff == 0) cutoff = max_cut;
  if (cutoff < 1 || cutoff > max_cut)
    throw error("holder_field: cutoff must lie in [1, half the smallest extent]");

  const std::vector<std::array<int, 3>> modes = half_space_modes(d, cutoff);
  std::vector<double> amp(modes.size());
  for (std::size_t m = 0; m < modes.size(); ++m) {
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double ka = modes[m][static_cast<std::size_t>(a)];
      k2 += ka * ka;
    }
    amp[m] = std::pow(k2, -0.5 * (alpha + 0.5 * d));
  }

  // One phase stream per component, drawn up front in mode order.
  std::vector<std::vector<double>> phase(static_cast<std::size_t>(n_components));
  for (int c = 0; c < n_components; ++c) {
    std::mt19937_64 eng(stream_seed(seed, static_cast<std::uint64_t>(c)));
    phase[static_cast<std::size_t>(c)].resize(modes.size());
    for (std::size_t m = 0; m < modes.size(); ++m)
      phase[static_cast<std::size_t>(c)][m] = two_pi * uniform01(eng);
  }

  // Fractional position along each axis, once per index.
  std::vector<std::vector<double>> frac(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const double L = g.axis_length(a);
    frac[static_cast<std::size_t>(a)].resize(g.extents[a]);
    for (std::size_t i = 0; i < g.extents[a]; ++i)
      frac[static_cast<std::size_t>(a)][i] = g.coord(a, i) / L;
  }

  Field f = make_field(g, n_components);
  par::for_each(f.points(), [&](std::size_t flat) {
    thread_local std::vector<std::size_t> idx;
    idx.resize(static_cast<std::size_t>(d));
    g.unflatten(flat, idx);
    double fr[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < d; ++a) fr[a] = frac[static_cast<std::size_t>(a)][idx[a]];
    for (int c = 0; c < n_components; ++c) {
      const double* ph = phase[static_cast<std::size_t>(c)].data();
      double acc = 0.0;
      for (std::size_t m = 0; m < modes.size(); ++m) {
        const double s = modes[m][0] * fr[0] + modes[m][1] * fr[1] + modes[m][2] * fr[2];
        acc += amp[m] * std::cos(two_pi * s + ph[m]);
      }
      f.at(c, flat) = acc;
    }
  });
  return f;
}

Field burgers_shock(const Grid& g, double u_l, double u_r, double x0) {
  if (!g.has_time || g.spatial_dims != 1)
    throw error("burgers_shock: needs a time axis over one spatial axis");
  const int ax = g.spatial_axis(0);
  if (g.periodic[static_cast<std::size_t>(ax)])
    throw error("burgers_shock: spatial axis must be bounded (a step cannot close periodically)");
  if (!(u_l > u_r))
    throw error("burgers_shock: need u_l > u_r (a rising step spreads into a fan)");
  const double L = g.axis_length(ax);
  if (!(x0 > 0.0 && x0 < L))
    throw error("burgers_shock: x0 must lie strictly inside the domain");

  const double speed = 0.5 * (u_l + u_r);
  const double dt = g.spacings[0];
  const std::size_t nt = g.extents[0];

  // Truncate the window if the jump exits through a face.
  Grid gr = g;
  if (speed != 0.0) {
    const double t_exit = speed > 0.0 ? (L - x0) / speed : x0 / (-speed);
    const double last = t_exit / dt - 0.5;  // snapshots j with (j+1/2) dt < t_exit
    const std::size_t keep =
        last <= 0.0 ? 0 : static_cast<std::size_t>(std::ceil(last));
    if (keep < 2)
      throw error("burgers_shock: the jump exits the domain before the second snapshot");
    if (keep < nt) {
      std::fprintf(stderr,
                   "burgers_shock: jump exits the domain at t = %g; keeping "
                   "%zu of %zu snapshots\n",
                   t_exit, keep, nt);
      gr.extents[0] = keep;
    }
  }

  Field f = make_field(gr, 1, {"u"});
  const std::size_t slice = gr.point_count() / gr.extents[0];
  par::for_each(f.points(), [&](std::size_t flat) {
    const std::size_t j = flat / slice;
    const std::size_t i = flat % slice;
    const double t = gr.coord(0, j);
    const double x = gr.coord(ax, i);
    f.at(0, flat) = x < x0 + speed * t ? u_l : u_r;
  });
  return f;
}

Field shear_flow(const Grid& g, const std::function<double(double)>& profile,
                 double p0) {
  if (g.spatial_dims != 2) throw error("shear_flow: needs two spatial axes");
  const int ax = g.spatial_axis(0);
  const int ay = g.spatial_axis(1);
  if (!g.periodic[static_cast<std::size_t>(ax)] || g.periodic[static_cast<std::size_t>(ay)])
    throw error("shear_flow: needs a channel (periodic in x, bounded in y)");
  if (!profile) throw error("shear_flow: profile is empty");

  std::vector<double> fy(g.extents[ay]);
  for (std::size_t i = 0; i < fy.size(); ++i) fy[i] = profile(g.coord(ay, i));

  Field f = make_field(g, 3, {"vx", "vy", "p"});
  const int na = g.axis_count();
  par::for_each(f.points(), [&](std::size_t flat) {
    thread_local std::vector<std::size_t> idx;
    idx.resize(static_cast<std::size_t>(na));
    g.unflatten(flat, idx);
    f.at(0, flat) = fy[idx[static_cast<std::size_t>(ay)]];
    f.at(2, flat) = p0;
  });
  return f;
}

Field manufactured_state(const SystemSpec& sys, const Grid& g,
                         const std::string& mode, std::uint64_t seed) {
  if (g.spatial_dims != sys.k)
    throw error("manufactured_state: grid dimension does not match the system");
  Field f = make_field(g, sys.n_states, sys.state_names);
  const int ns = sys.n_states;

  // Natural rest values: unit density, identity deformation, zero else.
  auto rest = [&](int s) {
    const std::string& n = sys.state_names[static_cast<std::size_t>(s)];
    if (n == "rho" || n == "u") return 1.0;
    if (n.size() == 3 && n[0] == 'F' && n[1] == n[2]) return 1.0;
    return 0.0;
  };

  if (mode == "constant") {
    for (int s = 0; s < ns; ++s) {
      const double v = rest(s);
      double* out = f.comp(s);
      const std::size_t pts = f.points();
      par::for_each(pts, [&](std::size_t i) { out[i] = v; });
    }
    return f;
  }
  if (mode != "smooth-random")
    throw error("manufactured_state: unknown mode '" + mode +
                "' (try: constant, smooth-random)");

  // One low integer mode and phase per component, amplitude a quarter of
  // the sampling box, centered: values stay strictly inside the box.
  const int k = sys.k;
  std::vector<std::array<int, 3>> kappa(static_cast<std::size_t>(ns));
  std::vector<double> theta(static_cast<std::size_t>(ns));
  for (int s = 0; s < ns; ++s) {
    std::mt19937_64 eng(stream_seed(seed, static_cast<std::uint64_t>(s)));
    for (int j = 0; j < 3; ++j) {
      kappa[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)] =
          j < k ? 1 + static_cast<int>(uniform01(eng) * 3.0) : 0;
    }
    theta[static_cast<std::size_t>(s)] = two_pi * uniform01(eng);
  }

  const int na = g.axis_count();
  par::for_each(f.points(), [&](std::size_t flat) {
    thread_local std::vector<std::size_t> idx;
    idx.resize(static_cast<std::size_t>(na));
    g.unflatten(flat, idx);
    double fr[3] = {0.0, 0.0, 0.0};
    for (int j = 0; j < k; ++j) {
      const int a = g.spatial_axis(j);
      fr[j] = g.coord(a, idx[static_cast<std::size_t>(a)]) / g.axis_length(a);
    }
    for (int s = 0; s < ns; ++s) {
      const double mid =
          0.5 * (sys.sample_lo[static_cast<std::size_t>(s)] + sys.sample_hi[static_cast<std::size_t>(s)]);
      const double amp =
          0.25 * (sys.sample_hi[static_cast<std::size_t>(s)] - sys.sample_lo[static_cast<std::size_t>(s)]);
      const auto& kp = kappa[static_cast<std::size_t>(s)];
      const double arg = two_pi * (kp[0] * fr[0] + kp[1] * fr[1] + kp[2] * fr[2]) +
                         theta[static_cast<std::size_t>(s)];
      f.at(s, flat) = mid + amp * std::cos(arg);
    }
  });
  return f;
}

} // namespace cld
