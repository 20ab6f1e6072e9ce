#include "cld/mollify.hpp"

#include <array>
#include <cmath>

#include "cld/errors.hpp"
#include "cld/parallel.hpp"

namespace cld {

namespace {

void require_matching(const Grid& g, const Kernel& k) {
  if (k.axes.size() != g.axis_count() || k.spacings != g.spacings) {
    throw error("kernel was built for a different grid");
  }
}

// Applies one tap stencil to a single component slice of `f` over `box`,
// writing into the matching slice of `out`.  Points whose periodic
// coordinates sit a full support radius away from the seam use precomputed
// flat deltas; the seam itself wraps per axis.  Bounded axes never leave the
// grid because the box already excludes the boundary layer.
void apply_stencil(const Field& f, const Kernel& k, const IndexBox& box,
                   std::span<const double> taps, int c_in, Field& out,
                   int c_out) {
  const Grid& g = f.grid;
  const std::size_t na = g.axis_count();
  const int nt = k.tap_count();
  const BoxIndexer bi(g, box);

  std::vector<long long> delta(nt, 0);
  for (int t = 0; t < nt; ++t) {
    for (std::size_t a = 0; a < na; ++a) {
      delta[t] += static_cast<long long>(k.offsets[t][a]) *
                  static_cast<long long>(bi.strides[a]);
    }
  }
  std::vector<std::size_t> wrap_axes;
  for (std::size_t a = 0; a < na; ++a) {
    if (k.axes[a] && g.periodic[a]) wrap_axes.push_back(a);
  }

  const double* src = f.comp(c_in);
  double* dst = out.comp(c_out);
  par::for_each(bi.total, [&](std::size_t r) {
    std::array<std::size_t, max_axes> idx{};
    bi.at(r, std::span<std::size_t>(idx.data(), na));
    std::size_t base = 0;
    for (std::size_t a = 0; a < na; ++a) base += idx[a] * bi.strides[a];

    bool fast = true;
    for (std::size_t a : wrap_axes) {
      const auto rad = static_cast<std::size_t>(k.radius[a]);
      if (idx[a] < rad || idx[a] + rad >= g.extents[a]) {
        fast = false;
        break;
      }
    }

    double acc = 0.0;
    if (fast) {
      const auto b = static_cast<long long>(base);
      for (int t = 0; t < nt; ++t) acc += taps[t] * src[b - delta[t]];
    } else {
      for (int t = 0; t < nt; ++t) {
        std::size_t flat = 0;
        for (std::size_t a = 0; a < na; ++a) {
          long long ni = static_cast<long long>(idx[a]) - k.offsets[t][a];
          if (g.periodic[a]) {
            const auto e = static_cast<long long>(g.extents[a]);
            if (ni < 0) ni += e;
            else if (ni >= e) ni -= e;
          }
          flat += static_cast<std::size_t>(ni) * bi.strides[a];
        }
        acc += taps[t] * src[flat];
      }
    }
    dst[base] = acc;
  });
}

} // namespace

IndexBox mollified_box(const Grid& g, const Kernel& k) {
  require_matching(g, k);
  IndexBox box = full_box(g);
  for (std::size_t a = 0; a < g.axis_count(); ++a) {
    if (!k.axes[a] || g.periodic[a]) continue;
    const double h = g.spacings[a];
    // Keep the cell centers at distance >= epsilon from both faces; the tiny
    // slack guards the exact-multiple case against rounding in the quotient.
    const auto cut = static_cast<std::size_t>(
        std::max(0.0, std::ceil(k.epsilon / h - 0.5 - 1e-9)));
    if (2 * cut >= g.extents[a]) {
      throw error("smoothing length " + std::to_string(k.epsilon) +
                  " leaves no interior along axis " + std::to_string(a));
    }
    box.lo[a] = cut;
    box.hi[a] = g.extents[a] - cut;
  }
  return box;
}

std::vector<int> smoothed_axes(const Kernel& k) {
  std::vector<int> axes;
  for (std::size_t a = 0; a < k.axes.size(); ++a) {
    if (k.axes[a]) axes.push_back(static_cast<int>(a));
  }
  return axes;
}

InteriorField mollify(const Field& f, const Kernel& k) {
  const IndexBox box = mollified_box(f.grid, k);
  Field out = make_field(f.grid, f.n_components, f.component_names);
  for (int c = 0; c < f.n_components; ++c) {
    apply_stencil(f, k, box, k.weights, c, out, c);
  }
  return {std::move(out), box};
}

InteriorField mollified_gradient(const Field& f, const Kernel& k) {
  const IndexBox box = mollified_box(f.grid, k);
  const std::vector<int> axes = smoothed_axes(k);
  const int n = f.n_components;

  std::vector<std::string> names;
  for (int a : axes) {
    const std::string lbl = axis_label(f.grid, a);
    for (int c = 0; c < n; ++c) {
      names.push_back("d" + lbl + "_" + f.component_names[c]);
    }
  }
  Field out = make_field(f.grid, static_cast<int>(axes.size()) * n, names);
  for (std::size_t slot = 0; slot < axes.size(); ++slot) {
    const auto& taps = k.dweights[static_cast<std::size_t>(axes[slot])];
    for (int c = 0; c < n; ++c) {
      apply_stencil(f, k, box, taps, c, out, static_cast<int>(slot) * n + c);
    }
  }
  return {std::move(out), box};
}

InteriorField flux_commutator(const SystemSpec& sys, const Field& state,
                              const Kernel& k) {
  const Field flux = evaluate(sys, state, Eval::G);
  InteriorField smoothed_flux = mollify(flux, k);
  const InteriorField smoothed_state = mollify(state, k);
  const InteriorField flux_of_smoothed = evaluate(sys, smoothed_state, Eval::G);

  Field& a = smoothed_flux.field;
  const Field& b = flux_of_smoothed.field;
  const BoxIndexer bi(a.grid, smoothed_flux.box);
  for (int c = 0; c < a.n_components; ++c) {
    double* pa = a.comp(c);
    const double* pb = b.comp(c);
    par::for_each(bi.total, [&](std::size_t r) {
      const std::size_t idx = bi.flat_at(r);
      pa[idx] -= pb[idx];
    });
  }
  return smoothed_flux;
}

} // namespace cld
