#include "cld/kernel.hpp"

#include <cmath>
#include <string>

namespace cld {

double Kernel::second_moment(int axis) const {
  const std::size_t ua = static_cast<std::size_t>(axis);
  double m2 = 0.0;
  for (std::size_t t = 0; t < offsets.size(); ++t) {
    const double s = offsets[t][ua] * spacings[ua];
    m2 += weights[t] * s * s;
  }
  return m2;
}

Kernel mollifier_kernel(const Grid& grid, double epsilon,
                        std::span<const std::uint8_t> axes_mask) {
  const int axes = grid.axis_count();
  Kernel k;
  k.epsilon = epsilon;
  k.spacings = grid.spacings;
  if (axes_mask.empty()) {
    k.axes.assign(static_cast<std::size_t>(axes), 1);
  } else {
    if (static_cast<int>(axes_mask.size()) != axes)
      throw error("mollifier_kernel: axes mask must have one entry per grid axis");
    k.axes.assign(axes_mask.begin(), axes_mask.end());
  }
  bool any = false;
  double hmax = 0.0;
  for (int a = 0; a < axes; ++a) {
    if (!k.axes[static_cast<std::size_t>(a)]) continue;
    any = true;
    hmax = std::max(hmax, grid.spacings[static_cast<std::size_t>(a)]);
  }
  if (!any) throw error("mollifier_kernel: no axis selected");
  if (!(epsilon > 0.0)) throw error("mollifier_kernel: epsilon must be positive");
  if (epsilon < 2.0 * hmax * (1.0 - 1e-12))
    throw error("mollifier_kernel: epsilon under-resolved (needs epsilon >= 2 * max spacing "
                "on smoothed axes; epsilon=" + std::to_string(epsilon) +
                ", max spacing=" + std::to_string(hmax) + ")");

  // Enumeration bound per axis; membership is decided by the exact support
  // test |s| < eps below.
  std::array<int, max_axes> bound{};
  for (int a = 0; a < axes; ++a) {
    const std::size_t ua = static_cast<std::size_t>(a);
    if (!k.axes[ua]) continue;
    bound[ua] = static_cast<int>(std::ceil(epsilon / grid.spacings[ua])) + 1;
  }

  const double eps2 = epsilon * epsilon;
  std::array<int, max_axes> z{};
  std::vector<std::array<int, max_axes>> taps;
  std::vector<double> raw;
  std::vector<std::array<double, max_axes>> disp; // physical offsets per tap

  // Nested enumeration over the offset cube of the smoothed axes.
  const auto descend = [&](auto&& self, int a) -> void {
    if (a == axes) {
      double r2 = 0.0;
      std::array<double, max_axes> s{};
      for (int b = 0; b < axes; ++b) {
        const std::size_t ub = static_cast<std::size_t>(b);
        s[ub] = z[ub] * grid.spacings[ub];
        r2 += s[ub] * s[ub];
      }
      if (r2 < eps2) { // support strictly inside radius eps
        const double u = 1.0 - r2 / eps2;
        taps.push_back(z);
        raw.push_back(u * u * u);
        disp.push_back(s);
      }
      return;
    }
    const std::size_t ua = static_cast<std::size_t>(a);
    if (!k.axes[ua]) {
      z[ua] = 0;
      self(self, a + 1);
      return;
    }
    for (int v = -bound[ua]; v <= bound[ua]; ++v) {
      z[ua] = v;
      self(self, a + 1);
    }
  };
  descend(descend, 0);

  // Unit mass by discrete renormalization.
  double mass = 0.0;
  for (double w : raw) mass += w;
  k.offsets = std::move(taps);
  k.weights.resize(raw.size());
  k.radius.assign(static_cast<std::size_t>(axes), 0);
  for (std::size_t t = 0; t < raw.size(); ++t) {
    k.weights[t] = raw[t] / mass;
    for (int a = 0; a < axes; ++a)
      k.radius[static_cast<std::size_t>(a)] =
          std::max(k.radius[static_cast<std::size_t>(a)], std::abs(k.offsets[t][static_cast<std::size_t>(a)]));
  }
  for (int a = 0; a < axes; ++a) {
    const std::size_t ua = static_cast<std::size_t>(a);
    if (grid.periodic[ua] && k.axes[ua] &&
        2 * k.radius[ua] + 1 > static_cast<int>(grid.extents[ua]))
      throw error("mollifier_kernel: support wraps a periodic axis onto itself");
  }

  // Analytic derivative stencils: d/ds_a (1-|s|^2/eps^2)^3 = -6 (1-r^2)^2 s_a / eps^2,
  // sampled on the same taps with the same mass normalization, then rescaled
  // so the discrete first moment is exactly one (affine exactness).
  k.dweights.assign(static_cast<std::size_t>(axes), {});
  for (int a = 0; a < axes; ++a) {
    const std::size_t ua = static_cast<std::size_t>(a);
    if (!k.axes[ua]) continue;
    std::vector<double> dv(k.offsets.size());
    double moment = 0.0;
    for (std::size_t t = 0; t < k.offsets.size(); ++t) {
      double r2 = 0.0;
      for (int b = 0; b < axes; ++b) {
        const double s = k.offsets[t][static_cast<std::size_t>(b)] * grid.spacings[static_cast<std::size_t>(b)];
        r2 += s * s;
      }
      const double u = 1.0 - r2 / eps2;
      const double sa = k.offsets[t][ua] * grid.spacings[ua];
      dv[t] = -6.0 * u * u * sa / (eps2 * mass);
      moment -= dv[t] * sa; // continuum value: +1
    }
    for (double& w : dv) w /= moment;
    k.dweights[ua] = std::move(dv);
  }
  return k;
}

std::vector<std::uint8_t> spatial_axes_mask(const Grid& grid) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(grid.axis_count()), 1);
  if (grid.has_time) m[0] = 0;
  return m;
}

} // namespace cld
