#pragma once
#include <vector>

#include "cld/field.hpp"
#include "cld/kernel.hpp"
#include "cld/systems.hpp"

namespace cld {

/// Box of points where applying `k` never reaches outside the grid: bounded
/// smoothed axes are shrunk to the cells at distance >= epsilon from the
/// boundary, periodic and unsmoothed axes are kept whole.  Throws when the
/// shrunken box is empty.
IndexBox mollified_box(const Grid& g, const Kernel& k);

/// Axes of the grid smoothed by `k`, in increasing order.
std::vector<int> smoothed_axes(const Kernel& k);

/// Kernel-weighted average of every component, carried on mollified_box.
InteriorField mollify(const Field& f, const Kernel& k);

/// Partial derivatives of the mollified field along the smoothed axes, via
/// the analytic derivative stencils of the kernel (exact on affine data).
/// Components are derivative-axis-major: slot a of smoothed_axes(k) and
/// input component c land in output component a * n_components + c.
InteriorField mollified_gradient(const Field& f, const Kernel& k);

/// Difference between smoothing and evaluation in either order applied to
/// the space-time flux block: [G(U)]_eps - G([U]_eps), with components laid
/// out as in Eval::G.  Rows whose flux is affine in the state cancel to
/// machine precision; genuinely nonlinear rows are O(eps^(2/3)) in the
/// cubic-mean modulus of the state.
InteriorField flux_commutator(const SystemSpec& sys, const Field& state,
                              const Kernel& k);

} // namespace cld
