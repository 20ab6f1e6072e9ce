#pragma once
#include <cstdint>
#include <span>
#include <vector>

#include "cld/besov.hpp"
#include "cld/field.hpp"
#include "cld/kernel.hpp"
#include "cld/mollify.hpp"
#include "cld/systems.hpp"

namespace cld {

/// Smooth compactly supported test function, tabulated with its gradient on
/// the grid it was built for.  `values` has one component ("psi");
/// `gradient` has one component per grid axis, in axis order.  `support` is
/// the index box outside of which every tabulated value is exactly zero,
/// and `support_margin` the physical distance from the continuum support to
/// the nearest box face.
struct TestFunction {
  Field values;
  Field gradient;
  IndexBox support;
  double support_margin = 0.0;
};

/// Tensor-product quintic bump: along every axis the profile rises from 0
/// at lo_frac * L to 1 at the midpoint of [lo_frac, hi_frac] and falls back
/// symmetrically, using the C^2 smoothstep 6u^5 - 15u^4 + 10u^3.  Distances
/// are taken from the bump center with |x - c|, so the tabulated values are
/// bitwise mirror-symmetric on symmetric grids.  Requires
/// 0 <= lo_frac < hi_frac <= 1 and at least one interior sample per axis.
TestFunction bump_test_function(const Grid& g, double lo_frac = 0.25,
                                double hi_frac = 0.75);

/// Distributional residual of each companion row against psi:
///   r_row = integral of  d_t psi * A_row(U) + grad_x psi : F_row(U)
/// as a midpoint sum over the support of psi.  The grid must have a time
/// axis and psi must vanish near every bounded face (weak solutions are
/// only tested against interior test functions).  Returns one value per
/// system row.
std::vector<double> weak_residual(const Field& state, const SystemSpec& sys,
                                  const TestFunction& psi);

/// Discretization allowance for weak_residual on the same data:
///   10 * (coarsest spacing) * L1 norm of the flux block * C^1 norm of psi.
/// A residual within this of zero is indistinguishable from an exact weak
/// solution at this resolution.
double tol_weak(const Field& state, const SystemSpec& sys,
                const TestFunction& psi);

/// Companion-law defect of a mollified state against one test function.
struct CompanionResult {
  /// integral of (G([U]e) - [G(U)]e) : D(B([U]e) psi) — the term that
  /// obstructs the companion law; it vanishes with eps for states rougher
  /// than the flux can feel only when the commutator does.
  double residual = 0.0;
  /// commutator_norm * multiplier_grad_norm, the Hoelder bound on
  /// |residual|; scales like eps^(3 alpha - 1) on Hoelder-alpha data.
  double majorant = 0.0;
  /// L^(3/2) norm of the flux commutator [G(U)]e - G([U]e).
  double commutator_norm = 0.0;
  /// L^3 norm of the multiplier gradient block D(B([U]e) psi).
  double multiplier_grad_norm = 0.0;
  /// integral of [G(U)]e : D(B([U]e) psi), the value of the full smoothed
  /// weak form; reported so exactness is checked rather than assumed.
  double weak_defect = 0.0;
};

/// Evaluates the companion-law defect at the kernel's scale.  The gradient
/// D(B psi) is contracted with the flux columns matching grid axes: spatial
/// columns always, the transport column only when the grid has a time axis.
/// Derivatives along smoothed axes use the kernel's analytic stencils;
/// along remaining axes, second-order central differences (the integration
/// box is shrunk by one cell there unless the axis wraps).  The support of
/// psi must fit inside that box.
CompanionResult companion_residual(const Field& state, const SystemSpec& sys,
                                   const TestFunction& psi, const Kernel& k);

/// Local dissipation density at the kernel's scale:
///   D_eps = B([U]e) . div(G([U]e) - [G(U)]e),
/// the defect that survives the eps -> 0 limit as an entropy measure.  The
/// divergence uses central differences per contracted column; columns of
/// the commutator that vanish identically (transport columns of systems
/// whose time block is a plain component selection) are skipped, so they
/// cost no erosion.  The carrier box shrinks by one cell along each
/// contracted non-wrapping axis.
InteriorField dissipation_density(const Field& state, const SystemSpec& sys,
                                  const Kernel& k);

/// Companion residual magnitude swept over scales: one kernel per epsilon
/// (smoothing the axes in `axes_mask`, empty = all), fitted as a power law.
/// Epsilons must be strictly decreasing.
SweepReport epsilon_sweep_residual(const Field& state, const SystemSpec& sys,
                                   const TestFunction& psi,
                                   std::span<const double> epsilons,
                                   std::span<const std::uint8_t> axes_mask = {});

} // namespace cld
