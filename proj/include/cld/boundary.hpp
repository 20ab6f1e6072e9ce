#pragma once
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "cld/field.hpp"
#include "cld/kernel.hpp"
#include "cld/residuals.hpp"
#include "cld/systems.hpp"

namespace cld {

/// Collar band next to the bounded faces of a domain: the spatial grid
/// points whose distance d to the nearest face satisfies
/// eps/4 <= d <= eps/2 (both ends included).  Outward unit normals of the
/// projected boundary points are tabulated alongside, so flux integrals
/// over the band are plain weighted sums.
struct ShellSpec {
  double epsilon = 0.0;
  double inner_fraction = 0.25;
  double outer_fraction = 0.5;
  Grid spatial;                     ///< spatial sub-grid the points index
  std::vector<std::size_t> points;  ///< flat spatial indices inside the band
  std::vector<double> normals;      ///< k outward components per point
};

/// Builds the band on the spatial part of `g`.  Requires a bounded spatial
/// axis, 0 < eps below half the narrowest bounded extent, and a band wide
/// enough to catch at least one grid point.
ShellSpec make_shell(const Grid& g, double epsilon);

/// Normal boundary-flux magnitude concentrated on the band:
///   (1/eps) * sum over shell of |q(U) . n| * (spatial cell volume),
/// integrated dt over the snapshot range [t_begin, t_end) when the grid
/// has a time axis, and per unit time otherwise.  A vanishing value is the
/// discrete trace of the slip condition q . n = 0 on the boundary.
double shell_integral(const Field& state, const SystemSpec& sys,
                      const ShellSpec& shell, std::size_t t_begin = 0,
                      std::size_t t_end = std::numeric_limits<std::size_t>::max());

/// Boundary cutoff phi^eps(x) = phi(d(x)/eps) on the spatial part of `g`:
/// exactly 0 where d <= eps/4, exactly 1 where d >= eps/2, and a monotone
/// quintic ramp in between, so the gradient
///   grad phi^eps = -(1/eps) phi'(d/eps) n(sigma(x))
/// is supported exactly in the eps/4..eps/2 band.  The only registered
/// profile is "quintic".  Requires eps below half the narrowest bounded
/// extent (so the plateau at 1 is nonempty).
TestFunction boundary_test_function(const Grid& g, double epsilon,
                                    const std::string& profile = "quintic");

/// Entropy bookkeeping of a snapshot series, one row per snapshot.
struct BalanceReport {
  std::vector<double> times;     ///< snapshot times
  std::vector<double> energy;    ///< E(t) = integral of eta over the domain
  std::vector<double> dEdt;      ///< central differences (one-sided at ends)
  std::vector<double> interior;  ///< dissipation density integrated over d >= eps
  std::vector<double> shell;     ///< inward boundary flux: integral of grad phi^eps . q
  std::vector<double> closure;   ///< dEdt - shell - interior
};

/// Evaluates the global entropy ledger at boundary scale `epsilon` with the
/// interior dissipation measured by `kernel`: for exact weak solutions
/// energy change splits into boundary inflow plus interior dissipation, so
/// `closure` vanishes up to discretization.  Needs at least three
/// snapshots, and dissipation defined at every snapshot (the kernel must
/// not smooth the time axis).
BalanceReport global_balance(const Field& state, const SystemSpec& sys,
                             const Kernel& kernel, double epsilon);

} // namespace cld
