#pragma once
#include <span>
#include <string>
#include <vector>

#include "cld/field.hpp"

namespace cld {

/// Least-squares power law fitted through (epsilon, value) points in log-log
/// coordinates.
struct FitResult {
  double exponent = 0.0;       ///< slope of log value against log epsilon
  double log_prefactor = 0.0;  ///< intercept
  double r_squared = 0.0;      ///< 1 when the points sit exactly on a line
  int points_used = 0;         ///< points surviving the positivity filter
};

/// Fits log(value) ~ exponent * log(epsilon) + const.  Nonpositive values
/// are dropped with a warning on stderr (a zero has no logarithm); fewer
/// than four surviving points is an error.
FitResult scaling_fit(std::span<const double> epsilons,
                      std::span<const double> values);

/// A swept diagnostic: strictly decreasing epsilons, one nonnegative value
/// each, and the fitted exponent when enough positive values exist.
struct SweepReport {
  std::string region_label;
  std::vector<double> epsilons;
  std::vector<double> values;
  FitResult fit;
  bool fit_valid = false;  ///< false when the fit was skipped (e.g. all-zero)
};

/// Bundles a sweep and fits it; an unfittable series (fewer than four
/// positive values) is kept with fit_valid = false and a stderr warning
/// instead of an error, so all-zero sweeps from exact solutions are legal.
SweepReport make_sweep_report(std::string region_label,
                              std::vector<double> epsilons,
                              std::vector<double> values);

/// Geometric scale sweep from 16 down to 4 grid spacings (ratio sqrt 2,
/// five points), based on the coarsest spacing of the grid.
std::vector<double> default_epsilon_sweep(const Grid& g);

/// Cubic-mean oscillation modulus of a field at scale eps:
///   (1/eps) * integral over region of avg_{Y in B_eps(X)} |U(X) - U(Y)|^3,
/// with B_eps(X) the discrete Euclidean ball (offsets Z with |Z| <= eps,
/// center included) and the average dividing by the offset count.  The
/// region must keep an eps margin to every bounded face; periodic axes
/// wrap.  `comps` restricts the increment to a component group (empty =
/// all), which is how per-group regularity is measured.
double vmo_modulus(const Field& f, double eps, const IndexBox& region,
                   std::span<const int> comps = {});

/// Overload over the largest admissible region (margin eps on bounded axes).
double vmo_modulus(const Field& f, double eps,
                   std::span<const int> comps = {});

/// Directional increment mean for one lattice shift Z (indices per axis):
///   (1/|Z|) * integral over admissible X of |U(X+Z) - U(X)|^3,
/// where |Z| is the physical shift length.  Bounded axes restrict the X
/// set; periodic axes wrap.  Scales like |Z|^(3*alpha) / |Z| on a
/// Hoelder-alpha field, and like |Z|^2 on a smooth one.
double directional_modulus(const Field& f, std::span<const int> shift,
                           std::span<const int> comps = {});

/// Mixed-exponent admissibility conditions for split-regularity results,
/// keyed by criterion name:
///   inhom-euler     2*alpha + beta > 1                      (strict)
///   comp-euler      beta > max{1 - 2*alpha, (1 - alpha)/2}  (strict)
///   mhd-caflisch    alpha > 1/3  and  alpha + 2*beta > 1    (strict)
///   mhd-kang-lee    alpha >= 1/3 and  alpha + 2*beta >= 1   (non-strict)
/// The margin is the smallest slack LHS - RHS across the conditions; it is
/// reported as computed in floating point, without rounding at zero.
struct ExponentCheck {
  bool satisfied = false;
  double margin = 0.0;
};
ExponentCheck exponent_condition_check(double alpha, double beta,
                                       const std::string& criterion);

} // namespace cld
