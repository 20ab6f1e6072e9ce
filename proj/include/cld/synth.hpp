#pragma once
#include <cstdint>
#include <functional>
#include <string>

#include "cld/field.hpp"
#include "cld/systems.hpp"

namespace cld {

/// Random trigonometric field with prescribed roughness: each component is
/// an independent sum over the lexicographically positive integer modes
/// kappa with |kappa_a| <= cutoff of
///   |kappa|^-(alpha + d/2) * cos(2 pi kappa.x + theta),
/// phases drawn from a per-component stream of `seed` (bit-reproducible
/// for a given seed, component count and cutoff).  The spectrum makes
/// increments scale like |dx|^alpha, so the cubic-mean oscillation modulus
/// decays like eps^(3 alpha) and its 1/eps-scaled form like
/// eps^(3 alpha - 1).  Requires a space-only fully periodic grid, alpha in
/// (0,1), and cutoff at most half the smallest extent (0 picks that
/// maximum).
Field holder_field(const Grid& g, double alpha, int n_components,
                   std::uint64_t seed, int cutoff = 0);

/// Entropic step of the scalar quadratic-flux law: u_l left of the jump,
/// u_r right of it, the jump starting at x0 and moving at (u_l + u_r)/2.
/// Needs a time axis over one bounded spatial axis and u_l > u_r (the
/// reverse order spreads into a fan, not a step).  If the jump would exit
/// the domain inside the sampled window, the time axis is truncated to the
/// snapshots before exit with a warning on stderr; the returned field
/// carries the truncated grid.
Field burgers_shock(const Grid& g, double u_l, double u_r, double x0);

/// Stationary planar channel flow (f(y), 0, p0) for the incompressible
/// momentum system: periodic in x, bounded in y, constant along the time
/// axis when one is present.  Any profile works, including rough ones
/// sampled from a 1D random field — the flow is an exact steady weak
/// solution with zero normal boundary flux.
Field shear_flow(const Grid& g, const std::function<double(double)>& profile,
                 double p0);

/// Admissible reference state for a registry system: "constant" fills the
/// natural rest state (unit density, identity deformation, zero velocity,
/// momentum, field and pressure), "smooth-random" adds one low-mode cosine
/// per component scaled to stay well inside the sampling box.  Constant in
/// time when the grid carries a time axis.
Field manufactured_state(const SystemSpec& sys, const Grid& g,
                         const std::string& mode, std::uint64_t seed = 0);

} // namespace cld
