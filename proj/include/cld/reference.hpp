#pragma once
#include <span>

#include "cld/field.hpp"
#include "cld/kernel.hpp"

namespace cld::ref {

/// Serial brute-force twins of the parallel kernels: plain nested loops,
/// no chunking, no precomputed fast paths.  They exist so the optimized
/// versions can be checked against an independent implementation in tests
/// and raced against one in benchmarks.  All components enter the
/// magnitudes; regions follow the same conventions as the main library.

/// Cubic-mean oscillation modulus at scale eps over `region`.
double vmo_modulus(const Field& f, double eps, const IndexBox& region);

/// L^p norm of the pointwise Euclidean magnitude over `region`.
double lp_norm(const Field& f, double p, const IndexBox& region);

/// Kernel-weighted smoothing of every component on the shrunk interior.
InteriorField mollify(const Field& f, const Kernel& k);

/// Cubic-mean modulus along a single lattice shift.
double directional_modulus(const Field& f, std::span<const int> shift);

} // namespace cld::ref
