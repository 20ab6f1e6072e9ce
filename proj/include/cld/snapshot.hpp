#pragma once
#include <string>

#include "cld/field.hpp"

namespace cld {

/// Binary field snapshot, little-endian, bit-exact round trip.
/// Layout: magic "CLFD", u32 version (=1); u32 spatial dims, u8 has_time,
/// u32 component count; per-axis u64 extents, f64 spacings, u8 periodic
/// flags (time axis first when present); component names as u32 byte length
/// + UTF-8 bytes; then f64 samples in [component][t][x1]...[xk] row-major
/// order.
void write_snapshot(const std::string& path, const Field& f);

/// Reads and validates a snapshot (magic, version, dimensions, finiteness).
Field read_snapshot(const std::string& path);

} // namespace cld
