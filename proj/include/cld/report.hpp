#pragma once
#include <string>

#include "cld/besov.hpp"
#include "cld/boundary.hpp"
#include "cld/systems.hpp"

namespace cld {

/// CSV serialization of a sweep: header "epsilon,value", one row per
/// point, full round-trip precision.
std::string sweep_csv(const SweepReport& rep);

/// JSON serialization of a sweep: label, points, and the fitted exponent
/// with its r2 (null when the fit was skipped).  Two-space indentation,
/// key order fixed, so identical reports are byte-identical.
std::string sweep_json(const SweepReport& rep);

/// JSON serialization of a balance ledger:
/// {times[], energy[], dEdt[], interior[], shell[], closure[]}.
std::string balance_json(const BalanceReport& rep);

/// JSON serialization of an algebra compatibility report.
std::string compat_json(const std::string& system, const CompatReport& rep);

/// JSON description of a registry system: sizes, component names, the
/// admissible sampling box, and which rows are affine.
std::string describe_json(const SystemSpec& sys);

/// Writes `text` to `path`, creating or truncating the file; throws on I/O
/// failure.
void write_text(const std::string& path, const std::string& text);

} // namespace cld
