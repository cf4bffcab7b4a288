#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace nf {

struct SelftestOptions {
    int resolution = 32;
    std::uint64_t seed = 0;
    /// Per-invariant tolerance overrides keyed by invariant name.
    std::map<std::string, double> tolerance_overrides;
};

/// Runs the invariant suite, printing one line per invariant and a summary.
/// Returns true iff every invariant passed.
bool run_selftest(const SelftestOptions& options, std::ostream& out);

} // namespace nf
