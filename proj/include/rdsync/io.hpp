#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rdsync::io {

/// Shortest decimal form that round-trips to the same double.
std::string num(double v);

/// Writes "# seed=<seed>[ <extra>]" followed by the column header row.
void csv_header(std::ostream& os, std::uint64_t seed, const std::vector<std::string>& columns,
                const std::string& extra = {});

/// Joins already-formatted cells with commas and a trailing newline.
void csv_row(std::ostream& os, const std::vector<std::string>& cells);

} // namespace rdsync::io
