#include "rdsync/io.hpp"

#include <ostream>

#include <fmt/format.h>

namespace rdsync::io {

std::string num(double v)
{
    return fmt::format("{}", v);
}

void csv_header(std::ostream& os, std::uint64_t seed, const std::vector<std::string>& columns, const std::string& extra)
{
    os << "# seed=" << seed;
    if (!extra.empty())
        os << ' ' << extra;
    os << '\n';
    csv_row(os, columns);
}

void csv_row(std::ostream& os, const std::vector<std::string>& cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            os << ',';
        os << cells[i];
    }
    os << '\n';
}

} // namespace rdsync::io
