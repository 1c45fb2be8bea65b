#pragma once

#include <string>
#include <vector>

#include "idfunc/base.hpp"

namespace idfunc {

/// Comma-separated numeric table with a mandatory header row. Decimal
/// points only, no locale handling; parse errors carry line numbers.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<Vec> rows;

    int cols() const { return static_cast<int>(header.size()); }
    int n() const { return static_cast<int>(rows.size()); }
};

CsvTable read_csv(const std::string& path);
CsvTable parse_csv(const std::string& text);

/// Writes doubles at 17 significant digits.
void write_csv(const std::string& path, const CsvTable& table);
std::string format_csv(const CsvTable& table);

}  // namespace idfunc
