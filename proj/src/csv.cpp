#include "idfunc/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace idfunc {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable table;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (table.header.empty()) {
            for (const std::string& f : fields) table.header.push_back(trim(f));
            if (table.header.empty()) throw ParseError("csv: empty header", line_no);
            continue;
        }
        if (fields.size() != table.header.size())
            throw ParseError("csv: expected " + std::to_string(table.header.size()) +
                                 " fields, got " + std::to_string(fields.size()),
                             line_no);
        Vec row;
        row.reserve(fields.size());
        for (const std::string& f : fields) {
            const std::string t = trim(f);
            char* end = nullptr;
            const double v = std::strtod(t.c_str(), &end);
            if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
                throw ParseError("csv: bad numeric field '" + t + "'", line_no);
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (table.header.empty()) throw ParseError("csv: empty input", 0);
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("csv: cannot open '" + path + "'", 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

std::string format_csv(const CsvTable& table) {
    std::ostringstream os;
    for (std::size_t j = 0; j < table.header.size(); ++j) {
        if (j) os << ",";
        os << table.header[j];
    }
    os << "\n";
    char buf[40];
    for (const Vec& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) os << ",";
            std::snprintf(buf, sizeof(buf), "%.17g", row[j]);
            os << buf;
        }
        os << "\n";
    }
    return os.str();
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("csv: cannot write '" + path + "'");
    out << format_csv(table);
}

}  // namespace idfunc
