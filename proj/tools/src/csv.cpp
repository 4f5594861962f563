#include "medmarg_cli/csv.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "medmarg_cli/run_spec.hpp"

namespace medmarg::cli {

Table Table::numeric(std::vector<std::string> metadata, std::vector<std::string> columns,
                     const std::vector<std::vector<double>>& data) {
    if (data.size() != columns.size()) throw std::logic_error("Table::numeric: column count mismatch");
    Table t;
    t.metadata = std::move(metadata);
    t.columns = std::move(columns);
    const std::size_t n = data.empty() ? 0 : data.front().size();
    for (const auto& col : data) {
        if (col.size() != n) throw std::logic_error("Table::numeric: ragged columns");
    }
    t.rows.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        for (const auto& col : data) t.rows[r].push_back(format_number(col[r]));
    }
    return t;
}

std::vector<double> Table::numeric_column(std::size_t index) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        if (index >= row.size()) throw UsageError("CSV row shorter than header");
        const std::string& cell = row[index];
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (cell.empty() || *end != '\0') throw UsageError("non-numeric CSV cell '" + cell + "'");
        out.push_back(v);
    }
    return out;
}

std::string to_csv(const Table& table) {
    std::ostringstream os;
    for (const auto& line : table.metadata) os << "# " << line << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << '\n';
    }
    return os.str();
}

Table parse_csv(const std::string& text) {
    Table t;
    std::istringstream is(text);
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.metadata.push_back(line.size() > 2 ? line.substr(2) : "");
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            t.columns = std::move(cells);
            have_header = true;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    if (!have_header) throw UsageError("CSV has no header row");
    return t;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw UsageError("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw UsageError("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw UsageError("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

}  // namespace medmarg::cli
