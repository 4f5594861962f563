#pragma once

#include <string>
#include <vector>

namespace medmarg::cli {

// Header row, comma-separated cells, '#'-prefixed metadata lines.
struct Table {
    std::vector<std::string> metadata;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    // Columns of equal length, each cell formatted with format_number.
    static Table numeric(std::vector<std::string> metadata, std::vector<std::string> columns,
                         const std::vector<std::vector<double>>& data);
    std::vector<double> numeric_column(std::size_t index) const;
};

std::string to_csv(const Table& table);
Table parse_csv(const std::string& text);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace medmarg::cli
