#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace scissorlab {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);  // DimensionMismatch on width
    std::size_t column(const std::string& name) const;
    double number(std::size_t row, const std::string& name) const;
};

// Header row, 15 significant digits, LF line endings.
std::string to_csv(const Table& table);
void write_csv(const Table& table, const std::filesystem::path& path);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool dashed = false;
};

struct Panel {
    std::string name;  // file stem suffix
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
    std::vector<Series> series;
};

std::string to_svg(const Panel& panel);
void write_svg(const Panel& panel, const std::filesystem::path& path);

}  // namespace scissorlab
