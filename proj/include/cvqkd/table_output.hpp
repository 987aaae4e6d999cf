#pragma once

// Column-oriented result tables and their CSV / JSON / aligned-text renderings.

#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace cvqkd {

using Cell = std::variant<double, std::string>;

struct Column {
    std::string name;
    std::string unit;  // empty for dimensionless or text columns
};

struct Table {
    std::string title;
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
    std::size_t column_index(const std::string& name) const;
    double number(std::size_t row, const std::string& column) const;
};

/// Header row "name [unit]"; numbers in shortest round-trip form.
std::string to_csv(const Table& t);

/// {"title", "columns": [{"name","unit"}], "rows": [{name: value}]}.
nlohmann::json to_json(const Table& t);

/// Fixed-width text for terminals.
std::string to_text(const Table& t);

/// Shortest decimal form that parses back to the same double; "nan", "inf".
std::string format_number(double v);

}  // namespace cvqkd
