#include "cvqkd/table_output.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "cvqkd/errors.hpp"

namespace cvqkd {

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw DomainError("Table::add_row: row width does not match the header");
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return i;
    throw DomainError("Table: no column named " + name);
}

double Table::number(std::size_t row, const std::string& column) const {
    return std::get<double>(rows.at(row).at(column_index(column)));
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return fmt::format("{}", v);
}

namespace {

std::string cell_text(const Cell& c) {
    if (const double* v = std::get_if<double>(&c)) return format_number(*v);
    return std::get<std::string>(c);
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string header_text(const Column& c) {
    return c.unit.empty() ? c.name : c.name + " [" + c.unit + "]";
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += csv_escape(header_text(t.columns[i]));
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += csv_escape(cell_text(row[i]));
        }
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(const Table& t) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : t.rows) {
        nlohmann::json obj = nlohmann::json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const auto& name = t.columns[i].name;
            if (const double* v = std::get_if<double>(&row[i])) {
                // JSON has no NaN / infinity.
                obj[name] = std::isfinite(*v) ? nlohmann::json(*v) : nlohmann::json(nullptr);
            } else {
                obj[name] = std::get<std::string>(row[i]);
            }
        }
        rows.push_back(std::move(obj));
    }
    return {{"title", t.title}, {"columns", cols}, {"rows", rows}};
}

std::string to_text(const Table& t) {
    std::vector<std::size_t> width(t.columns.size());
    for (std::size_t i = 0; i < t.columns.size(); ++i) width[i] = header_text(t.columns[i]).size();
    std::vector<std::vector<std::string>> cells;
    for (const auto& row : t.rows) {
        auto& out = cells.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::string s;
            if (const double* v = std::get_if<double>(&row[i])) {
                s = std::isfinite(*v) ? fmt::format("{:.4g}", *v) : format_number(*v);
            } else {
                s = std::get<std::string>(row[i]);
            }
            width[i] = std::max(width[i], s.size());
            out.push_back(std::move(s));
        }
    }
    std::string out;
    if (!t.title.empty()) out += t.title + "\n";
    auto line = [&](const std::vector<std::string>& items) {
        for (std::size_t i = 0; i < items.size(); ++i)
            out += fmt::format("{}{:<{}}", i ? "  " : "", items[i], width[i]);
        out += '\n';
    };
    std::vector<std::string> head;
    for (const auto& c : t.columns) head.push_back(header_text(c));
    line(head);
    for (const auto& row : cells) line(row);
    return out;
}

}  // namespace cvqkd
