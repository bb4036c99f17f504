#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "openrabi/errors.hpp"

namespace openrabi {

// One typed output cell; rows are ordered (name, cell) lists so CSV and
// JSON writers emit identical schemas in a fixed column order.
struct Cell {
    std::variant<double, long long, std::string> value;

    static Cell number(double v) { return Cell{v}; }
    static Cell integer(long long v) { return Cell{v}; }
    static Cell text(std::string v) { return Cell{std::move(v)}; }
};

using Row = std::vector<std::pair<std::string, Cell>>;

// Scientific notation with 13 significant digits; enough to round-trip
// the comparisons downstream scripts do.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += "\"";
    return out;
}

inline void write_csv(std::ostream& os, const std::vector<Row>& rows) {
    if (rows.empty()) return;
    const Row& head = rows.front();
    for (std::size_t i = 0; i < head.size(); ++i)
        os << (i ? "," : "") << csv_escape(head[i].first);
    os << "\n";
    for (const Row& row : rows) {
        if (row.size() != head.size())
            throw ConfigError("internal: ragged output rows");
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << (i ? "," : "");
            const Cell& c = row[i].second;
            if (std::holds_alternative<double>(c.value))
                os << format_double(std::get<double>(c.value));
            else if (std::holds_alternative<long long>(c.value))
                os << std::get<long long>(c.value);
            else
                os << csv_escape(std::get<std::string>(c.value));
        }
        os << "\n";
    }
}

// Single row -> one object (single-run report); several rows -> array.
inline void write_json(std::ostream& os, const std::vector<Row>& rows) {
    using json = nlohmann::ordered_json;
    auto to_object = [](const Row& row) {
        json obj = json::object();
        for (const auto& [name, cell] : row) {
            if (std::holds_alternative<double>(cell.value)) {
                const double v = std::get<double>(cell.value);
                if (std::isnan(v))
                    obj[name] = nullptr;
                else
                    obj[name] = v;
            } else if (std::holds_alternative<long long>(cell.value)) {
                obj[name] = std::get<long long>(cell.value);
            } else {
                obj[name] = std::get<std::string>(cell.value);
            }
        }
        return obj;
    };
    json doc;
    if (rows.size() == 1) {
        doc = to_object(rows.front());
    } else {
        doc = json::array();
        for (const Row& r : rows) doc.push_back(to_object(r));
    }
    os << doc.dump(2) << "\n";
}

inline std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace openrabi
