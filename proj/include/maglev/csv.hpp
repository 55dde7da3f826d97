#pragma once

// CSV emission with IEEE-754 round-trip formatting: shortest decimal that
// parses back to the same bits, LF line endings, deterministic row order.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "maglev/errors.hpp"

namespace maglev {

/// Shortest decimal representation that round-trips to the same double.
inline std::string format_double(double x) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

/// Exact inverse of format_double; throws on malformed input.
inline double parse_double_exact(std::string_view text) {
    double value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw Error("not a valid floating-point field: '" + std::string(text) + "'");
    return value;
}

/// An empty cell, a number, an integer, a flag or plain text.
using CsvValue = std::variant<std::monostate, double, long long, bool, std::string>;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<CsvValue>> rows;
};

namespace detail {

inline void append_cell(std::string& out, const CsvValue& v) {
    struct Visitor {
        std::string& out;
        void operator()(std::monostate) const {}
        void operator()(double x) const { out += format_double(x); }
        void operator()(long long x) const { out += std::to_string(x); }
        void operator()(bool b) const { out += b ? '1' : '0'; }
        void operator()(const std::string& s) const {
            if (s.find(',') != std::string::npos ||
                s.find('\n') != std::string::npos)
                throw Error("CSV text field may not contain ',' or newline: '" +
                            s + "'");
            out += s;
        }
    };
    std::visit(Visitor{out}, v);
}

} // namespace detail

inline std::string to_csv_text(const CsvTable& table) {
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out += ',';
        out += table.columns[c];
    }
    out += '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size())
            throw Error("CSV row width does not match the header");
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            detail::append_cell(out, row[c]);
        }
        out += '\n';
    }
    return out;
}

/// Writes the table to path; I/O failures carry the path in the message.
inline void emit_csv(const CsvTable& table, const std::string& path) {
    const std::string text = to_csv_text(table);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f) throw Error("write failed for '" + path + "'");
}

/// Raw cells of a CSV file (header + string fields); numeric fields can be
/// recovered bit-exactly with parse_double_exact.
struct RawCsv {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

inline RawCsv parse_csv(std::string_view text) {
    RawCsv out;
    std::size_t pos = 0;
    bool header = true;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty() && pos >= text.size()) break;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            std::size_t comma = line.find(',', start);
            if (comma == std::string_view::npos) {
                fields.emplace_back(line.substr(start));
                break;
            }
            fields.emplace_back(line.substr(start, comma - start));
            start = comma + 1;
        }
        if (header) {
            out.columns = std::move(fields);
            header = false;
        } else {
            out.rows.push_back(std::move(fields));
        }
    }
    return out;
}

} // namespace maglev
