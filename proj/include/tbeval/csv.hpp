#pragma once

// Strict CSV for the fixed cohort schemas: UTF-8, comma-separated, first row
// header, "." decimal separator, no quoting. Errors carry file/line/column.

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tbeval/errors.hpp"

namespace tbeval::csv {

inline std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    for (char c : line) {
        if (c == ',') {
            out.push_back(field);
            field.clear();
        } else if (c != '\r') {
            field.push_back(c);
        }
    }
    out.push_back(field);
    return out;
}

class Reader {
public:
    Reader(const std::string& path, const std::vector<std::string>& expected_header)
        : path_(path), in_(path) {
        if (!in_) throw Error("cannot open " + path);
        std::string header_line;
        if (!std::getline(in_, header_line))
            throw LoadError(path_, 1, 1, "missing header row");
        line_no_ = 1;
        auto header = split_row(header_line);
        if (header != expected_header) {
            std::string want;
            for (std::size_t i = 0; i < expected_header.size(); ++i)
                want += (i ? "," : "") + expected_header[i];
            throw LoadError(path_, 1, 1, "unexpected header; expected: " + want);
        }
        n_columns_ = expected_header.size();
    }

    /// Next data row, or nullopt at end of file. Blank lines are skipped.
    std::optional<std::vector<std::string>> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (line.empty() || line == "\r") continue;
            auto row = split_row(line);
            if (row.size() != n_columns_)
                throw LoadError(path_, line_no_, 1,
                                "expected " + std::to_string(n_columns_) + " columns, got " +
                                    std::to_string(row.size()));
            return row;
        }
        return std::nullopt;
    }

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_no_; }

    [[noreturn]] void fail(std::size_t column, const std::string& what) const {
        throw LoadError(path_, line_no_, column, what);
    }

    std::string require_nonempty(const std::vector<std::string>& row, std::size_t col) const {
        if (row[col].empty()) fail(col + 1, "empty required field");
        return row[col];
    }

    double parse_real(const std::vector<std::string>& row, std::size_t col) const {
        const std::string& s = row[col];
        double v = 0.0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            fail(col + 1, "unparseable number '" + s + "'");
        return v;
    }

    std::optional<double> parse_optional_real(const std::vector<std::string>& row,
                                              std::size_t col) const {
        if (row[col].empty()) return std::nullopt;
        return parse_real(row, col);
    }

    long parse_integer(const std::vector<std::string>& row, std::size_t col) const {
        const std::string& s = row[col];
        long v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || p != s.data() + s.size())
            fail(col + 1, "unparseable integer '" + s + "'");
        return v;
    }

    bool parse_binary(const std::vector<std::string>& row, std::size_t col) const {
        const std::string& s = row[col];
        if (s == "0") return false;
        if (s == "1") return true;
        fail(col + 1, "expected 0 or 1, got '" + s + "'");
    }

    std::optional<bool> parse_optional_binary(const std::vector<std::string>& row,
                                              std::size_t col) const {
        if (row[col].empty()) return std::nullopt;
        return parse_binary(row, col);
    }

private:
    std::string path_;
    std::ifstream in_;
    std::size_t line_no_ = 0;
    std::size_t n_columns_ = 0;
};

class Writer {
public:
    Writer(const std::string& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) throw Error("cannot open " + path + " for writing");
        write_row(header);
    }

    void write_row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

/// Shortest decimal that round-trips to the same double; stable across runs.
inline std::string format_real(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) break;
    }
    return buf;
}

}  // namespace tbeval::csv
