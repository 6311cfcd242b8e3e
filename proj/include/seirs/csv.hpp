// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace seirs {

/// Full-precision scientific notation, locale independent, deterministic:
/// the CSV schema contract is byte stability across identical runs.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v,
                                   std::chars_format::scientific, 17);
    return std::string(buf, res.ptr);
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

/// RFC-4180-style writer: UTF-8, '.' decimal point, LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns)
        : out_(path, std::ios::binary), columns_(columns.size()) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
        for (std::size_t i = 0; i < columns.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_quote(columns[i]);
        }
        out_ << '\n';
    }

    void row(std::span<const double> values) {
        if (values.size() != columns_)
            throw std::invalid_argument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_double(values[i]);
        }
        out_ << '\n';
    }

    void text_row(std::span<const std::string> values) {
        if (values.size() != columns_)
            throw std::invalid_argument("CsvWriter: column count mismatch");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_quote(values[i]);
        }
        out_ << '\n';
    }

    void close() { out_.close(); }

private:
    std::ofstream out_;
    std::size_t columns_;
};

/// Two-column key/value report (thresholds, verdicts, summaries).
class KeyValueCsv {
public:
    explicit KeyValueCsv(const std::string& path)
        : writer_(path, {"metric", "value"}) {}

    void add(const std::string& key, double value) {
        const std::string row[2] = {key, format_double(value)};
        writer_.text_row(row);
    }
    void add(const std::string& key, const std::string& value) {
        const std::string row[2] = {key, value};
        writer_.text_row(row);
    }
    void add(const std::string& key, bool value) {
        add(key, std::string(value ? "true" : "false"));
    }
    void add(const std::string& key, long long value) {
        add(key, std::to_string(value));
    }
    void close() { writer_.close(); }

private:
    CsvWriter writer_;
};

}  // namespace seirs
