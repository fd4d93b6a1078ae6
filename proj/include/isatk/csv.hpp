#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "isatk/common.hpp"

namespace isatk::csv {

// Minimal strict CSV: comma-separated, no quoting, '#' lines are comments.
// A leading "# fingerprint: <hex>" comment is recognized and surfaced.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::optional<std::string> fingerprint;
};

inline std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline Table read(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open CSV file: " + path);
    Table t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        std::string s = trim(line);
        if (s.empty()) continue;
        if (s[0] == '#') {
            const std::string key = "# fingerprint:";
            if (s.rfind(key, 0) == 0) t.fingerprint = trim(s.substr(key.size()));
            continue;
        }
        if (!have_header) {
            t.header = split_line(s);
            have_header = true;
        } else {
            t.rows.push_back(split_line(s));
        }
    }
    if (!have_header) throw Error("CSV file has no header row: " + path);
    return t;
}

inline void write(const std::string& path, const Table& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write CSV file: " + path);
    if (t.fingerprint) out << "# fingerprint: " << *t.fingerprint << "\n";
    for (std::size_t i = 0; i < t.header.size(); ++i)
        out << (i ? "," : "") << t.header[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << "\n";
    }
}

// Strict whole-field numeric parse; rejects inf/nan and trailing garbage.
inline std::optional<double> parse_double(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const char* b = s.data();
    const char* e = b + s.size();
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e) return std::nullopt;
    if (!std::isfinite(v)) return std::nullopt;
    return v;
}

}  // namespace isatk::csv
