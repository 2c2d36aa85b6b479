#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "femtoprop/error.hpp"

// Line-oriented parsing helpers shared by the file-format readers. Columns
// are 1-based character offsets so ParseError diagnostics point into the
// offending line.

namespace femtoprop::textio {

struct Field {
    std::string text;
    int column = 1;
};

inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) out.push_back(text.substr(start));
            break;
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        out.push_back(line);
        start = end + 1;
    }
    return out;
}

/// Whitespace-separated fields; '#' starts a comment.
inline std::vector<Field> split_ws(std::string_view line) {
    std::vector<Field> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == '#') break;
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#') ++i;
        out.push_back({std::string(line.substr(start, i - start)), int(start) + 1});
    }
    return out;
}

/// Comma-separated fields with surrounding blanks trimmed; no quoting.
inline std::vector<Field> split_csv(std::string_view line) {
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        const std::size_t stop = end == std::string_view::npos ? line.size() : end;
        std::size_t a = start;
        std::size_t b = stop;
        while (a < b && (line[a] == ' ' || line[a] == '\t')) ++a;
        while (b > a && (line[b - 1] == ' ' || line[b - 1] == '\t')) --b;
        out.push_back({std::string(line.substr(a, b - a)), int(a) + 1});
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

inline double parse_double(const Field& f, const std::string& source, int line) {
    double v = 0.0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError(source, line, f.column, "expected a number, got '" + f.text + "'");
    return v;
}

inline long parse_int(const Field& f, const std::string& source, int line) {
    long v = 0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        throw ParseError(source, line, f.column, "expected an integer, got '" + f.text + "'");
    return v;
}

}  // namespace femtoprop::textio
