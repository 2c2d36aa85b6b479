#pragma once

#include <stdexcept>
#include <string>

namespace femtoprop {

/// Malformed input text. Carries the source name, 1-based line and column.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string source, int line, int column, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                             ": " + what),
          source_(std::move(source)),
          line_(line),
          column_(column) {}

    const std::string& source() const { return source_; }
    int line() const { return line_; }
    int column() const { return column_; }

  private:
    std::string source_;
    int line_;
    int column_;
};

/// Well-formed input that violates a data contract (unknown ids, missing
/// bands, mismatched profiles, empty datasets).
class DataError : public std::runtime_error {
  public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace femtoprop
