#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vts {

/// A precondition of an operation was violated by the caller.
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A required input file or directory does not exist or cannot be opened.
class MissingInputError : public std::runtime_error {
public:
    explicit MissingInputError(const std::string& path)
        : std::runtime_error("missing input: " + path), path_(path) {}
    [[nodiscard]] const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A binary file did not match its declared layout.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A line-oriented text file could not be parsed.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// A selection policy needs a per-observation field that is missing.
class PolicyUnavailableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A scenario specification cannot be realized (e.g. too many separated anchors).
class FeasibilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vts
