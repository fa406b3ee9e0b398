#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace skysearch {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid geometric input: non-unit vector, declination out of range, bad constraint length.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Region-grammar syntax or semantic error. `offset` is a byte offset into the input.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Catalog CSV ingestion failure, with 1-based line and column.
class IngestError : public Error {
public:
    IngestError(const std::string& message, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Query against an index or store that cannot be answered (unknown id, radius over budget, ...).
class QueryError : public Error {
public:
    using Error::Error;
};

/// Snapshot I/O, checksum or version failure.
class SnapshotError : public Error {
public:
    using Error::Error;
};

}  // namespace skysearch
