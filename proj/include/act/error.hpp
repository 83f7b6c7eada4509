#pragma once

#include <stdexcept>
#include <string>

namespace act {

/// Base of every engine error. `code()` is a stable machine-readable tag
/// ("graph.unique_key", "pql.syntax", ...) surfaced by the HTTP API.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

#define ACT_DEFINE_ERROR(Name, Code)                                    \
    class Name : public ::act::Error {                                  \
    public:                                                             \
        explicit Name(const std::string& message) : Error(Code, message) {} \
    }

ACT_DEFINE_ERROR(InvalidValue, "value.invalid");
ACT_DEFINE_ERROR(InvalidArgument, "bad_request");
ACT_DEFINE_ERROR(NotFound, "not_found");
ACT_DEFINE_ERROR(UniqueKeyViolation, "graph.unique_key");
ACT_DEFINE_ERROR(DanglingEdge, "graph.dangling_edge");
ACT_DEFINE_ERROR(Precondition, "precondition");

/// Snapshot parse failure; carries the 1-based offending line.
class SnapshotFormatError : public Error {
public:
    SnapshotFormatError(std::size_t line, const std::string& message)
        : Error("snapshot.format",
                "snapshot line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace act
