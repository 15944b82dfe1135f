#pragma once
#include <stdexcept>
#include <string>

namespace mcm {

// Base class for all failures thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct MOutOfRange : Error {
    explicit MOutOfRange(const std::string& what) : Error(what) {}
};
struct DimsOutOfRange : Error {
    explicit DimsOutOfRange(const std::string& what) : Error(what) {}
};
struct PrecisionOverflow : Error {
    explicit PrecisionOverflow(const std::string& what) : Error(what) {}
};
struct KindMismatch : Error {
    explicit KindMismatch(const std::string& what) : Error(what) {}
};
struct EmptyPointSet : Error {
    explicit EmptyPointSet(const std::string& what) : Error(what) {}
};
struct EmptyRecords : Error {
    explicit EmptyRecords(const std::string& what) : Error(what) {}
};
struct InflationBreaksConvexity : Error {
    explicit InflationBreaksConvexity(const std::string& what) : Error(what) {}
};
struct NonFiniteState : Error {
    explicit NonFiniteState(const std::string& what) : Error(what) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

} // namespace mcm
