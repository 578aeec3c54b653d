#pragma once

#include <stdexcept>
#include <string>

namespace conehedge {

// Base class for every error this library raises on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class NonPositiveMid : public Error {
public:
    explicit NonPositiveMid(const std::string& msg) : Error(msg) {}
};

class SpreadNotGreaterThanOne : public Error {
public:
    explicit SpreadNotGreaterThanOne(const std::string& msg) : Error(msg) {}
};

class IntervalViolatesSpreadBounds : public Error {
public:
    explicit IntervalViolatesSpreadBounds(const std::string& msg) : Error(msg) {}
};

class SliceCoordinateNotOne : public Error {
public:
    explicit SliceCoordinateNotOne(const std::string& msg) : Error(msg) {}
};

class EmptyInteriorGrid : public Error {
public:
    explicit EmptyInteriorGrid(const std::string& msg) : Error(msg) {}
};

class GridMissingVertices : public Error {
public:
    explicit GridMissingVertices(const std::string& msg) : Error(msg) {}
};

class UnsupportedShape : public Error {
public:
    explicit UnsupportedShape(const std::string& msg) : Error(msg) {}
};

class SpecParseError : public Error {
public:
    explicit SpecParseError(const std::string& msg) : Error(msg) {}
};

class NAViolated : public Error {
public:
    explicit NAViolated(const std::string& msg) : Error(msg) {}
};

// Internal invariant breach (a certificate failed to re-verify).  Raised
// instead of ever returning an unverified verdict.
class LpError : public Error {
public:
    explicit LpError(const std::string& msg) : Error(msg) {}
};

}  // namespace conehedge
