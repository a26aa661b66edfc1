#pragma once

#include <stdexcept>
#include <string>

namespace qrts {

/** Invalid data: broken invariants, schema mismatches, bad parameters. */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Malformed input file; message carries the offending line number. */
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Target unreachable / terminals not in one component. */
class NoRouteError : public std::runtime_error {
public:
    explicit NoRouteError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Instance exceeds a brute-force solver's enforced size cap. */
class TooLargeError : public std::runtime_error {
public:
    explicit TooLargeError(const std::string& msg) : std::runtime_error(msg) {}
};

/** QP solver failed to certify optimality within its iteration cap. */
class QpError : public std::runtime_error {
public:
    QpError(const std::string& msg, double gap, double max_violation)
        : std::runtime_error(msg), gap(gap), max_violation(max_violation) {}
    double gap;
    double max_violation;
};

} // namespace qrts
