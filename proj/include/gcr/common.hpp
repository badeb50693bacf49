#ifndef GCR_COMMON_HPP
#define GCR_COMMON_HPP

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gcr {

/// Encoding of an infeasible premium / empty frontier. Ordered above every
/// real, absorbed by addition, dropped by minima: min(infeasible(), x) == x.
inline constexpr double infeasible() { return std::numeric_limits<double>::infinity(); }

inline bool is_infeasible(double v) { return std::isinf(v) && v > 0; }

class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data (negative weights, index out of range, length mismatch).
class validation_error : public error {
public:
    using error::error;
};

/// An enumeration or table would exceed its configured budget.
class size_error : public error {
public:
    using error::error;
};

/// A table is missing an entry that the computation reached.
class structural_error : public error {
public:
    using error::error;
};

/// Config file problems (unknown key, type mismatch, invariant violation).
class config_error : public error {
public:
    using error::error;
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw validation_error(msg);
}

} // namespace detail

} // namespace gcr

#endif // GCR_COMMON_HPP
