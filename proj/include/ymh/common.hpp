#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

namespace ymh {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Error hierarchy. Callers that only care about "something went wrong"
// catch ymh::Error; the CLI maps the subclasses onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad arguments, inconsistent shapes, invalid configuration.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// NaN/Inf, divergence, failed solves, non-bracketing shooting intervals.
class NumericError : public Error {
public:
    using Error::Error;
};

// Fixed-order pairwise summation. The tree shape depends only on the
// length of the input, so results are bit-reproducible.
double pairwise_sum(std::span<const double> values);
cplx pairwise_sum(std::span<const cplx> values);

// Maximum of |x| over a span (0 for empty input).
double max_abs(std::span<const double> values);
double max_abs(std::span<const cplx> values);

// Wrap an angle to (-pi, pi].
double wrap_angle(double phi);

}  // namespace ymh
