#include "ymh/common.hpp"

#include <cmath>

namespace ymh {

namespace {

constexpr std::size_t kLeaf = 8;

template <typename T>
T tree_sum(const T* x, std::size_t n) {
    if (n <= kLeaf) {
        T s{};
        for (std::size_t i = 0; i < n; ++i) s += x[i];
        return s;
    }
    const std::size_t half = n / 2;
    return tree_sum(x, half) + tree_sum(x + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
    return tree_sum(values.data(), values.size());
}

cplx pairwise_sum(std::span<const cplx> values) {
    return tree_sum(values.data(), values.size());
}

double max_abs(std::span<const double> values) {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(std::span<const cplx> values) {
    double m = 0.0;
    for (const cplx& v : values) m = std::max(m, std::abs(v));
    return m;
}

double wrap_angle(double phi) {
    double w = std::remainder(phi, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

}  // namespace ymh
