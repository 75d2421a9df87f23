#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace ftn {

// LLR convention used everywhere: positive favors bit 0 / symbol +1,
// matching x_i = (-1)^{c_i}.
using LlrBlock = std::vector<double>;

inline constexpr double kLlrClip = 50.0;

inline double clip_llr(double v) {
    return std::clamp(v, -kLlrClip, kLlrClip);
}

// log(e^a + e^b), stable
inline double log_add_exp(double a, double b) {
    double hi = std::max(a, b);
    double lo = std::min(a, b);
    if (hi == -std::numeric_limits<double>::infinity()) return hi;
    return hi + std::log1p(std::exp(lo - hi));
}

// max*(a,b) = max(a,b) + log(1 + e^{-|a-b|}); exact log-MAP kernel
inline double max_star(double a, double b) { return log_add_exp(a, b); }

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

// log(1 + e^z), stable
inline double softplus(double z) {
    if (z > 30.0) return z;
    if (z < -30.0) return std::exp(z);
    return std::log1p(std::exp(z));
}

// Q-function via the complementary error function
inline double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline int8_t hard_symbol(double llr) { return llr >= 0.0 ? int8_t{1} : int8_t{-1}; }
inline uint8_t hard_bit(double llr) { return llr >= 0.0 ? uint8_t{0} : uint8_t{1}; }

}  // namespace ftn
