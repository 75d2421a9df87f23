#pragma once

#include <random>
#include <vector>

#include "ftn/gram.hpp"

namespace ftn {

// Colored-noise FTN channel: y = G x + eta with E[eta eta^T] = sigma^2 G.
// The noise shaper is the symmetric square root of G after clamping negative
// eigenvalues to zero (band truncation can make G slightly indefinite).
class FtnChannel {
public:
    explicit FtnChannel(const GramMatrix& gram);

    const GramMatrix& gram() const { return gram_; }

    // Magnitude of the most negative eigenvalue that was clamped (0 if PSD).
    double clamp_magnitude() const { return clamp_magnitude_; }

    // sigma2 < 0 rejected; sigma2 = 0 gives y = G x exactly.
    std::vector<double> transmit(const std::vector<double>& x, double sigma2,
                                 std::mt19937_64& rng) const;

    std::vector<double> sample_noise(double sigma2, std::mt19937_64& rng) const;

private:
    GramMatrix gram_;
    std::vector<double> sqrt_dense_;  // row-major n x n symmetric square root
    double clamp_magnitude_ = 0.0;
};

std::vector<double> bpsk_modulate(const std::vector<uint8_t>& bits);

}  // namespace ftn
