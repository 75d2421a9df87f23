#pragma once

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "ftn/pulse.hpp"

namespace ftn {

// Banded symmetric Toeplitz matrix G_{i,j} = g_{i-j}, zero outside the band.
struct GramMatrix {
    int n = 0;
    int band = 0;               // bandwidth (L or L_E)
    std::vector<double> taps;   // g_0..g_band

    double at(int i, int j) const {
        int d = std::abs(i - j);
        return d <= band ? taps[static_cast<size_t>(d)] : 0.0;
    }
    double g(int d) const {
        d = std::abs(d);
        return d <= band ? taps[static_cast<size_t>(d)] : 0.0;
    }

    // y = G x, exploiting the band
    std::vector<double> multiply(const std::vector<double>& x) const;

    // e^T G e restricted to the support of e (band-aware)
    double quadratic_form(const std::vector<double>& e) const;
};

using TruncatedGram = GramMatrix;

GramMatrix build_gram(const IsiProfile& profile, int n);

// Band-L_E copy of G; L_E > band(G) signals invalid truncation.
TruncatedGram truncate_gram(const GramMatrix& g, int l_e);

}  // namespace ftn
