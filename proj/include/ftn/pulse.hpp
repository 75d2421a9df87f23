#pragma once

#include <stdexcept>
#include <vector>

namespace ftn {

// Root-raised-cosine pulse description. T is normalized to 1 throughout.
struct PulseSpec {
    double symbol_period = 1.0;  // T
    double rolloff = 0.3;        // alpha in [0,1]
    double tau = 1.0;            // acceleration factor in (0,1]
    int tap_span = 11;           // L, one-sided count of significant taps

    void validate() const {
        if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in (0,1]");
        if (!(rolloff >= 0.0 && rolloff <= 1.0)) throw std::invalid_argument("rolloff must be in [0,1]");
        if (tap_span < 0) throw std::invalid_argument("tap_span must be >= 0");
        if (!(symbol_period > 0.0)) throw std::invalid_argument("symbol_period must be > 0");
    }
};

// One-sided ISI taps g_0..g_L of a unit-energy pulse; g_{-i} = g_i.
struct IsiProfile {
    int span = 0;
    std::vector<double> taps;  // size span+1, taps[0] = g_0 = 1

    double g(int i) const {
        int d = i < 0 ? -i : i;
        return d <= span ? taps[static_cast<size_t>(d)] : 0.0;
    }
};

// Raised-cosine pulse value (the autocorrelation of a unit-energy RRC pulse).
// Handles the t = T/(2 alpha) singularity by its limit.
double raised_cosine(double t, double alpha, double symbol_period = 1.0);

// Root-raised-cosine impulse response (unit energy). Used by the quadrature
// oracle in tests; the main tap path uses the closed form above.
double rrc_pulse(double t, double alpha, double symbol_period = 1.0);

// g_i = raised-cosine autocorrelation sampled at i*tau*T.
IsiProfile isi_taps(const PulseSpec& pulse);

}  // namespace ftn
