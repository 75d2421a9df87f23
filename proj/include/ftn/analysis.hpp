#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ftn/convcode.hpp"
#include "ftn/gram.hpp"
#include "ftn/llr.hpp"

namespace ftn {

// Error sequence e = x - x', entries in {0, +2, -2}.
struct ErrorSequence {
    std::vector<double> e;

    std::vector<int> support() const;
    int weight() const { return static_cast<int>(support().size()); }
};

struct DistanceTriple {
    double d2 = 0.0;      // e^T G e / (2 E_b)
    double d2_ope = 0.0;  // e^T F e / (2 E_b)
    int weight = 0;
};

DistanceTriple distances(const ErrorSequence& e, const GramMatrix& g,
                         const TruncatedGram& f, double e_b);

// Q(sqrt(d^2 * Eb/N0)); ebn0 is linear, not dB.
double pairwise_error_prob(double d2, double ebn0);

// Theorem-1 lower bound on the residual-ISI variance.
double sigma_rl(const ErrorSequence& e, const GramMatrix& g, const TruncatedGram& f,
                double e_b);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    long samples = 0;
};

// Monte Carlo estimate of sigma^2_R: x fixed to e_j/2 on the support,
// uniform +-1 elsewhere.
MonteCarloEstimate sigma_r_oracle(const ErrorSequence& e, const GramMatrix& g,
                                  const TruncatedGram& f, double e_b,
                                  std::mt19937_64& rng, long samples);

// Lemma-2 pairwise probability with residual-ISI variance sigma2_r.
double finite_tap_error_prob(double d2, double d2_ope, double sigma2_r, double ebn0);

struct BoundConfig {
    int n = 0;             // symbols per block
    int w_max = 8;
    int window = 18;       // enumeration window W
    double e_b = 1.0;
    double rate = 1.0;     // effective rate R (NR = info bits)
    std::vector<double> snr_db;
    long enum_budget = 50'000'000;
    long mc_samples = 200'000;
    int k_prime = 12;      // info length for CC event search
};

// Eq.-(12) union bound for uncoded ML detection; exhaustive enumeration of
// all C(N,w) 2^w error sequences per weight (budget-guarded).
std::vector<double> uncoded_union_bound(const BoundConfig& cfg, const GramMatrix& g);

struct CcErrorEvent {
    int info_weight = 0;   // I_eps
    int length = 0;        // L_eps, trellis steps
    int code_weight = 0;   // W_eps
    std::vector<uint8_t> pattern;  // CC error bits, 2 per trellis step
};

// Single error events of the (7,5) code with code weight <= w_max, found by
// trellis search within k_prime info bits.
std::vector<CcErrorEvent> cc_error_events(int w_max, int k_prime = 12);

struct SpectrumGroup {
    double multiplicity = 0.0;  // D_o (number of placements in the group)
    double d2 = 0.0;
    double d2_ope = 0.0;
    double sigma_rl = 0.0;
    double sigma_rl_spread = 0.0;  // intra-group max deviation (Corollary-1 check)
};

struct DistanceSpectrum {
    int weight = 0;
    int window = 0;
    double total_enumerated = 0.0;  // sum of multiplicities
    double total_possible = 0.0;    // A_eps = C(N,w) 2^w
    bool sampled = false;           // true when the Monte Carlo fallback was used
    long sample_count = 0;
    std::vector<SpectrumGroup> groups;
};

// Distance spectrum of weight-w FTN error sequences with support confined to
// a window of length W. Quadratic forms in a banded Toeplitz G are exactly
// shift invariant, so each anchored shape stands for N - width + 1 placements.
DistanceSpectrum ftn_event_spectrum(int weight, const GramMatrix& g,
                                    const TruncatedGram& f, const BoundConfig& cfg);

// Eq.-(15) coded BER approximation (Eq. (14) is the L_E = L special case).
std::vector<double> coded_bound(const BoundConfig& cfg,
                                const std::vector<CcErrorEvent>& events,
                                const std::vector<DistanceSpectrum>& spectra_by_weight);

// Exhaustive oracles over all 2^N sequences (N <= 20), Ungerboeck metric.
LlrBlock brute_force_map(const std::vector<double>& y, const GramMatrix& g, double sigma2,
                         const LlrBlock& prior);
std::vector<double> brute_force_ml(const std::vector<double>& y, const GramMatrix& g,
                                   double sigma2);

}  // namespace ftn
