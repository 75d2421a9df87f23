#pragma once

#include <iosfwd>
#include <string>

#include "ftn/channel.hpp"
#include "ftn/turbo.hpp"

namespace ftn {

struct ExperimentConfig {
    double tau = 0.6;
    double alpha = 0.3;
    int span = 11;   // L
    int l_e = 3;
    int n = 250;     // coded: codeword length (block symbols); uncoded: symbols
    bool coded = true;
    DetectorKind kind = DetectorKind::Spda;
    int rho_max = 6;      // Turbo iterations (coded runs)
    int inner_iter = 6;   // message-passing iterations per detector call
    std::vector<double> snr_db;  // E_b/N_0 grid; +inf = noiseless sanity point
    long max_blocks = 1'000'000;
    long min_block_errors = 100;
    uint64_t seed = 1;
    uint64_t interleaver_seed = 7;
    std::string model_path;  // required for DL-SPDA

    int guard() const { return kind == DetectorKind::TruncatedBcjr ? l_e : 0; }
    int info_bits() const { return coded ? n / 2 - 2 : n; }
    // effective rate: info bits per transmitted symbol (guards included)
    double rate() const { return static_cast<double>(info_bits()) / (n + 2 * guard()); }
    void validate() const;
};

struct BerRecord {
    double snr_db = 0.0;
    long bits = 0;
    long bit_errors = 0;
    long blocks = 0;
    long block_errors = 0;
    double ber = 0.0;
    double runtime_s = 0.0;
    bool censored = false;  // stopped at max_blocks before min_block_errors
};

// Monte Carlo BER sweep. Deterministic for a given seed: each block draws
// from its own counter-based RNG stream, so block order (or parallel
// scheduling) cannot change the counts. When csv is given, the resolved
// config goes out as '#' header lines followed by one row per SNR point,
// emitted incrementally; censored points are flagged on a trailing comment.
std::vector<BerRecord> run_ber_sweep(const ExperimentConfig& cfg, std::ostream* csv = nullptr);

}  // namespace ftn
