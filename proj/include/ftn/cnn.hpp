#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ftn/llr.hpp"

namespace ftn {

// Hyper-parameters of the simplified CNN function node: two linear
// convolutional layers followed by one dense layer with activation
// a(z) = -max(0, z).
struct CnnHyper {
    int fn1 = 3, fl1 = 8, fs1 = 5;
    int fn2 = 1, fl2 = 3, fs2 = 1;
    double std1 = 0.03;
    double std2 = 0.03;

    void validate() const;
};

inline int conv_out_len(int in_len, int stride) { return (in_len + stride - 1) / stride; }

// Per-iteration parameter set (the message-passing iterations are unfolded;
// each iteration owns independent parameters).
struct CnnIterParams {
    std::vector<double> conv1_w;  // [fn1][fl1] row-major
    std::vector<double> conv1_b;  // [fn1]
    std::vector<double> conv2_w;  // [fn2][fn1][fl2] row-major
    std::vector<double> conv2_b;  // [fn2]
    std::vector<double> dense_w;  // [n][dense_in] row-major
    std::vector<double> dense_b;  // [n]
};

struct CnnModel {
    int n = 0;
    int l_e = 0;
    int m_max = 6;
    CnnHyper hyper;
    std::vector<CnnIterParams> iters;             // size m_max
    std::vector<std::vector<double>> edge_scale;  // [m_max][l_e], coupling scales (1 = unweighted)

    struct Meta {
        uint64_t seed = 0;
        long batches_seen = 0;
        long samples_seen = 0;
        double snr_lo = 0.0, snr_hi = 0.0;
        double rms_decay = 0.9, rms_eps = 1e-8;
    } meta;

    int conv1_out_len() const { return conv_out_len(n, hyper.fs1); }
    int conv2_out_len() const { return conv_out_len(conv1_out_len(), hyper.fs2); }
    int dense_in() const { return conv2_out_len() * hyper.fn2; }
    long parameter_count() const;
};

// Weights ~ truncated normal (cut at +-2 std), biases 0, edge scales 1.
CnnModel init_params(int n, int l_e, int m_max, const CnnHyper& hyper, std::mt19937_64& rng);

// u -> v for one unfolded iteration (0-based index).
LlrBlock cnn_forward(const LlrBlock& u, const CnnModel& model, int iter);

// TF-style symmetric "same" zero padding: left pad for a given length/stride.
inline int same_pad_left(int in_len, int kernel, int stride) {
    int out = conv_out_len(in_len, stride);
    int total = (out - 1) * stride + kernel - in_len;
    if (total < 0) total = 0;
    return total / 2;
}

struct ComplexityRow {
    long additions = 0;
    long lookups = 0;
};

// Per-iteration operation counts.
ComplexityRow complexity_log_map(int n, int l_e);
ComplexityRow complexity_spda(int n, int l_e);
ComplexityRow complexity_dlspda_extra(int n, const CnnHyper& hyper);

// Versioned self-describing text format; round trip is bit-exact.
void save_model(const CnnModel& model, const std::string& path);
CnnModel load_model(const std::string& path);

// Shape check against a configuration; throws with the offending layer named.
void check_model_shape(const CnnModel& model, int n, int l_e, int m_max);

}  // namespace ftn
