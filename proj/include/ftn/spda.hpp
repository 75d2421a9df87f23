#pragma once

#include <optional>

#include "ftn/cnn.hpp"
#include "ftn/gram.hpp"
#include "ftn/llr.hpp"

namespace ftn {

struct FgConfig {
    int n = 0;
    int l_e = 0;       // VN degree: ISI taps per side considered by the graph
    int m_max = 6;     // inner message-passing iterations
    double sigma2 = 1.0;
    bool use_nn = false;

    void validate() const {
        if (n < 1) throw std::invalid_argument("fg: n must be >= 1");
        if (l_e < 0) throw std::invalid_argument("fg: l_e must be >= 0");
        if (m_max < 1) throw std::invalid_argument("fg: m_max must be >= 1");
    }
};

// LLR(T_i) = 2 y_i / sigma^2 for BPSK.
LlrBlock channel_llr(const std::vector<double>& y, double sigma2);

// LLR-domain update of Eq-(7)/(8): q = log[(e^{-t} e^p + e^t)/(e^t e^p + e^{-t})]
// with t = theta * scale, theta = G_{i,j}/sigma^2.
double edge_message(double p_llr, double theta_times_scale);

// Full message state for one block; q/p indexed [i][d] with d encoding the
// offset j-i in {-l_e..-1, 1..l_e}.
struct MessageState {
    int n = 0;
    int l_e = 0;
    std::vector<double> q;  // [n][2*l_e]
    std::vector<double> p;
    LlrBlock u, v, app;     // app = Q

    void reset(int n_, int l_e_);
    int edge_index(int i, int j) const;  // -1 if not a graph edge
};

struct DetectTrace {
    std::vector<LlrBlock> per_iter_app;  // \hat{D}^m for m = 1..m_max
};

// DL-SPDA / SPDA detection. prior = O in LLR domain (decoder extrinsic).
// Returns the extrinsic output o = Q - O (Eq. 5 convention). With
// use_nn = false and unit edge scales this is the conventional SPDA.
LlrBlock spda_detect(const std::vector<double>& y, const LlrBlock& prior,
                     const GramMatrix& gram, const FgConfig& cfg,
                     const CnnModel* model = nullptr, DetectTrace* trace = nullptr);

}  // namespace ftn
