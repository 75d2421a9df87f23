#pragma once

#include <iosfwd>
#include <random>

#include "ftn/channel.hpp"
#include "ftn/cnn.hpp"
#include "ftn/convcode.hpp"
#include "ftn/spda.hpp"
#include "ftn/tape.hpp"

namespace ftn {

// Mutual information between a bit and a consistent-Gaussian LLR of std sigma
// (mean sigma^2/2, variance sigma^2), by numerical integration.
double j_value(double sigma);

// Inverse of j_value by bracketed bisection to |delta I| < 1e-6; I >= 1 rejected.
double j_inverse(double mi);

// Upsilon_i ~ N(x_i * sigma_e^2 / 2, sigma_e^2) for symbols x_i in {+1,-1}.
LlrBlock sample_extrinsic(const std::vector<double>& symbols, double sigma_e,
                          std::mt19937_64& rng);

struct TrainConfig {
    // Table-I hyper-parameters
    double snr_lo = 6.0, snr_hi = 8.0;  // E_b/N_0 range, dB (coded E_b accounting)
    double learning_rate = 0.001;
    int batch_per_snr = 60;             // channel realizations per SNR point per cycle
    int v_factor = 12;                  // compatible factor V
    std::vector<double> omega = {0.2, 0.4, 0.6, 0.8, 1.0};
    double gamma = 0.9;
    int m_max = 6;
    CnnHyper hyper;

    // channel / code configuration
    double tau = 0.6;
    double alpha = 0.3;
    int span = 11;  // L
    int l_e = 2;
    int k_info = 24;  // K; block length N = 2*(K+2)

    long budget_samples = 1000000;
    uint64_t seed = 1;
    uint64_t interleaver_seed = 7;

    int block_length() const { return cc_code_length(k_info); }
    double code_rate() const {
        return static_cast<double>(k_info) / block_length();
    }
    void validate() const;
};

struct TrainingSample {
    LlrBlock combined;            // Psi + Upsilon
    std::vector<double> symbols;  // ground-truth labels as +-1
    double sigma2;                // channel noise variance of the realization
};

// One channel realization expanded into |Omega| * V combined samples.
struct TrainingBatch {
    std::vector<TrainingSample> samples;
};

TrainingBatch build_batch(const TrainConfig& cfg, const FtnChannel& channel,
                          const Interleaver& pi, std::mt19937_64& rng);

// Lambda = sum_m gamma^{m_max - m} F_ce(labels, llr^m); F_ce is the per-bit
// sigmoid cross entropy averaged over the block.
double sigmoid_cross_entropy(const LlrBlock& llr, const std::vector<double>& symbols);
double multi_loss(const std::vector<LlrBlock>& per_iter_llr,
                  const std::vector<double>& symbols, double gamma);

// Flat parameter vector layout: for each iteration m, conv1_w, conv1_b,
// conv2_w, conv2_b, dense_w, dense_b, edge_scale.
std::vector<double> flatten_params(const CnnModel& model);
void unflatten_params(const std::vector<double>& flat, CnnModel& model);

// Records one unfolded forward pass (all m_max iterations plus CNN calls) on
// the tape. Parameters are tape leaves 0..P-1 in flat order; returns the loss
// node. theta[d] = g_d / sigma^2 for d = 1..l_e.
int tape_forward_loss(Tape& tape, const CnnModel& model, const TrainingSample& sample,
                      const std::vector<double>& theta, double gamma);

// Loss value and exact reverse-mode gradients w.r.t. the flat parameters.
// gram supplies the couplings g_d; the sample carries sigma^2.
double loss_and_gradients(const CnnModel& model, const TrainingSample& sample,
                          const GramMatrix& gram, double gamma,
                          std::vector<double>& grad_out);

struct ConvergencePoint {
    long batch_index;
    double avg_loss;  // normalized average over the last 1e3 batches
    double xi_avg;    // current 5e3-batch window average (normalized)
    double xi_cg;     // |(xi^a - xi^{a-1}) / xi^{a-1}|
};

// Fig.-7-style loss bookkeeping: window averages over 5e3 batches, relative
// changes, normalization by the first window.
class ConvergenceMonitor {
public:
    explicit ConvergenceMonitor(long report_every = 1000, long window = 5000);
    void record(double batch_loss);
    const std::vector<ConvergencePoint>& points() const { return points_; }
    const std::vector<double>& xi_avg_series() const { return xi_avg_; }
    const std::vector<double>& xi_cg_series() const { return xi_cg_; }
    bool stable(double threshold = 0.1) const;

private:
    long report_every_, window_;
    long count_ = 0;
    double report_sum_ = 0.0, window_sum_ = 0.0;
    double norm_ = 0.0;  // first-window average (xi^0_avg = 1 after normalization)
    double report_norm_ = 0.0;
    std::vector<double> xi_avg_, xi_cg_;
    std::vector<ConvergencePoint> points_;
};

// Off-line training of the unfolded DL-SPDA with RMSProp. Emits one CSV row
// per 1e3 batches to loss_csv when given (batch_index, avg_loss, xi_avg, xi_cg).
CnnModel train(const TrainConfig& cfg, std::ostream* loss_csv = nullptr,
               ConvergenceMonitor* monitor_out = nullptr);

// Finite-difference sanity check on a small instance; relative error of the
// worst checked parameter. Gates every long training run.
double gradient_check(uint64_t seed, int k_info = 8, int m_max = 2, int n_params = 20);

}  // namespace ftn
