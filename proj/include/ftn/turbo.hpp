#pragma once

#include <optional>

#include "ftn/convcode.hpp"
#include "ftn/gram.hpp"
#include "ftn/spda.hpp"

namespace ftn {

enum class DetectorKind { Spda, DlSpda, TruncatedBcjr, Threshold };

struct TurboConfig {
    int rho_max = 1;              // Turbo equalization iterations
    DetectorKind kind = DetectorKind::Spda;
    FgConfig fg;                  // n, l_e, inner iterations, sigma2, use_nn
    uint64_t interleaver_seed = 7;

    void validate() const {
        if (rho_max < 1) throw std::invalid_argument("turbo: rho_max must be >= 1");
        fg.validate();
    }
};

// Exact log-MAP over the 2^{L_E}-state Ungerboeck trellis. known, when
// present, pins symbols (+1/-1) at the flagged positions (trellis
// termination); 0 leaves a position free. Returns extrinsic = APP - prior.
// L_E above the memory budget (2^{L_E} states > 2^20) is rejected.
LlrBlock truncated_bcjr_detect(const std::vector<double>& y, const LlrBlock& prior,
                               const TruncatedGram& f, double sigma2,
                               const std::vector<int8_t>* known = nullptr,
                               LlrBlock* app_out = nullptr);

// One full Turbo equalization run over a received block. For the
// truncated-BCJR detector y carries L_E known +1 guard symbols at each end
// (length n + 2*l_e); for SPDA-family detectors y has length n.
// Returns hard info-bit decisions from the decoder APP.
std::vector<uint8_t> turbo_equalize(const std::vector<double>& y, const GramMatrix& gram,
                                    const TurboConfig& cfg, const CnnModel* model = nullptr,
                                    LlrBlock* info_app_out = nullptr);

}  // namespace ftn
