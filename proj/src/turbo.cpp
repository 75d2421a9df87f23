#include "ftn/turbo.hpp"

#include <cmath>
#include <limits>

namespace ftn {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

LlrBlock truncated_bcjr_detect(const std::vector<double>& y, const LlrBlock& prior,
                               const TruncatedGram& f, double sigma2,
                               const std::vector<int8_t>* known, LlrBlock* app_out) {
    if (sigma2 <= 0.0) throw std::invalid_argument("truncated_bcjr: sigma2 must be > 0");
    int len = static_cast<int>(y.size());
    if (static_cast<int>(prior.size()) != len)
        throw std::invalid_argument("truncated_bcjr: prior length mismatch");
    if (known && static_cast<int>(known->size()) != len)
        throw std::invalid_argument("truncated_bcjr: known-mask length mismatch");
    int l_e = f.band;
    if (l_e > 20)
        throw std::invalid_argument("truncated_bcjr: 2^L_E states exceed the memory budget");
    int num_states = 1 << l_e;

    // state bit k = 1 means symbol -1 at lag k+1
    auto lag_symbol = [&](int state, int lag) {
        return (state >> (lag - 1)) & 1 ? -1.0 : 1.0;
    };

    std::vector<double> alpha(static_cast<size_t>(len + 1) * num_states, kNegInf);
    std::vector<double> beta(static_cast<size_t>(len + 1) * num_states, kNegInf);
    auto al = [&](int t, int s) -> double& { return alpha[static_cast<size_t>(t) * num_states + s]; };
    auto be = [&](int t, int s) -> double& { return beta[static_cast<size_t>(t) * num_states + s]; };
    al(0, 0) = 0.0;  // dummy history is all +1; only the actual past branches out
    for (int s = 0; s < num_states; ++s) be(len, s) = 0.0;

    auto gamma = [&](int t, int state, double x) {
        double isi = 0.0;
        int max_lag = std::min(t, l_e);  // lags beyond the block start do not exist
        for (int lag = 1; lag <= max_lag; ++lag) isi += f.g(lag) * lag_symbol(state, lag);
        double m = x * (y[static_cast<size_t>(t)] - isi) / sigma2;
        m += 0.5 * x * prior[static_cast<size_t>(t)];
        return m;
    };
    auto allowed = [&](int t, double x) {
        if (!known) return true;
        int8_t k = (*known)[static_cast<size_t>(t)];
        return k == 0 || (k > 0) == (x > 0.0);
    };
    auto next_state = [&](int state, double x) {
        int s = (state << 1) | (x < 0.0 ? 1 : 0);
        return s & (num_states - 1);
    };

    for (int t = 0; t < len; ++t) {
        for (int s = 0; s < num_states; ++s) {
            if (al(t, s) == kNegInf) continue;
            for (double x : {1.0, -1.0}) {
                if (!allowed(t, x)) continue;
                double cand = al(t, s) + gamma(t, s, x);
                double& tgt = al(t + 1, next_state(s, x));
                tgt = tgt == kNegInf ? cand : max_star(tgt, cand);
            }
        }
    }
    for (int t = len - 1; t >= 0; --t) {
        for (int s = 0; s < num_states; ++s) {
            for (double x : {1.0, -1.0}) {
                if (!allowed(t, x)) continue;
                int ns = next_state(s, x);
                if (be(t + 1, ns) == kNegInf) continue;
                double cand = be(t + 1, ns) + gamma(t, s, x);
                double& tgt = be(t, s);
                tgt = tgt == kNegInf ? cand : max_star(tgt, cand);
            }
        }
    }

    LlrBlock extrinsic(static_cast<size_t>(len), 0.0);
    if (app_out) app_out->assign(static_cast<size_t>(len), 0.0);
    for (int t = 0; t < len; ++t) {
        double num = kNegInf, den = kNegInf;
        for (int s = 0; s < num_states; ++s) {
            if (al(t, s) == kNegInf) continue;
            for (double x : {1.0, -1.0}) {
                if (!allowed(t, x)) continue;
                int ns = next_state(s, x);
                if (be(t + 1, ns) == kNegInf) continue;
                double metric = al(t, s) + gamma(t, s, x) + be(t + 1, ns);
                double& acc = x > 0.0 ? num : den;
                acc = acc == kNegInf ? metric : max_star(acc, metric);
            }
        }
        double app;
        if (den == kNegInf) app = kLlrClip;
        else if (num == kNegInf) app = -kLlrClip;
        else app = num - den;
        if (app_out) (*app_out)[static_cast<size_t>(t)] = app;
        extrinsic[static_cast<size_t>(t)] = app - prior[static_cast<size_t>(t)];
    }
    return extrinsic;
}

std::vector<uint8_t> turbo_equalize(const std::vector<double>& y, const GramMatrix& gram,
                                    const TurboConfig& cfg, const CnnModel* model,
                                    LlrBlock* info_app_out) {
    cfg.validate();
    int n = cfg.fg.n;
    int guard = cfg.kind == DetectorKind::TruncatedBcjr ? cfg.fg.l_e : 0;
    int len = n + 2 * guard;
    if (static_cast<int>(y.size()) != len)
        throw std::invalid_argument("turbo_equalize: received length mismatch");
    if (gram.n != len) throw std::invalid_argument("turbo_equalize: gram size mismatch");
    if (cfg.kind == DetectorKind::DlSpda && model == nullptr)
        throw std::invalid_argument("turbo_equalize: DL-SPDA requires a model");

    Interleaver pi(n, cfg.interleaver_seed);
    std::vector<int8_t> known;
    TruncatedGram trunc;
    if (cfg.kind == DetectorKind::TruncatedBcjr) {
        known.assign(static_cast<size_t>(len), 0);
        for (int i = 0; i < guard; ++i) {
            known[static_cast<size_t>(i)] = 1;
            known[static_cast<size_t>(len - 1 - i)] = 1;
        }
        trunc = truncate_gram(gram, cfg.fg.l_e);
    }

    LlrBlock prior(static_cast<size_t>(n), 0.0);  // on interleaved code symbols
    BcjrResult dec;
    for (int rho = 0; rho < cfg.rho_max; ++rho) {
        LlrBlock det_ext(static_cast<size_t>(n), 0.0);
        switch (cfg.kind) {
            case DetectorKind::Spda:
            case DetectorKind::DlSpda: {
                FgConfig fg = cfg.fg;
                fg.use_nn = cfg.kind == DetectorKind::DlSpda;
                det_ext = spda_detect(y, prior, gram, fg,
                                      fg.use_nn ? model : nullptr);
                break;
            }
            case DetectorKind::TruncatedBcjr: {
                LlrBlock full_prior(static_cast<size_t>(len), 0.0);
                for (int i = 0; i < n; ++i)
                    full_prior[static_cast<size_t>(i + guard)] = prior[static_cast<size_t>(i)];
                LlrBlock full_ext =
                    truncated_bcjr_detect(y, full_prior, trunc, cfg.fg.sigma2, &known);
                for (int i = 0; i < n; ++i)
                    det_ext[static_cast<size_t>(i)] = full_ext[static_cast<size_t>(i + guard)];
                break;
            }
            case DetectorKind::Threshold: {
                det_ext = channel_llr(y, cfg.fg.sigma2);
                break;
            }
        }
        LlrBlock code_llr = pi.deinterleave(det_ext);
        dec = cc_bcjr_decode(code_llr, {});
        prior = pi.interleave(dec.code_extrinsic);
    }

    if (info_app_out) *info_app_out = dec.info_app;
    std::vector<uint8_t> bits(dec.info_app.size());
    for (size_t i = 0; i < bits.size(); ++i) bits[i] = hard_bit(dec.info_app[i]);
    return bits;
}

}  // namespace ftn
