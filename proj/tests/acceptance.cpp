// Acceptance gate: one criterion per invocation (argv[1] in 1..10), one
// PASS/FAIL line on stdout, nonzero exit on failure.
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "ftn/analysis.hpp"
#include "ftn/harness.hpp"
#include "ftn/trainer.hpp"

using namespace ftn;

namespace {

GramMatrix make_gram(int n, double tau, int span = 11, double alpha = 0.3) {
    PulseSpec pulse{1.0, alpha, tau, span};
    return build_gram(isi_taps(pulse), n);
}

bool report(int criterion, bool ok, const std::string& detail) {
    std::printf("criterion %d: %s — %s\n", criterion, ok ? "PASS" : "FAIL", detail.c_str());
    return ok;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// --- 1: orthogonal signaling reduces to the matched-filter bound ------------

bool criterion1() {
    ExperimentConfig cfg;
    cfg.tau = 1.0;
    cfg.coded = false;
    cfg.kind = DetectorKind::Threshold;
    cfg.n = 250;
    cfg.snr_db = {0.0, 2.0, 4.0, 6.0};
    cfg.max_blocks = 400;  // 1e5 bits per point
    cfg.min_block_errors = 1000000;
    std::vector<BerRecord> rec = run_ber_sweep(cfg);
    bool ok = true;
    double worst = 0.0;
    for (const BerRecord& r : rec) {
        double ebn0 = std::pow(10.0, r.snr_db / 10.0);
        double p = q_func(std::sqrt(2.0 * ebn0));
        double se = std::sqrt(p * (1.0 - p) / r.bits);
        double z = std::abs(r.ber - p) / se;
        worst = std::max(worst, z);
        ok = ok && z <= 3.0 && r.bits >= 100000;
    }
    return report(1, ok, fmt("threshold BER vs Q(sqrt(2 Eb/N0)), worst |z| = %.2f (limit 3)", worst));
}

// --- 2: exactness oracles ---------------------------------------------------

double exhaustive_cc_app_error(std::mt19937_64& rng, bool with_prior) {
    const int k = 8, n = cc_code_length(k);
    std::normal_distribution<double> gauss;
    LlrBlock llr(static_cast<size_t>(n));
    for (auto& v : llr) v = 2.0 * gauss(rng);
    LlrBlock prior;
    if (with_prior) {
        prior.resize(static_cast<size_t>(k));
        for (auto& v : prior) v = gauss(rng);
    }
    double neg_inf = -std::numeric_limits<double>::infinity();
    LlrBlock num(static_cast<size_t>(k), neg_inf), den(static_cast<size_t>(k), neg_inf);
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<uint8_t> info(static_cast<size_t>(k));
        for (int i = 0; i < k; ++i) info[static_cast<size_t>(i)] = (mask >> i) & 1;
        std::vector<uint8_t> code = cc_encode(info);
        double metric = 0.0;
        for (int j = 0; j < n; ++j)
            metric += (code[static_cast<size_t>(j)] ? -0.5 : 0.5) * llr[static_cast<size_t>(j)];
        if (with_prior)
            for (int i = 0; i < k; ++i)
                metric += (info[static_cast<size_t>(i)] ? -0.5 : 0.5) * prior[static_cast<size_t>(i)];
        for (int i = 0; i < k; ++i) {
            double& acc = info[static_cast<size_t>(i)] ? den[static_cast<size_t>(i)]
                                                       : num[static_cast<size_t>(i)];
            acc = acc == neg_inf ? metric : log_add_exp(acc, metric);
        }
    }
    BcjrResult res = cc_bcjr_decode(llr, prior);
    double worst = 0.0;
    for (int i = 0; i < k; ++i)
        worst = std::max(worst, std::abs(res.info_app[static_cast<size_t>(i)] -
                                         (num[static_cast<size_t>(i)] - den[static_cast<size_t>(i)])));
    return worst;
}

bool criterion2() {
    std::mt19937_64 rng(202);
    std::normal_distribution<double> gauss;
    std::bernoulli_distribution coin(0.5);

    double worst_a = 0.0;
    for (int trial = 0; trial < 25; ++trial)
        worst_a = std::max(worst_a, exhaustive_cc_app_error(rng, trial % 2 == 0));

    GramMatrix g10 = make_gram(10, 0.7, 3);
    FtnChannel ch10(g10);
    double worst_b = 0.0;
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> x(10);
        for (auto& v : x) v = coin(rng) ? 1.0 : -1.0;
        std::vector<double> y = ch10.transmit(x, 0.4, rng);
        LlrBlock prior(10);
        for (auto& v : prior) v = 0.7 * gauss(rng);
        LlrBlock app;
        truncated_bcjr_detect(y, prior, g10, 0.4, nullptr, &app);
        LlrBlock ref = brute_force_map(y, g10, 0.4, prior);
        for (int i = 0; i < 10; ++i)
            worst_b = std::max(worst_b, std::abs(clip_llr(app[static_cast<size_t>(i)]) -
                                                 clip_llr(ref[static_cast<size_t>(i)])));
    }

    GramMatrix g2 = make_gram(2, 0.8, 3);
    FtnChannel ch2(g2);
    double worst_c = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x = {coin(rng) ? 1.0 : -1.0, coin(rng) ? 1.0 : -1.0};
        std::vector<double> y = ch2.transmit(x, 0.5, rng);
        LlrBlock prior = {gauss(rng), gauss(rng)};
        FgConfig fg{2, 1, 60, 0.5, false};
        LlrBlock ext = spda_detect(y, prior, g2, fg);
        LlrBlock ref = brute_force_map(y, g2, 0.5, prior);
        for (int i = 0; i < 2; ++i)
            worst_c = std::max(worst_c, std::abs(clip_llr(ext[static_cast<size_t>(i)] +
                                                          prior[static_cast<size_t>(i)]) -
                                                 clip_llr(ref[static_cast<size_t>(i)])));
    }

    bool ok = worst_a <= 1e-9 && worst_b <= 1e-6 && worst_c <= 1e-6;
    return report(2, ok,
                  fmt("cc log-MAP %.2e (<=1e-9), truncated BCJR %.2e (<=1e-6), "
                      "SPDA N=2 %.2e (<=1e-6)",
                      worst_a, worst_b, worst_c));
}

// --- 3: residual-ISI variance lower bound and grouping ----------------------

bool criterion3() {
    std::mt19937_64 rng(303);
    const int n = 40;
    long checked = 0, violations = 0;
    double worst_spread = 0.0;
    for (double tau : {0.5, 0.6}) {
        GramMatrix g = make_gram(n, tau);
        for (int l_e : {2, 3}) {
            TruncatedGram f = truncate_gram(g, l_e);
            std::uniform_int_distribution<int> posd(0, n - 1), wd(1, 8);
            std::bernoulli_distribution coin(0.5);
            for (int trial = 0; trial < 250; ++trial) {
                ErrorSequence e;
                e.e.assign(static_cast<size_t>(n), 0.0);
                int w = wd(rng);
                for (int j = 0; j < w; ++j)
                    e.e[static_cast<size_t>(posd(rng))] = coin(rng) ? 2.0 : -2.0;
                double lb = sigma_rl(e, g, f, 1.0);
                MonteCarloEstimate est = sigma_r_oracle(e, g, f, 1.0, rng, 4000);
                checked += 1;
                if (lb > est.mean + 3.0 * est.stderr_ + 1e-12) violations += 1;
            }
            BoundConfig cfg;
            cfg.n = n;
            cfg.window = 12;
            for (int w : {5, 6}) {
                DistanceSpectrum spec = ftn_event_spectrum(w, g, f, cfg);
                for (const SpectrumGroup& grp : spec.groups)
                    worst_spread = std::max(worst_spread, grp.sigma_rl_spread);
            }
        }
    }
    bool ok = violations == 0 && checked == 1000 && worst_spread < 1e-12;
    return report(3, ok,
                  fmt("%ld/%ld sequences within 3 stderr, worst group spread %.2e (<1e-12)",
                      checked - violations, checked, worst_spread));
}

// --- 4: uncoded union bound vs brute-force ML -------------------------------

bool criterion4() {
    const int n = 10;
    GramMatrix g = make_gram(n, 0.7);
    FtnChannel ch(g);
    BoundConfig cfg;
    cfg.n = n;
    cfg.w_max = n;
    cfg.window = n;
    cfg.snr_db = {3.0, 5.0, 7.0};
    std::vector<double> bound = uncoded_union_bound(cfg, g);

    std::mt19937_64 rng(404);
    std::bernoulli_distribution coin(0.5);
    bool ok = true;
    std::string detail;
    for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
        double sigma2 = std::pow(10.0, -cfg.snr_db[s] / 10.0) / 2.0;
        long bits = 0, errs = 0;
        while (errs < 400 && bits < 4000000) {
            std::vector<double> x(static_cast<size_t>(n));
            for (auto& v : x) v = coin(rng) ? 1.0 : -1.0;
            std::vector<double> y = ch.transmit(x, sigma2, rng);
            std::vector<double> xh = brute_force_ml(y, g, sigma2);
            for (int i = 0; i < n; ++i) errs += xh[static_cast<size_t>(i)] != x[static_cast<size_t>(i)];
            bits += n;
        }
        double ber = static_cast<double>(errs) / bits;
        double se = std::sqrt(ber * (1.0 - ber) / bits);
        ok = ok && errs >= 100 && ber <= bound[s] + 3.0 * se;
        if (cfg.snr_db[s] == 7.0) ok = ok && ber >= 0.5 * bound[s];
        detail += fmt("%s%.0fdB sim %.3e bound %.3e", s ? "; " : "", cfg.snr_db[s], ber, bound[s]);
    }
    return report(4, ok, detail);
}

// --- 5: coded bound consistency and effective rates -------------------------

bool criterion5() {
    const int n = 250;
    GramMatrix g = make_gram(n, 0.6);
    BoundConfig cfg;
    cfg.n = n;
    cfg.w_max = 8;
    cfg.window = 14;
    cfg.rate = 123.0 / 250.0;
    cfg.e_b = 1.0 / cfg.rate;
    cfg.snr_db = {4.0, 6.0, 8.0};
    std::vector<CcErrorEvent> events = cc_error_events(cfg.w_max);
    std::vector<DistanceSpectrum> spectra;
    for (int w = 5; w <= cfg.w_max; ++w) spectra.push_back(ftn_event_spectrum(w, g, g, cfg));

    // full-tap reference built termwise from Lemma 1, independent of the
    // sigma_R machinery the general expression routes through
    std::vector<double> general = coded_bound(cfg, events, spectra);
    std::vector<double> direct(cfg.snr_db.size(), 0.0);
    double info_bits = n * cfg.rate;
    for (const CcErrorEvent& ev : events) {
        const DistanceSpectrum& spec = spectra[static_cast<size_t>(ev.code_weight - 5)];
        double placements = std::floor(info_bits - ev.length + 1.0);
        if (placements <= 0.0) continue;
        double prefix = placements * ev.info_weight / info_bits;
        for (const SpectrumGroup& grp : spec.groups)
            for (size_t s = 0; s < cfg.snr_db.size(); ++s)
                direct[s] += prefix * grp.multiplicity / spec.total_possible *
                             pairwise_error_prob(grp.d2, std::pow(10.0, cfg.snr_db[s] / 10.0));
    }
    double worst = 0.0;
    for (size_t s = 0; s < general.size(); ++s)
        worst = std::max(worst, std::abs(general[s] - direct[s]) / direct[s]);

    ExperimentConfig spda_cfg;  // defaults: coded SPDA, n = 250
    ExperimentConfig bcjr_cfg;
    bcjr_cfg.kind = DetectorKind::TruncatedBcjr;
    bcjr_cfg.l_e = 7;  // 123 info bits over 264 symbols with guards
    double r1 = spda_cfg.rate(), r2 = bcjr_cfg.rate();
    bool ok = worst < 1e-12 && std::abs(r1 - 0.492) < 5e-4 && std::abs(r2 - 0.466) < 5e-4;
    return report(5, ok,
                  fmt("full-tap collapse rel err %.2e (<1e-12), rates %.4f / %.4f", worst, r1, r2));
}

// --- 6: reverse-mode gradients ----------------------------------------------

bool criterion6() {
    double err = gradient_check(2026, 8, 2, 50);
    return report(6, err < 1e-4, fmt("worst relative gradient error %.2e (<1e-4)", err));
}

// --- 7: compatible-training statistics --------------------------------------

bool criterion7() {
    std::mt19937_64 rng(707);
    std::bernoulli_distribution coin(0.5);
    const int n = 200000;
    bool ok = true;
    std::string detail;
    for (double omega : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        double target = std::min(omega, 0.9999);
        double sigma = j_inverse(target);
        std::vector<double> symbols(static_cast<size_t>(n));
        for (auto& s : symbols) s = coin(rng) ? 1.0 : -1.0;
        LlrBlock llr = sample_extrinsic(symbols, sigma, rng);
        double mean = 0.0, mi = 0.0;
        for (int i = 0; i < n; ++i) {
            double c = symbols[static_cast<size_t>(i)] * llr[static_cast<size_t>(i)];
            mean += c;
            mi += std::log2(1.0 + std::exp(-c));
        }
        mean /= n;
        mi = 1.0 - mi / n;
        double se = sigma / std::sqrt(static_cast<double>(n));
        ok = ok && std::abs(mean - sigma * sigma / 2.0) < 5.0 * se && std::abs(mi - omega) < 0.02;
        detail += fmt("%sI(%.1f)=%.3f", detail.empty() ? "" : " ", omega, mi);
    }
    double worst_rt = 0.0;
    for (double mi = 0.02; mi < 0.999; mi += 0.02)
        worst_rt = std::max(worst_rt, std::abs(j_value(j_inverse(mi)) - mi));
    ok = ok && worst_rt < 1e-3;
    return report(7, ok, detail + fmt(", J round trip %.1e (<1e-3)", worst_rt));
}

// --- 8: zeroed network reduces to the conventional detector -----------------

bool criterion8() {
    const int n = 52, l_e = 2, m_max = 6;
    GramMatrix g = make_gram(n, 0.6);
    FtnChannel ch(g);
    std::mt19937_64 rng(808);
    CnnModel model = init_params(n, l_e, m_max, CnnHyper{}, rng);
    for (auto& it : model.iters) {
        std::fill(it.conv1_w.begin(), it.conv1_w.end(), 0.0);
        std::fill(it.conv2_w.begin(), it.conv2_w.end(), 0.0);
        std::fill(it.dense_w.begin(), it.dense_w.end(), 0.0);
        std::fill(it.conv1_b.begin(), it.conv1_b.end(), 0.0);
        std::fill(it.conv2_b.begin(), it.conv2_b.end(), 0.0);
        std::fill(it.dense_b.begin(), it.dense_b.end(), 0.0);
    }
    for (auto& row : model.edge_scale) std::fill(row.begin(), row.end(), 1.0);

    std::bernoulli_distribution coin(0.5);
    std::normal_distribution<double> gauss;
    long mismatches = 0;
    for (int blk = 0; blk < 1000; ++blk) {
        std::vector<double> x(static_cast<size_t>(n));
        for (auto& v : x) v = coin(rng) ? 1.0 : -1.0;
        std::vector<double> y = ch.transmit(x, 0.3, rng);
        LlrBlock prior(static_cast<size_t>(n));
        for (auto& v : prior) v = 0.5 * gauss(rng);
        FgConfig plain{n, l_e, m_max, 0.3, false};
        FgConfig nn = plain;
        nn.use_nn = true;
        DetectTrace ta, tb;
        LlrBlock a = spda_detect(y, prior, g, plain, nullptr, &ta);
        LlrBlock b = spda_detect(y, prior, g, nn, &model, &tb);
        if (a != b) mismatches += 1;
        for (int m = 0; m < m_max && mismatches == 0; ++m)
            if (ta.per_iter_app[static_cast<size_t>(m)] != tb.per_iter_app[static_cast<size_t>(m)])
                mismatches += 1;
    }
    return report(8, mismatches == 0,
                  fmt("%ld/1000 blocks bitwise identical incl. per-iteration traces",
                      1000 - mismatches));
}

// --- 9: trained network does not hurt (directional, desk scale) -------------

bool criterion9() {
    TrainConfig tcfg;  // tau 0.6, L_E 2, K 24, Table-I hyper-parameters
    tcfg.seed = 11;
    tcfg.budget_samples = 1000000;
    CnnModel model = train(tcfg);
    std::string path = "acceptance9_model.bin";
    save_model(model, path);

    ExperimentConfig eval;
    eval.n = tcfg.block_length();
    eval.l_e = tcfg.l_e;
    eval.rho_max = 3;
    eval.inner_iter = tcfg.m_max;
    eval.snr_db = {4.5};
    eval.min_block_errors = 100;
    eval.max_blocks = 2000000;
    eval.seed = 2024;

    ExperimentConfig dl = eval;
    dl.kind = DetectorKind::DlSpda;
    dl.model_path = path;
    BerRecord spda = run_ber_sweep(eval)[0];
    BerRecord dlspda = run_ber_sweep(dl)[0];
    std::remove(path.c_str());

    auto ci = [](const BerRecord& r) {
        double half = 1.96 * std::sqrt(r.ber * (1.0 - r.ber) / r.bits);
        return std::pair<double, double>{r.ber - half, r.ber + half};
    };
    auto [dl_lo, dl_hi] = ci(dlspda);
    auto [sp_lo, sp_hi] = ci(spda);
    bool enough = spda.block_errors >= 100 && dlspda.block_errors >= 100;
    bool better = dlspda.ber <= spda.ber;
    bool tie = dl_lo <= sp_hi && sp_lo <= dl_hi;  // overlapping 95% intervals
    bool ok = enough && (better || tie);
    return report(9, ok,
                  fmt("at 4.5 dB: trained %.3e (%ld blk err) vs conventional %.3e (%ld blk err)%s",
                      dlspda.ber, dlspda.block_errors, spda.ber, spda.block_errors,
                      better ? "" : (tie ? " [tie]" : "")));
}

// --- 10: error floor of severe tap truncation -------------------------------

bool criterion10() {
    ExperimentConfig base;
    base.tau = 0.5;
    base.span = 5;
    base.coded = false;
    base.kind = DetectorKind::TruncatedBcjr;
    base.n = 250;
    base.snr_db = {8.0, 12.0};
    base.min_block_errors = 1000000;  // run on bit-error budget below

    auto sweep = [&](int l_e, long blocks) {
        ExperimentConfig cfg = base;
        cfg.l_e = l_e;
        cfg.max_blocks = blocks;
        return run_ber_sweep(cfg);
    };
    std::vector<BerRecord> trunc = sweep(1, 60);
    std::vector<BerRecord> full = sweep(5, 24000);
    double r_trunc = trunc[1].ber / trunc[0].ber;
    double r_full = full[1].ber / full[0].ber;
    bool enough = trunc[0].bit_errors >= 100 && trunc[1].bit_errors >= 100 &&
                  full[0].bit_errors >= 100 && full[1].bit_errors >= 100;
    bool ok = enough && r_trunc > 0.5 && r_full < 0.1;
    return report(10, ok,
                  fmt("BER(12)/BER(8): one-tap %.2f (>0.5), full-tap %.3f (<0.1)", r_trunc, r_full));
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <criterion 1..10>\n");
        return 2;
    }
    int c = std::atoi(argv[1]);
    bool ok = false;
    switch (c) {
        case 1: ok = criterion1(); break;
        case 2: ok = criterion2(); break;
        case 3: ok = criterion3(); break;
        case 4: ok = criterion4(); break;
        case 5: ok = criterion5(); break;
        case 6: ok = criterion6(); break;
        case 7: ok = criterion7(); break;
        case 8: ok = criterion8(); break;
        case 9: ok = criterion9(); break;
        case 10: ok = criterion10(); break;
        default:
            std::fprintf(stderr, "unknown criterion %d\n", c);
            return 2;
    }
    return ok ? 0 : 1;
}
