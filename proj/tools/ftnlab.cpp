// ftnlab: command-line surface for the FTN signaling laboratory.
// Exit codes: 0 success, 2 usage, 3 config, 4 model, 5 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "ftn/analysis.hpp"
#include "ftn/harness.hpp"
#include "ftn/trainer.hpp"
#include "ftn/turbo.hpp"

namespace {

constexpr int kExitConfig = 3;
constexpr int kExitModel = 4;
constexpr int kExitNumerical = 5;

struct ChannelArgs {
    double tau = 0.6;
    double alpha = 0.3;
    int span = 11;
    int l_e = 3;
};

void add_channel_args(CLI::App* cmd, ChannelArgs& a) {
    cmd->add_option("--tau", a.tau, "symbol-time compression factor");
    cmd->add_option("--alpha", a.alpha, "RRC roll-off");
    cmd->add_option("--span", a.span, "one-sided ISI span L");
    cmd->add_option("--taps", a.l_e, "taps considered by the detector (L_E)");
}

ftn::GramMatrix make_gram(const ChannelArgs& a, int n) {
    ftn::PulseSpec pulse{1.0, a.alpha, a.tau, a.span};
    return ftn::build_gram(ftn::isi_taps(pulse), n);
}

int cmd_taps(const ChannelArgs& a) {
    ftn::PulseSpec pulse{1.0, a.alpha, a.tau, a.span};
    ftn::IsiProfile profile = ftn::isi_taps(pulse);
    std::printf("i,g_i\n");
    for (int i = 0; i <= profile.span; ++i) std::printf("%d,%.17g\n", i, profile.g(i));
    return 0;
}

int cmd_complexity(int n, int l_e) {
    ftn::ComplexityRow lm = ftn::complexity_log_map(n, l_e);
    ftn::ComplexityRow sp = ftn::complexity_spda(n, l_e);
    ftn::ComplexityRow dl = ftn::complexity_dlspda_extra(n, ftn::CnnHyper{});
    std::printf("algorithm,additions,lookups\n");
    std::printf("log-map,%ld,%ld\n", lm.additions, lm.lookups);
    std::printf("spda,%ld,%ld\n", sp.additions, sp.lookups);
    std::printf("dl-spda-extra,%ld,%ld\n", dl.additions + sp.additions,
                dl.lookups + sp.lookups);
    return 0;
}

int cmd_verify(bool quick, uint64_t seed) {
    bool ok = true;
    auto report = [&](const char* name, bool pass, double value) {
        std::printf("%-28s %s (%.3g)\n", name, pass ? "PASS" : "FAIL", value);
        ok = ok && pass;
    };

    double gerr = ftn::gradient_check(seed);
    report("gradient-check", gerr < 1e-3, gerr);

    {  // J-function round trip over the compatible-training targets
        double worst = 0.0;
        for (double mi : {0.2, 0.4, 0.6, 0.8, 0.9999}) {
            double back = ftn::j_value(ftn::j_inverse(mi));
            worst = std::max(worst, std::abs(back - mi));
        }
        report("j-round-trip", worst < 1e-3, worst);
    }

    {  // Theorem-1 direction on random error sequences
        int cases = quick ? 50 : 400;
        std::mt19937_64 rng(seed ^ 0xfeedULL);
        ChannelArgs a;
        a.tau = 0.6;
        ftn::GramMatrix g = make_gram(a, 40);
        ftn::TruncatedGram f = ftn::truncate_gram(g, 3);
        std::uniform_int_distribution<int> posd(0, 39);
        std::uniform_int_distribution<int> wd(1, 8);
        std::bernoulli_distribution coin(0.5);
        int violations = 0;
        for (int c = 0; c < cases; ++c) {
            ftn::ErrorSequence e;
            e.e.assign(40, 0.0);
            int w = wd(rng);
            for (int j = 0; j < w; ++j) e.e[posd(rng)] = coin(rng) ? 2.0 : -2.0;
            double lb = ftn::sigma_rl(e, g, f, 1.0);
            auto est = ftn::sigma_r_oracle(e, g, f, 1.0, rng, quick ? 2000 : 20000);
            if (lb > est.mean + 3.0 * est.stderr_) ++violations;
        }
        report("theorem-1-sweep", violations == 0, violations);
    }

    {  // truncated BCJR against exhaustive MAP with G = F
        std::mt19937_64 rng(seed ^ 0xbc3aULL);
        ChannelArgs a;
        a.tau = 0.7;
        a.span = 3;
        ftn::GramMatrix g = make_gram(a, 10);
        ftn::FtnChannel channel(g);
        std::bernoulli_distribution coin(0.5);
        double worst = 0.0;
        for (int trial = 0; trial < (quick ? 5 : 25); ++trial) {
            std::vector<double> x(10);
            for (auto& v : x) v = coin(rng) ? 1.0 : -1.0;
            std::vector<double> y = channel.transmit(x, 0.5, rng);
            ftn::LlrBlock prior(10, 0.0);
            ftn::LlrBlock app;
            ftn::truncated_bcjr_detect(y, prior, g, 0.5, nullptr, &app);
            ftn::LlrBlock ref = ftn::brute_force_map(y, g, 0.5, prior);
            for (int i = 0; i < 10; ++i)
                worst = std::max(worst, std::abs(ftn::clip_llr(app[i]) - ftn::clip_llr(ref[i])));
        }
        report("bcjr-vs-brute-force", worst < 1e-6, worst);
    }

    return ok ? 0 : kExitNumerical;
}

ftn::DetectorKind parse_kind(const std::string& s) {
    if (s == "spda") return ftn::DetectorKind::Spda;
    if (s == "dlspda") return ftn::DetectorKind::DlSpda;
    if (s == "bcjr") return ftn::DetectorKind::TruncatedBcjr;
    if (s == "threshold") return ftn::DetectorKind::Threshold;
    throw std::invalid_argument("unknown detector '" + s +
                                "' (expected spda|dlspda|bcjr|threshold)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ftnlab: coded faster-than-Nyquist signaling laboratory"};
    app.require_subcommand(1);

    // taps
    auto* taps = app.add_subcommand("taps", "print the ISI taps g_0..g_L as CSV");
    ChannelArgs taps_args;
    add_channel_args(taps, taps_args);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo BER sweep, CSV output");
    ChannelArgs sim_chan;
    add_channel_args(sim, sim_chan);
    ftn::ExperimentConfig exp;
    std::vector<double> sim_snr;
    std::string sim_detector = "spda";
    std::string sim_out;
    bool sim_uncoded = false;
    sim->add_option("--n", exp.n, "block symbols (coded: codeword length)");
    sim->add_flag("--uncoded", sim_uncoded, "uncoded symbol detection");
    sim->add_option("--detector", sim_detector, "spda|dlspda|bcjr|threshold");
    sim->add_option("--rho", exp.rho_max, "Turbo iterations");
    sim->add_option("--iters", exp.inner_iter, "inner message-passing iterations");
    sim->add_option("--snr", sim_snr, "E_b/N_0 grid, dB")->required();
    sim->add_option("--max-blocks", exp.max_blocks);
    sim->add_option("--min-errors", exp.min_block_errors);
    sim->add_option("--seed", exp.seed);
    sim->add_option("--model", exp.model_path, "trained model file (dlspda)");
    sim->add_option("--out", sim_out, "CSV path (default stdout)");

    // train
    auto* tr = app.add_subcommand("train", "off-line compatible training of the CNN node");
    ftn::TrainConfig tcfg;
    std::string train_out = "model.txt";
    std::string train_loss;
    tr->add_option("--tau", tcfg.tau);
    tr->add_option("--alpha", tcfg.alpha);
    tr->add_option("--span", tcfg.span);
    tr->add_option("--taps", tcfg.l_e);
    tr->add_option("--k", tcfg.k_info, "information bits per block");
    tr->add_option("--budget", tcfg.budget_samples, "training samples");
    tr->add_option("--snr-lo", tcfg.snr_lo);
    tr->add_option("--snr-hi", tcfg.snr_hi);
    tr->add_option("--lr", tcfg.learning_rate);
    tr->add_option("--iters", tcfg.m_max, "unfolded iterations");
    tr->add_option("--seed", tcfg.seed);
    tr->add_option("--out", train_out, "model output path");
    tr->add_option("--loss-csv", train_loss, "convergence CSV path");

    // bound
    auto* bnd = app.add_subcommand("bound", "analytical BER bound, CSV (snr_db,pb_bound)");
    ChannelArgs bnd_chan;
    add_channel_args(bnd, bnd_chan);
    ftn::BoundConfig bcfg;
    bool bnd_uncoded = false;
    bool bnd_guarded = false;
    bnd->add_option("--n", bcfg.n, "block symbols")->required();
    bnd->add_option("--wmax", bcfg.w_max);
    bnd->add_option("--window", bcfg.window);
    bnd->add_option("--snr-grid", bcfg.snr_db, "E_b/N_0 grid, dB")->required();
    bnd->add_flag("--uncoded", bnd_uncoded, "uncoded union bound");
    bnd->add_flag("--guarded", bnd_guarded, "rate counts 2 L_E guard symbols");
    bnd->add_option("--budget", bcfg.enum_budget);

    // spectrum
    auto* spc = app.add_subcommand("spectrum", "grouped FTN distance spectra per CC event");
    ChannelArgs spc_chan;
    add_channel_args(spc, spc_chan);
    int spc_n = 250, spc_wmax = 8, spc_window = 18;
    spc->add_option("--n", spc_n);
    spc->add_option("--wmax", spc_wmax);
    spc->add_option("--window", spc_window);

    // complexity
    auto* cx = app.add_subcommand("complexity", "per-iteration operation counts");
    int cx_n = 250, cx_taps = 3;
    cx->add_option("--n", cx_n);
    cx->add_option("--taps", cx_taps);

    // verify
    auto* vf = app.add_subcommand("verify", "run the numerical oracle suites");
    bool vf_quick = false;
    uint64_t vf_seed = 1;
    vf->add_flag("--quick", vf_quick);
    vf->add_option("--seed", vf_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*taps) return cmd_taps(taps_args);

        if (*sim) {
            exp.tau = sim_chan.tau;
            exp.alpha = sim_chan.alpha;
            exp.span = sim_chan.span;
            exp.l_e = sim_chan.l_e;
            exp.coded = !sim_uncoded;
            exp.kind = parse_kind(sim_detector);
            exp.snr_db = sim_snr;
            if (!sim_out.empty()) {
                std::ofstream os(sim_out);
                if (!os) throw std::invalid_argument("cannot open --out path " + sim_out);
                ftn::run_ber_sweep(exp, &os);
            } else {
                ftn::run_ber_sweep(exp, &std::cout);
            }
            return 0;
        }

        if (*tr) {
            std::ofstream loss;
            if (!train_loss.empty()) {
                loss.open(train_loss);
                if (!loss) throw std::invalid_argument("cannot open --loss-csv path");
            }
            ftn::CnnModel model = ftn::train(tcfg, train_loss.empty() ? nullptr : &loss);
            ftn::save_model(model, train_out);
            std::printf("model written to %s\n", train_out.c_str());
            return 0;
        }

        if (*bnd) {
            int guard = bnd_guarded ? 2 * bnd_chan.l_e : 0;
            int k = bcfg.n / 2 - 2;
            bcfg.rate = bnd_uncoded ? 1.0 : static_cast<double>(k) / (bcfg.n + guard);
            bcfg.e_b = 1.0 / bcfg.rate;  // symbol energy 1, E_b per info bit
            ftn::GramMatrix g = make_gram(bnd_chan, bcfg.n);
            std::vector<double> pb;
            if (bnd_uncoded) {
                pb = ftn::uncoded_union_bound(bcfg, g);
            } else {
                ftn::TruncatedGram f = ftn::truncate_gram(g, bnd_chan.l_e);
                auto events = ftn::cc_error_events(bcfg.w_max, bcfg.k_prime);
                std::vector<ftn::DistanceSpectrum> spectra;
                for (const auto& ev : events) {
                    bool seen = false;
                    for (const auto& s : spectra) seen = seen || s.weight == ev.code_weight;
                    if (!seen)
                        spectra.push_back(ftn::ftn_event_spectrum(ev.code_weight, g, f, bcfg));
                }
                pb = ftn::coded_bound(bcfg, events, spectra);
            }
            std::printf("# rate=%.6f wmax=%d window=%d\n", bcfg.rate, bcfg.w_max, bcfg.window);
            std::printf("snr_db,pb_bound\n");
            for (size_t i = 0; i < pb.size(); ++i)
                std::printf("%g,%.10g\n", bcfg.snr_db[i], pb[i]);
            return 0;
        }

        if (*spc) {
            ftn::GramMatrix g = make_gram(spc_chan, spc_n);
            ftn::TruncatedGram f = ftn::truncate_gram(g, spc_chan.l_e);
            ftn::BoundConfig cfg;
            cfg.n = spc_n;
            cfg.window = spc_window;
            cfg.w_max = spc_wmax;
            auto events = ftn::cc_error_events(spc_wmax);
            std::printf("event_id,multiplicity,d2,d2_ope,sigma_rl\n");
            for (size_t id = 0; id < events.size(); ++id) {
                auto spec = ftn::ftn_event_spectrum(events[id].code_weight, g, f, cfg);
                for (const auto& grp : spec.groups)
                    std::printf("%zu,%.10g,%.10g,%.10g,%.10g\n", id, grp.multiplicity,
                                grp.d2, grp.d2_ope, grp.sigma_rl);
            }
            return 0;
        }

        if (*cx) return cmd_complexity(cx_n, cx_taps);
        if (*vf) return cmd_verify(vf_quick, vf_seed);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::runtime_error& e) {
        std::string msg = e.what();
        std::fprintf(stderr, "error: %s\n", msg.c_str());
        return msg.find("model") != std::string::npos ? kExitModel : kExitNumerical;
    }
    return 2;
}
