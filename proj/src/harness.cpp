#include "ftn/harness.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ftn {

namespace {

uint64_t splitmix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// independent stream per (seed, snr point, block): parallel and serial
// schedules see identical draws
std::mt19937_64 block_rng(uint64_t seed, size_t snr_idx, long block) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (0x51ed2701u + static_cast<uint64_t>(snr_idx)));
    h = splitmix64(h ^ static_cast<uint64_t>(block));
    return std::mt19937_64(h);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (n < 1) throw std::invalid_argument("experiment: n must be >= 1");
    if (coded && (n % 2 != 0 || n / 2 - 2 < 1))
        throw std::invalid_argument("experiment: coded runs need n = 2(K+2) with K >= 1");
    if (l_e < 0 || span < l_e) throw std::invalid_argument("experiment: need 0 <= L_E <= L");
    if (kind == DetectorKind::DlSpda && model_path.empty())
        throw std::invalid_argument("experiment: DL-SPDA needs a model file (--model)");
    if (snr_db.empty()) throw std::invalid_argument("experiment: empty SNR grid");
    if (max_blocks < 1 || min_block_errors < 1)
        throw std::invalid_argument("experiment: block limits must be >= 1");
    if (rho_max < 1 || inner_iter < 1)
        throw std::invalid_argument("experiment: iteration counts must be >= 1");
}

std::vector<BerRecord> run_ber_sweep(const ExperimentConfig& cfg, std::ostream* csv) {
    cfg.validate();

    PulseSpec pulse{1.0, cfg.alpha, cfg.tau, cfg.span};
    IsiProfile profile = isi_taps(pulse);
    int guard = cfg.guard();
    int len = cfg.n + 2 * guard;
    GramMatrix gram = build_gram(profile, len);
    FtnChannel channel(gram);
    TruncatedGram trunc =
        cfg.kind == DetectorKind::TruncatedBcjr ? truncate_gram(gram, cfg.l_e) : gram;

    CnnModel model;
    bool have_model = false;
    if (cfg.kind == DetectorKind::DlSpda) {
        model = load_model(cfg.model_path);
        check_model_shape(model, cfg.n, cfg.l_e, cfg.inner_iter);
        have_model = true;
    }

    std::vector<int8_t> known;
    if (cfg.kind == DetectorKind::TruncatedBcjr) {
        known.assign(static_cast<size_t>(len), 0);
        for (int i = 0; i < guard; ++i) {
            known[static_cast<size_t>(i)] = 1;
            known[static_cast<size_t>(len - 1 - i)] = 1;
        }
    }

    const char* kind_name = cfg.kind == DetectorKind::Spda          ? "spda"
                            : cfg.kind == DetectorKind::DlSpda      ? "dlspda"
                            : cfg.kind == DetectorKind::TruncatedBcjr ? "bcjr"
                                                                      : "threshold";
    if (csv) {
        *csv << "# tau=" << cfg.tau << " alpha=" << cfg.alpha << " L=" << cfg.span
             << " L_E=" << cfg.l_e << " N=" << cfg.n << " coded=" << (cfg.coded ? 1 : 0)
             << " detector=" << kind_name << " rho_max=" << cfg.rho_max
             << " m_max=" << cfg.inner_iter << "\n"
             << "# rate=" << cfg.rate() << " seed=" << cfg.seed
             << " interleaver_seed=" << cfg.interleaver_seed
             << " max_blocks=" << cfg.max_blocks
             << " min_block_errors=" << cfg.min_block_errors << "\n"
             << "snr_db,bits,bit_errors,blocks,block_errors,ber\n";
    }

    Interleaver pi(cfg.n, cfg.interleaver_seed);
    int k_info = cfg.info_bits();
    double rate = cfg.rate();

    std::vector<BerRecord> records;
    for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
        double snr = cfg.snr_db[s];
        bool noiseless = std::isinf(snr) && snr > 0.0;
        double sigma2 = noiseless ? 0.0 : std::pow(10.0, -snr / 10.0) / (2.0 * rate);
        double det_sigma2 = noiseless ? 1e-12 : sigma2;

        BerRecord rec;
        rec.snr_db = snr;
        auto start = std::chrono::steady_clock::now();
        std::bernoulli_distribution coin(0.5);

        for (long blk = 0; blk < cfg.max_blocks && rec.block_errors < cfg.min_block_errors;
             ++blk) {
            std::mt19937_64 rng = block_rng(cfg.seed, s, blk);
            long errs = 0;
            if (cfg.coded) {
                std::vector<uint8_t> info(static_cast<size_t>(k_info));
                for (auto& b : info) b = coin(rng) ? 1 : 0;
                std::vector<uint8_t> code = cc_encode(info);
                std::vector<uint8_t> tx_bits = pi.interleave(code);
                std::vector<double> x = bpsk_modulate(tx_bits);
                if (guard > 0) {
                    std::vector<double> padded(static_cast<size_t>(len), 1.0);
                    std::copy(x.begin(), x.end(), padded.begin() + guard);
                    x = std::move(padded);
                }
                std::vector<double> y = channel.transmit(x, sigma2, rng);
                TurboConfig tc;
                tc.rho_max = cfg.rho_max;
                tc.kind = cfg.kind;
                tc.fg = {cfg.n, cfg.l_e, cfg.inner_iter, det_sigma2,
                         cfg.kind == DetectorKind::DlSpda};
                tc.interleaver_seed = cfg.interleaver_seed;
                std::vector<uint8_t> dec =
                    turbo_equalize(y, gram, tc, have_model ? &model : nullptr);
                for (int i = 0; i < k_info; ++i)
                    errs += dec[static_cast<size_t>(i)] != info[static_cast<size_t>(i)];
                rec.bits += k_info;
            } else {
                std::vector<uint8_t> bits(static_cast<size_t>(cfg.n));
                for (auto& b : bits) b = coin(rng) ? 1 : 0;
                std::vector<double> x = bpsk_modulate(bits);
                if (guard > 0) {
                    std::vector<double> padded(static_cast<size_t>(len), 1.0);
                    std::copy(x.begin(), x.end(), padded.begin() + guard);
                    x = std::move(padded);
                }
                std::vector<double> y = channel.transmit(x, sigma2, rng);
                LlrBlock llr(static_cast<size_t>(cfg.n), 0.0);
                switch (cfg.kind) {
                    case DetectorKind::Spda:
                    case DetectorKind::DlSpda: {
                        FgConfig fg{cfg.n, cfg.l_e, cfg.inner_iter, det_sigma2,
                                    cfg.kind == DetectorKind::DlSpda};
                        LlrBlock zero(static_cast<size_t>(cfg.n), 0.0);
                        llr = spda_detect(y, zero, gram, fg, have_model ? &model : nullptr);
                        break;
                    }
                    case DetectorKind::TruncatedBcjr: {
                        LlrBlock zero(static_cast<size_t>(len), 0.0);
                        LlrBlock app;
                        truncated_bcjr_detect(y, zero, trunc, det_sigma2, &known, &app);
                        for (int i = 0; i < cfg.n; ++i)
                            llr[static_cast<size_t>(i)] = app[static_cast<size_t>(i + guard)];
                        break;
                    }
                    case DetectorKind::Threshold: {
                        std::vector<double> core(y.begin() + guard, y.begin() + guard + cfg.n);
                        llr = channel_llr(core, det_sigma2);
                        break;
                    }
                }
                for (int i = 0; i < cfg.n; ++i)
                    errs += hard_bit(llr[static_cast<size_t>(i)]) != bits[static_cast<size_t>(i)];
                rec.bits += cfg.n;
            }
            rec.blocks += 1;
            rec.bit_errors += errs;
            rec.block_errors += errs > 0 ? 1 : 0;
        }

        rec.ber = rec.bits > 0 ? static_cast<double>(rec.bit_errors) / rec.bits : 0.0;
        rec.censored = rec.block_errors < cfg.min_block_errors;
        rec.runtime_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (csv) {
            *csv << rec.snr_db << ',' << rec.bits << ',' << rec.bit_errors << ','
                 << rec.blocks << ',' << rec.block_errors << ',' << rec.ber << "\n";
            if (rec.censored) *csv << "# censored snr_db=" << rec.snr_db << "\n";
            csv->flush();
        }
        records.push_back(rec);
    }
    return records;
}

}  // namespace ftn
