#include "ftn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>

namespace ftn {

namespace {

// Quadratic form e^T M e on a sparse support; entries of e are val[i] at pos[i].
double sparse_quadratic(const std::vector<int>& pos, const std::vector<double>& val,
                        const GramMatrix& m) {
    double acc = 0.0;
    for (size_t i = 0; i < pos.size(); ++i) {
        acc += val[i] * val[i] * m.g(0);
        for (size_t k = i + 1; k < pos.size(); ++k) {
            int d = pos[k] - pos[i];
            if (d > m.band) break;  // positions sorted ascending
            acc += 2.0 * val[i] * val[k] * m.g(d);
        }
    }
    return acc;
}

// [sum_j x_j [(G-F)e]_j]^2 / (2 E_b) with x_j = e_j/2 on the support.
double sparse_sigma_rl(const std::vector<int>& pos, const std::vector<double>& val,
                       const GramMatrix& g, const TruncatedGram& f, double e_b) {
    double s = 0.0;
    for (size_t j = 0; j < pos.size(); ++j) {
        double row = 0.0;
        for (size_t k = 0; k < pos.size(); ++k) {
            int d = std::abs(pos[k] - pos[j]);
            if (d > f.band && d <= g.band) row += g.g(d) * val[k];
        }
        s += 0.5 * val[j] * row;
    }
    return s * s / (2.0 * e_b);
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

// Enumerates every support shape of the given weight anchored at position 0
// with width <= window, calling fn(positions) for each.
template <typename Fn>
void for_each_anchored_support(int weight, int window, Fn&& fn) {
    std::vector<int> pos(static_cast<size_t>(weight));
    pos[0] = 0;
    auto rec = [&](auto&& self, int idx) -> void {
        if (idx == weight) {
            fn(pos);
            return;
        }
        for (int p = pos[static_cast<size_t>(idx) - 1] + 1; p < window; ++p) {
            pos[static_cast<size_t>(idx)] = p;
            self(self, idx + 1);
        }
    };
    if (weight == 1) fn(pos);
    else rec(rec, 1);
}

struct GroupKey {
    int64_t d2, d2_ope;
    bool operator<(const GroupKey& o) const {
        return d2 != o.d2 ? d2 < o.d2 : d2_ope < o.d2_ope;
    }
};

GroupKey make_key(double d2, double d2_ope) {
    return {static_cast<int64_t>(std::llround(d2 * 1e9)),
            static_cast<int64_t>(std::llround(d2_ope * 1e9))};
}

struct GroupAccum {
    double multiplicity = 0.0;
    double d2 = 0.0, d2_ope = 0.0;
    double srl_min = 0.0, srl_max = 0.0;
    bool seen = false;

    void add(double d2v, double d2o, double srl, double mult) {
        if (!seen) {
            d2 = d2v;
            d2_ope = d2o;
            srl_min = srl_max = srl;
            seen = true;
        } else {
            srl_min = std::min(srl_min, srl);
            srl_max = std::max(srl_max, srl);
        }
        multiplicity += mult;
    }
};

std::vector<SpectrumGroup> finish_groups(const std::map<GroupKey, GroupAccum>& acc) {
    std::vector<SpectrumGroup> out;
    out.reserve(acc.size());
    for (const auto& [key, g] : acc) {
        (void)key;
        out.push_back({g.multiplicity, g.d2, g.d2_ope, 0.5 * (g.srl_min + g.srl_max),
                       g.srl_max - g.srl_min});
    }
    return out;
}

}  // namespace

std::vector<int> ErrorSequence::support() const {
    std::vector<int> pos;
    for (size_t i = 0; i < e.size(); ++i)
        if (e[i] != 0.0) pos.push_back(static_cast<int>(i));
    return pos;
}

DistanceTriple distances(const ErrorSequence& e, const GramMatrix& g,
                         const TruncatedGram& f, double e_b) {
    if (e_b <= 0.0) throw std::invalid_argument("distances: E_b must be > 0");
    std::vector<int> pos = e.support();
    std::vector<double> val;
    val.reserve(pos.size());
    for (int p : pos) val.push_back(e.e[static_cast<size_t>(p)]);
    DistanceTriple out;
    out.d2 = sparse_quadratic(pos, val, g) / (2.0 * e_b);
    out.d2_ope = sparse_quadratic(pos, val, f) / (2.0 * e_b);
    out.weight = static_cast<int>(pos.size());
    return out;
}

double pairwise_error_prob(double d2, double ebn0) {
    if (d2 < 0.0) throw std::invalid_argument("pairwise_error_prob: d2 must be >= 0");
    return q_func(std::sqrt(d2 * ebn0));
}

double sigma_rl(const ErrorSequence& e, const GramMatrix& g, const TruncatedGram& f,
                double e_b) {
    std::vector<int> pos = e.support();
    std::vector<double> val;
    val.reserve(pos.size());
    for (int p : pos) val.push_back(e.e[static_cast<size_t>(p)]);
    return sparse_sigma_rl(pos, val, g, f, e_b);
}

MonteCarloEstimate sigma_r_oracle(const ErrorSequence& e, const GramMatrix& g,
                                  const TruncatedGram& f, double e_b,
                                  std::mt19937_64& rng, long samples) {
    if (samples < 1000) throw std::invalid_argument("sigma_r_oracle: samples must be >= 1e3");
    int n = static_cast<int>(e.e.size());
    std::vector<int> pos = e.support();
    std::vector<uint8_t> on_support(static_cast<size_t>(n), 0);
    for (int p : pos) on_support[static_cast<size_t>(p)] = 1;

    // precompute (G - F) e once; x varies per sample
    std::vector<double> ge = g.multiply(e.e);
    std::vector<double> fe = f.multiply(e.e);
    for (int i = 0; i < n; ++i) ge[static_cast<size_t>(i)] -= fe[static_cast<size_t>(i)];

    std::bernoulli_distribution coin(0.5);
    double sum = 0.0, sum2 = 0.0;
    for (long s = 0; s < samples; ++s) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) {
            double x = on_support[static_cast<size_t>(i)]
                           ? e.e[static_cast<size_t>(i)] / 2.0
                           : (coin(rng) ? 1.0 : -1.0);
            dot += x * ge[static_cast<size_t>(i)];
        }
        double v = dot * dot / (2.0 * e_b);
        sum += v;
        sum2 += v * v;
    }
    MonteCarloEstimate out;
    out.samples = samples;
    out.mean = sum / samples;
    double var = std::max(0.0, sum2 / samples - out.mean * out.mean);
    out.stderr_ = std::sqrt(var / samples);
    return out;
}

double finite_tap_error_prob(double d2, double d2_ope, double sigma2_r, double ebn0) {
    if (d2_ope < 0.0) throw std::invalid_argument("finite_tap_error_prob: d2_ope must be >= 0");
    // 2 sigma2_R / N0 with N0 expressed through E_b/N_0 and E_b = 1
    double den = d2 + 2.0 * sigma2_r * ebn0;
    if (den <= 0.0) return d2_ope == 0.0 ? 0.5 : 0.0;
    return q_func(std::sqrt(ebn0 * d2_ope * d2_ope / den));
}

std::vector<double> uncoded_union_bound(const BoundConfig& cfg, const GramMatrix& g) {
    if (cfg.n < 1 || cfg.w_max < 1) throw std::invalid_argument("uncoded_union_bound: bad config");
    if (cfg.w_max > cfg.n)
        throw std::invalid_argument("uncoded_union_bound: w_max exceeds block length");
    int window = std::min(cfg.window, cfg.n);

    long work = 0;
    for (int w = 1; w <= cfg.w_max; ++w)
        work += static_cast<long>(binomial(window - 1, w - 1)) << w;
    if (work > cfg.enum_budget)
        throw std::runtime_error("uncoded_union_bound: enumeration budget exceeded");

    std::vector<double> bound(cfg.snr_db.size(), 0.0);
    std::vector<double> val;
    for (int w = 1; w <= cfg.w_max; ++w) {
        double weight = static_cast<double>(w) / (std::ldexp(1.0, w) * cfg.n);
        for_each_anchored_support(w, window, [&](const std::vector<int>& pos) {
            int width = pos.back() + 1;
            double shifts = cfg.n - width + 1;
            val.assign(static_cast<size_t>(w), 0.0);
            for (uint32_t signs = 0; signs < (1u << w); ++signs) {
                for (int i = 0; i < w; ++i)
                    val[static_cast<size_t>(i)] = (signs >> i) & 1 ? -2.0 : 2.0;
                double d2 = sparse_quadratic(pos, val, g) / (2.0 * cfg.e_b);
                for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
                    double ebn0 = std::pow(10.0, cfg.snr_db[s] / 10.0);
                    bound[s] += shifts * weight * pairwise_error_prob(d2, ebn0);
                }
            }
        });
    }
    return bound;
}

std::vector<CcErrorEvent> cc_error_events(int w_max, int k_prime) {
    if (w_max < 5) throw std::invalid_argument("cc_error_events: w_max below d_min = 5");
    std::vector<CcErrorEvent> events;
    CcErrorEvent cur;
    // state s = (b_{t-1} << 1) | b_{t-2}; event starts with info bit 1 from state 0
    auto step = [](int state, int b, int& out_a, int& out_b) {
        int prev1 = (state >> 1) & 1, prev2 = state & 1;
        out_a = b ^ prev1 ^ prev2;
        out_b = b ^ prev2;
        return (b << 1) | prev1;
    };
    auto rec = [&](auto&& self, int state, int weight, int info_w, int len) -> void {
        if (len > k_prime || weight > w_max) return;
        if (state == 0 && len > 0) {  // remerged: record and stop (single event)
            cur.info_weight = info_w;
            cur.length = len;
            cur.code_weight = weight;
            events.push_back(cur);
            return;
        }
        for (int b = 0; b < 2; ++b) {
            if (len == 0 && b == 0) continue;  // must diverge immediately
            int oa, ob;
            int ns = step(state, b, oa, ob);
            cur.pattern.push_back(static_cast<uint8_t>(oa));
            cur.pattern.push_back(static_cast<uint8_t>(ob));
            self(self, ns, weight + oa + ob, info_w + b, len + 1);
            cur.pattern.pop_back();
            cur.pattern.pop_back();
        }
    };
    rec(rec, 0, 0, 0, 0);
    std::sort(events.begin(), events.end(), [](const CcErrorEvent& a, const CcErrorEvent& b) {
        if (a.code_weight != b.code_weight) return a.code_weight < b.code_weight;
        return a.length < b.length;
    });
    return events;
}

DistanceSpectrum ftn_event_spectrum(int weight, const GramMatrix& g,
                                    const TruncatedGram& f, const BoundConfig& cfg) {
    if (weight < 1) throw std::invalid_argument("ftn_event_spectrum: weight must be >= 1");
    if (cfg.window < weight)
        throw std::invalid_argument("ftn_event_spectrum: window smaller than the weight");
    int window = std::min(cfg.window, cfg.n);

    DistanceSpectrum spec;
    spec.weight = weight;
    spec.window = window;
    spec.total_possible = binomial(cfg.n, weight) * std::ldexp(1.0, weight);

    std::map<GroupKey, GroupAccum> acc;
    std::vector<double> val(static_cast<size_t>(weight), 0.0);
    auto visit = [&](const std::vector<int>& pos, double mult) {
        double d2 = sparse_quadratic(pos, val, g) / (2.0 * cfg.e_b);
        double d2o = sparse_quadratic(pos, val, f) / (2.0 * cfg.e_b);
        double srl = sparse_sigma_rl(pos, val, g, f, cfg.e_b);
        acc[make_key(d2, d2o)].add(d2, d2o, srl, mult);
        spec.total_enumerated += mult;
    };

    double shapes = binomial(window - 1, weight - 1) * std::ldexp(1.0, weight);
    if (shapes <= static_cast<double>(cfg.enum_budget)) {
        // banded Toeplitz quadratic forms are exactly shift invariant, so each
        // anchored shape stands for every placement of the same width
        for_each_anchored_support(weight, window, [&](const std::vector<int>& pos) {
            double nshift = cfg.n - pos.back();
            for (uint32_t signs = 0; signs < (1u << weight); ++signs) {
                for (int i = 0; i < weight; ++i)
                    val[static_cast<size_t>(i)] = (signs >> i) & 1 ? -2.0 : 2.0;
                visit(pos, nshift);
            }
        });
        // placements wider than the window: beyond the band every pairwise
        // coupling is zero, so they sit at the isolated-entries distance
        double rest = spec.total_possible - spec.total_enumerated;
        if (rest > 0.0) {
            double iso = 4.0 * weight / (2.0 * cfg.e_b);
            acc[make_key(iso, iso)].add(iso, iso, 0.0, rest);
            spec.total_enumerated += rest;
        }
    } else {
        // unbiased uniform sampling of supports over the whole block
        spec.sampled = true;
        spec.sample_count = cfg.mc_samples;
        std::mt19937_64 rng(0x5ebc0ffee5ULL + static_cast<uint64_t>(weight));
        std::uniform_int_distribution<int> pick(0, cfg.n - 1);
        std::bernoulli_distribution coin(0.5);
        std::vector<int> pos;
        double per_sample = spec.total_possible / cfg.mc_samples;
        for (long s = 0; s < cfg.mc_samples; ++s) {
            pos.clear();
            while (static_cast<int>(pos.size()) < weight) {
                int p = pick(rng);
                if (std::find(pos.begin(), pos.end(), p) == pos.end()) pos.push_back(p);
            }
            std::sort(pos.begin(), pos.end());
            for (int i = 0; i < weight; ++i)
                val[static_cast<size_t>(i)] = coin(rng) ? -2.0 : 2.0;
            visit(pos, per_sample);
        }
    }
    spec.groups = finish_groups(acc);
    return spec;
}

std::vector<double> coded_bound(const BoundConfig& cfg,
                                const std::vector<CcErrorEvent>& events,
                                const std::vector<DistanceSpectrum>& spectra_by_weight) {
    std::vector<double> bound(cfg.snr_db.size(), 0.0);
    double info_bits = cfg.n * cfg.rate;  // N R with K_b = 1
    for (const CcErrorEvent& ev : events) {
        auto it = std::find_if(spectra_by_weight.begin(), spectra_by_weight.end(),
                               [&](const DistanceSpectrum& s) { return s.weight == ev.code_weight; });
        if (it == spectra_by_weight.end())
            throw std::invalid_argument("coded_bound: missing spectrum for an event weight");
        // positions the event can occupy in the terminated trellis; floored
        // when N R / K_b is not an integer
        double placements = std::floor(info_bits - ev.length + 1.0);
        if (placements <= 0.0) continue;
        // the per-codeword sum over the 2^{K'} codewords cancels the 1/2^{K'}
        // factor for a linear code: every codeword sees the same event set
        double prefix = placements * ev.info_weight / info_bits;
        for (const SpectrumGroup& grp : it->groups) {
            double frac = grp.multiplicity / it->total_possible;
            for (size_t s = 0; s < cfg.snr_db.size(); ++s) {
                double ebn0 = std::pow(10.0, cfg.snr_db[s] / 10.0);
                bound[s] += prefix * frac *
                            finite_tap_error_prob(grp.d2, grp.d2_ope, grp.sigma_rl, ebn0);
            }
        }
    }
    return bound;
}

LlrBlock brute_force_map(const std::vector<double>& y, const GramMatrix& g, double sigma2,
                         const LlrBlock& prior) {
    int n = static_cast<int>(y.size());
    if (n > 20) throw std::invalid_argument("brute_force_map: N must be <= 20");
    if (g.n != n) throw std::invalid_argument("brute_force_map: gram size mismatch");
    if (!prior.empty() && static_cast<int>(prior.size()) != n)
        throw std::invalid_argument("brute_force_map: prior length mismatch");
    if (sigma2 <= 0.0) throw std::invalid_argument("brute_force_map: sigma2 must be > 0");

    double neg_inf = -std::numeric_limits<double>::infinity();
    LlrBlock num(static_cast<size_t>(n), neg_inf), den(static_cast<size_t>(n), neg_inf);
    std::vector<double> x(static_cast<size_t>(n));
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1 ? -1.0 : 1.0;
        double xy = 0.0, xgx = 0.0, pr = 0.0;
        for (int i = 0; i < n; ++i) {
            xy += x[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
            for (int j = std::max(0, i - g.band); j <= std::min(n - 1, i + g.band); ++j)
                xgx += x[static_cast<size_t>(i)] * g.at(i, j) * x[static_cast<size_t>(j)];
            if (!prior.empty()) pr += 0.5 * x[static_cast<size_t>(i)] * prior[static_cast<size_t>(i)];
        }
        double metric = (xy - 0.5 * xgx) / sigma2 + pr;
        for (int i = 0; i < n; ++i) {
            double& acc = x[static_cast<size_t>(i)] > 0.0 ? num[static_cast<size_t>(i)]
                                                          : den[static_cast<size_t>(i)];
            acc = acc == neg_inf ? metric : log_add_exp(acc, metric);
        }
    }
    LlrBlock app(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        app[static_cast<size_t>(i)] = num[static_cast<size_t>(i)] - den[static_cast<size_t>(i)];
    return app;
}

std::vector<double> brute_force_ml(const std::vector<double>& y, const GramMatrix& g,
                                   double sigma2) {
    int n = static_cast<int>(y.size());
    if (n > 20) throw std::invalid_argument("brute_force_ml: N must be <= 20");
    if (g.n != n) throw std::invalid_argument("brute_force_ml: gram size mismatch");
    if (sigma2 <= 0.0) throw std::invalid_argument("brute_force_ml: sigma2 must be > 0");

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> x(static_cast<size_t>(n)), best_x;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1 ? -1.0 : 1.0;
        double xy = 0.0, xgx = 0.0;
        for (int i = 0; i < n; ++i) {
            xy += x[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
            for (int j = std::max(0, i - g.band); j <= std::min(n - 1, i + g.band); ++j)
                xgx += x[static_cast<size_t>(i)] * g.at(i, j) * x[static_cast<size_t>(j)];
        }
        double metric = (xy - 0.5 * xgx) / sigma2;
        if (metric > best) {
            best = metric;
            best_x = x;
        }
    }
    return best_x;
}

}  // namespace ftn
