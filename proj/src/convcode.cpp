#include "ftn/convcode.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace ftn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// state s = (b_{t-1} << 1) | b_{t-2}
struct Branch {
    int next;
    int out_a;  // generator 111
    int out_b;  // generator 101
};

Branch branch(int state, int input) {
    int prev1 = (state >> 1) & 1;
    int prev2 = state & 1;
    Branch br;
    br.out_a = input ^ prev1 ^ prev2;
    br.out_b = input ^ prev2;
    br.next = (input << 1) | prev1;
    return br;
}

}  // namespace

int cc_code_length(int k) { return 2 * (k + CcSpec::memory); }

std::vector<uint8_t> cc_encode(const std::vector<uint8_t>& info, const CcSpec&) {
    if (info.empty()) throw std::invalid_argument("cc_encode: K must be >= 1");
    int k = static_cast<int>(info.size());
    std::vector<uint8_t> code;
    code.reserve(static_cast<size_t>(cc_code_length(k)));
    int state = 0;
    for (int t = 0; t < k + CcSpec::memory; ++t) {
        int b = t < k ? (info[static_cast<size_t>(t)] & 1) : 0;
        Branch br = branch(state, b);
        code.push_back(static_cast<uint8_t>(br.out_a));
        code.push_back(static_cast<uint8_t>(br.out_b));
        state = br.next;
    }
    return code;
}

BcjrResult cc_bcjr_decode(const LlrBlock& code_llr, const LlrBlock& info_prior,
                          const CcSpec&, bool exact_max_star) {
    int n = static_cast<int>(code_llr.size());
    if (n < 2 * (1 + CcSpec::memory) || n % 2 != 0)
        throw std::invalid_argument("cc_bcjr_decode: code LLR length does not fit a terminated trellis");
    int steps = n / 2;
    int k = steps - CcSpec::memory;
    if (!info_prior.empty() && static_cast<int>(info_prior.size()) != k)
        throw std::invalid_argument("cc_bcjr_decode: info prior length mismatch");

    auto combine = [exact_max_star](double a, double b) {
        return exact_max_star ? max_star(a, b) : std::max(a, b);
    };

    constexpr int S = CcSpec::num_states;
    // gamma[t][s][b]
    std::vector<double> gamma(static_cast<size_t>(steps) * S * 2, kNegInf);
    auto gm = [&](int t, int s, int b) -> double& {
        return gamma[(static_cast<size_t>(t) * S + s) * 2 + b];
    };
    for (int t = 0; t < steps; ++t) {
        double la = code_llr[static_cast<size_t>(2 * t)];
        double lb = code_llr[static_cast<size_t>(2 * t + 1)];
        double lp = (t < k && !info_prior.empty()) ? info_prior[static_cast<size_t>(t)] : 0.0;
        int max_b = t < k ? 1 : 0;  // tail steps force input 0
        for (int s = 0; s < S; ++s) {
            for (int b = 0; b <= max_b; ++b) {
                Branch br = branch(s, b);
                double m = 0.5 * ((br.out_a ? -la : la) + (br.out_b ? -lb : lb));
                m += 0.5 * (b ? -lp : lp);
                gm(t, s, b) = m;
            }
        }
    }

    std::vector<double> alpha(static_cast<size_t>(steps + 1) * S, kNegInf);
    std::vector<double> beta(static_cast<size_t>(steps + 1) * S, kNegInf);
    auto al = [&](int t, int s) -> double& { return alpha[static_cast<size_t>(t) * S + s]; };
    auto be = [&](int t, int s) -> double& { return beta[static_cast<size_t>(t) * S + s]; };
    al(0, 0) = 0.0;
    be(steps, 0) = 0.0;

    for (int t = 0; t < steps; ++t) {
        int max_b = t < k ? 1 : 0;
        for (int s = 0; s < S; ++s) {
            if (al(t, s) == kNegInf) continue;
            for (int b = 0; b <= max_b; ++b) {
                Branch br = branch(s, b);
                double cand = al(t, s) + gm(t, s, b);
                double& tgt = al(t + 1, br.next);
                tgt = tgt == kNegInf ? cand : combine(tgt, cand);
            }
        }
    }
    for (int t = steps - 1; t >= 0; --t) {
        int max_b = t < k ? 1 : 0;
        for (int s = 0; s < S; ++s) {
            for (int b = 0; b <= max_b; ++b) {
                Branch br = branch(s, b);
                if (be(t + 1, br.next) == kNegInf) continue;
                double cand = be(t + 1, br.next) + gm(t, s, b);
                double& tgt = be(t, s);
                tgt = tgt == kNegInf ? cand : combine(tgt, cand);
            }
        }
    }

    BcjrResult out;
    out.info_app.resize(static_cast<size_t>(k));
    out.code_app.resize(static_cast<size_t>(n));
    out.code_extrinsic.resize(static_cast<size_t>(n));

    for (int t = 0; t < steps; ++t) {
        int max_b = t < k ? 1 : 0;
        double num_info = kNegInf, den_info = kNegInf;
        double num_a = kNegInf, den_a = kNegInf;
        double num_b = kNegInf, den_b = kNegInf;
        for (int s = 0; s < S; ++s) {
            if (al(t, s) == kNegInf) continue;
            for (int b = 0; b <= max_b; ++b) {
                Branch br = branch(s, b);
                if (be(t + 1, br.next) == kNegInf) continue;
                double metric = al(t, s) + gm(t, s, b) + be(t + 1, br.next);
                auto fold = [&](double& acc, double v) {
                    acc = acc == kNegInf ? v : combine(acc, v);
                };
                fold(b == 0 ? num_info : den_info, metric);
                fold(br.out_a == 0 ? num_a : den_a, metric);
                fold(br.out_b == 0 ? num_b : den_b, metric);
            }
        }
        if (t < k) out.info_app[static_cast<size_t>(t)] = num_info - den_info;
        auto llr_of = [](double num, double den) {
            if (den == kNegInf) return kLlrClip;
            if (num == kNegInf) return -kLlrClip;
            return num - den;
        };
        out.code_app[static_cast<size_t>(2 * t)] = llr_of(num_a, den_a);
        out.code_app[static_cast<size_t>(2 * t + 1)] = llr_of(num_b, den_b);
    }
    for (int i = 0; i < n; ++i)
        out.code_extrinsic[static_cast<size_t>(i)] =
            out.code_app[static_cast<size_t>(i)] - code_llr[static_cast<size_t>(i)];
    return out;
}

Interleaver::Interleaver(int n, uint64_t seed) {
    if (n < 0) throw std::invalid_argument("interleaver: negative length");
    perm_.resize(static_cast<size_t>(n));
    std::iota(perm_.begin(), perm_.end(), 0);
    std::mt19937_64 rng(seed);
    for (int i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<int> pick(0, i);
        std::swap(perm_[static_cast<size_t>(i)], perm_[static_cast<size_t>(pick(rng))]);
    }
}

}  // namespace ftn
