#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "ftn/convcode.hpp"

using namespace ftn;

TEST_CASE("code length bookkeeping") {
    CHECK(cc_code_length(1) == 6);
    CHECK(cc_code_length(123) == 250);
    CHECK(cc_code_length(8) == 20);
}

TEST_CASE("impulse response has weight d_min = 5") {
    std::vector<uint8_t> code = cc_encode({1});
    // info 1 then two tail zeros: 11 10 11
    CHECK(code == std::vector<uint8_t>{1, 1, 1, 0, 1, 1});
}

TEST_CASE("encoder is linear and terminated") {
    std::mt19937_64 rng(3);
    std::bernoulli_distribution coin(0.5);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<uint8_t> a(10), b(10), s(10);
        for (int i = 0; i < 10; ++i) {
            a[i] = coin(rng);
            b[i] = coin(rng);
            s[i] = a[i] ^ b[i];
        }
        std::vector<uint8_t> ca = cc_encode(a), cb = cc_encode(b), cs = cc_encode(s);
        for (size_t i = 0; i < ca.size(); ++i) CHECK(cs[i] == (ca[i] ^ cb[i]));
    }
    // all-zero info stays all-zero (termination from state 0)
    std::vector<uint8_t> z = cc_encode(std::vector<uint8_t>(10, 0));
    for (uint8_t bit : z) CHECK(bit == 0);
}

namespace {
// exhaustive codeword marginalization oracle for the APP LLRs
void exhaustive_app(const LlrBlock& code_llr, const LlrBlock& info_prior, int k,
                    LlrBlock& info_app, LlrBlock& code_app) {
    int n = cc_code_length(k);
    double neg_inf = -std::numeric_limits<double>::infinity();
    LlrBlock i_num(k, neg_inf), i_den(k, neg_inf), c_num(n, neg_inf), c_den(n, neg_inf);
    for (uint32_t mask = 0; mask < (1u << k); ++mask) {
        std::vector<uint8_t> info(k);
        for (int i = 0; i < k; ++i) info[i] = (mask >> i) & 1;
        std::vector<uint8_t> code = cc_encode(info);
        double metric = 0.0;
        for (int i = 0; i < n; ++i) metric += 0.5 * (code[i] ? -1.0 : 1.0) * code_llr[i];
        if (!info_prior.empty())
            for (int i = 0; i < k; ++i) metric += 0.5 * (info[i] ? -1.0 : 1.0) * info_prior[i];
        for (int i = 0; i < k; ++i) {
            double& acc = info[i] ? i_den[i] : i_num[i];
            acc = log_add_exp(acc, metric);
        }
        for (int i = 0; i < n; ++i) {
            double& acc = code[i] ? c_den[i] : c_num[i];
            acc = log_add_exp(acc, metric);
        }
    }
    info_app.resize(k);
    code_app.resize(n);
    for (int i = 0; i < k; ++i) info_app[i] = i_num[i] - i_den[i];
    for (int i = 0; i < n; ++i) code_app[i] = c_num[i] - c_den[i];
}
}  // namespace

TEST_CASE("log-MAP equals exhaustive marginalization (K = 8)") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 2.0);
    const int k = 8, n = cc_code_length(k);
    for (int trial = 0; trial < 10; ++trial) {
        LlrBlock code_llr(n), prior;
        for (auto& v : code_llr) v = gauss(rng);
        if (trial % 2) {
            prior.resize(k);
            for (auto& v : prior) v = gauss(rng);
        }
        BcjrResult res = cc_bcjr_decode(code_llr, prior);
        LlrBlock ref_info, ref_code;
        exhaustive_app(code_llr, prior, k, ref_info, ref_code);
        for (int i = 0; i < k; ++i)
            CHECK(clip_llr(res.info_app[i]) == doctest::Approx(clip_llr(ref_info[i])).epsilon(1e-9));
        for (int i = 0; i < n; ++i)
            CHECK(clip_llr(res.code_app[i]) == doctest::Approx(clip_llr(ref_code[i])).epsilon(1e-9));
        for (int i = 0; i < n; ++i)
            CHECK(res.code_extrinsic[i] == doctest::Approx(res.code_app[i] - code_llr[i]));
    }
}

TEST_CASE("strong clean channel LLRs decode to the sent word") {
    std::mt19937_64 rng(23);
    std::bernoulli_distribution coin(0.5);
    std::vector<uint8_t> info(20);
    for (auto& b : info) b = coin(rng);
    std::vector<uint8_t> code = cc_encode(info);
    LlrBlock llr(code.size());
    for (size_t i = 0; i < code.size(); ++i) llr[i] = code[i] ? -8.0 : 8.0;
    BcjrResult res = cc_bcjr_decode(llr, {});
    for (size_t i = 0; i < info.size(); ++i) CHECK(hard_bit(res.info_app[i]) == info[i]);
}

TEST_CASE("max-log-MAP stays close but not identical") {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int k = 12;
    LlrBlock llr(cc_code_length(k));
    for (auto& v : llr) v = gauss(rng);
    BcjrResult exact = cc_bcjr_decode(llr, {}, {}, true);
    BcjrResult approx = cc_bcjr_decode(llr, {}, {}, false);
    double diff = 0.0;
    for (int i = 0; i < k; ++i) diff = std::max(diff, std::abs(exact.info_app[i] - approx.info_app[i]));
    CHECK(diff > 1e-9);
    CHECK(diff < 2.0);
}

TEST_CASE("interleaver round trip and determinism") {
    Interleaver a(64, 9), b(64, 9), c(64, 10);
    CHECK(a.permutation() == b.permutation());
    CHECK(a.permutation() != c.permutation());
    std::vector<double> v(64);
    for (int i = 0; i < 64; ++i) v[i] = i * 0.5;
    CHECK(a.deinterleave(a.interleave(v)) == v);
    CHECK(a.interleave(a.deinterleave(v)) == v);
    CHECK_THROWS_AS(a.interleave(std::vector<double>(63)), std::invalid_argument);
    // permutation is a bijection
    std::vector<int> seen(64, 0);
    for (int p : a.permutation()) seen[p] += 1;
    for (int s : seen) CHECK(s == 1);
}

TEST_CASE("bad code lengths are rejected") {
    CHECK_THROWS_AS(cc_bcjr_decode(LlrBlock(7), {}), std::invalid_argument);
    CHECK_THROWS_AS(cc_bcjr_decode(LlrBlock(20), LlrBlock(5)), std::invalid_argument);
}
