#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "ftn/llr.hpp"

namespace ftn {

// Rate-1/2 (7,5) non-recursive convolutional code, memory 2, 4 trellis states.
// Codewords are terminated with two zero tail bits, appending exactly 4
// termination code bits: N = 2*(K + 2).
struct CcSpec {
    unsigned gen_a = 07;  // octal 7 -> 111
    unsigned gen_b = 05;  // octal 5 -> 101
    static constexpr int memory = 2;
    static constexpr int num_states = 4;
    static constexpr int k_b = 1;
    static constexpr int n_b = 2;
};

int cc_code_length(int k);

std::vector<uint8_t> cc_encode(const std::vector<uint8_t>& info, const CcSpec& spec = {});

struct BcjrResult {
    LlrBlock info_app;        // APP LLRs on the K information bits
    LlrBlock code_app;        // APP LLRs on all N code bits
    LlrBlock code_extrinsic;  // code_app - input channel LLR
};

// Exact log-MAP forward-backward over the terminated 4-state trellis.
// code_llr has length N = 2*(K+2); info_prior is either empty or length K.
// exact_max_star = false degrades to max-log-MAP (used in tests only).
BcjrResult cc_bcjr_decode(const LlrBlock& code_llr, const LlrBlock& info_prior,
                          const CcSpec& spec = {}, bool exact_max_star = true);

// Seeded uniform-random permutation; deinterleave inverts interleave.
class Interleaver {
public:
    Interleaver(int n, uint64_t seed);

    int size() const { return static_cast<int>(perm_.size()); }
    const std::vector<int>& permutation() const { return perm_; }

    template <typename T>
    std::vector<T> interleave(const std::vector<T>& v) const {
        check(v.size());
        std::vector<T> out(v.size());
        for (size_t i = 0; i < v.size(); ++i)
            out[static_cast<size_t>(perm_[i])] = v[i];
        return out;
    }

    template <typename T>
    std::vector<T> deinterleave(const std::vector<T>& v) const {
        check(v.size());
        std::vector<T> out(v.size());
        for (size_t i = 0; i < v.size(); ++i)
            out[i] = v[static_cast<size_t>(perm_[i])];
        return out;
    }

private:
    void check(size_t len) const {
        if (len != perm_.size()) throw std::invalid_argument("interleaver: length mismatch");
    }
    std::vector<int> perm_;
};

}  // namespace ftn
