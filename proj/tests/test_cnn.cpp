#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "ftn/cnn.hpp"

using namespace ftn;

TEST_CASE("output lengths follow ceil(n/stride)") {
    CHECK(conv_out_len(250, 5) == 50);
    CHECK(conv_out_len(52, 5) == 11);
    CHECK(conv_out_len(50, 1) == 50);
    CHECK(conv_out_len(7, 3) == 3);
}

TEST_CASE("same padding splits left-biased") {
    // length 10, kernel 8, stride 5 -> out 2, total pad 3, left 1
    CHECK(same_pad_left(10, 8, 5) == 1);
    // length 5, kernel 3, stride 1 -> total pad 2, left 1
    CHECK(same_pad_left(5, 3, 1) == 1);
    // kernel shorter than stride coverage can need no padding
    CHECK(same_pad_left(10, 2, 2) == 0);
}

TEST_CASE("hyper validation") {
    CnnHyper h;
    CHECK_NOTHROW(h.validate());
    h.fl1 = 0;
    CHECK_THROWS_AS(h.validate(), std::invalid_argument);
}

TEST_CASE("initialization is truncated normal with zero biases") {
    std::mt19937_64 rng(2);
    CnnModel m = init_params(250, 3, 6, CnnHyper{}, rng);
    CHECK(m.iters.size() == 6);
    CHECK(m.edge_scale.size() == 6);
    for (const auto& row : m.edge_scale) {
        CHECK(row.size() == 3);
        for (double s : row) CHECK(s == 1.0);
    }
    for (const auto& it : m.iters) {
        for (double w : it.conv1_w) CHECK(std::abs(w) <= 2.0 * 0.03 + 1e-15);
        for (double w : it.conv2_w) CHECK(std::abs(w) <= 2.0 * 0.03 + 1e-15);
        for (double w : it.dense_w) CHECK(std::abs(w) <= 2.0 * 0.03 + 1e-15);
        for (double b : it.conv1_b) CHECK(b == 0.0);
        for (double b : it.conv2_b) CHECK(b == 0.0);
        for (double b : it.dense_b) CHECK(b == 0.0);
    }
    CHECK(m.conv1_out_len() == 50);
    CHECK(m.dense_in() == 50);
    // two models from different seeds differ
    std::mt19937_64 rng2(3);
    CnnModel m2 = init_params(250, 3, 6, CnnHyper{}, rng2);
    CHECK(m.iters[0].conv1_w != m2.iters[0].conv1_w);
}

TEST_CASE("forward pass matches a direct dense computation") {
    // tiny single-filter configuration solved by hand-rolled convolution
    CnnHyper h;
    h.fn1 = 1;
    h.fl1 = 3;
    h.fs1 = 1;
    h.fn2 = 1;
    h.fl2 = 1;
    h.fs2 = 1;
    std::mt19937_64 rng(4);
    CnnModel m = init_params(6, 2, 1, h, rng);
    auto& it = m.iters[0];
    it.conv1_w = {0.5, -1.0, 0.25};
    it.conv1_b = {0.1};
    it.conv2_w = {2.0};
    it.conv2_b = {0.0};
    for (int o = 0; o < 6; ++o)
        for (int i = 0; i < 6; ++i) it.dense_w[o * 6 + i] = o == i ? 1.0 : 0.0;
    std::fill(it.dense_b.begin(), it.dense_b.end(), 0.0);

    LlrBlock u = {1.0, -2.0, 0.5, 0.0, 3.0, -1.0};
    LlrBlock v = cnn_forward(u, m, 0);
    // conv1: same padding (pad 1 each side), then conv2 doubles, then identity
    // dense with a(z) = -max(0, z)
    std::vector<double> padded = {0.0, 1.0, -2.0, 0.5, 0.0, 3.0, -1.0, 0.0};
    for (int o = 0; o < 6; ++o) {
        double c1 = 0.1;
        for (int k = 0; k < 3; ++k) c1 += it.conv1_w[k] * padded[o + k];
        double z = 2.0 * c1;
        double expect = -std::max(0.0, z);
        CHECK(v[o] == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("activation output is never positive") {
    std::mt19937_64 rng(8);
    CnnModel m = init_params(52, 2, 6, CnnHyper{}, rng);
    std::normal_distribution<double> gauss(0.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        LlrBlock u(52);
        for (auto& x : u) x = gauss(rng);
        for (int iter = 0; iter < 6; ++iter) {
            LlrBlock v = cnn_forward(u, m, iter);
            CHECK(v.size() == 52);
            for (double x : v) CHECK(x <= 0.0);
        }
    }
    CHECK_THROWS_AS(cnn_forward(LlrBlock(51), m, 0), std::invalid_argument);
    CHECK_THROWS_AS(cnn_forward(LlrBlock(52), m, 6), std::invalid_argument);
}

TEST_CASE("complexity rows reproduce the expected counts") {
    ComplexityRow lm = complexity_log_map(250, 3);
    CHECK(lm.additions == 250 * (15 * 8 + 9));
    CHECK(lm.lookups == 250 * (10 * 8 - 4));
    ComplexityRow sp = complexity_spda(250, 3);
    CHECK(sp.additions == 250 * (32 * 3 + 6));
    CHECK(sp.lookups == 4 * 250 * 3);
    ComplexityRow dl = complexity_dlspda_extra(250, CnnHyper{});
    CHECK(dl.additions > 0);
    CHECK(dl.lookups >= 0);
}

TEST_CASE("model io round trip is exact") {
    std::mt19937_64 rng(10);
    CnnModel m = init_params(52, 2, 3, CnnHyper{}, rng);
    m.meta.seed = 99;
    m.meta.batches_seen = 1234;
    m.edge_scale[1][0] = 0.87654321234567891;
    const std::string path = "model_roundtrip.tmp";
    save_model(m, path);
    CnnModel r = load_model(path);
    CHECK(r.n == m.n);
    CHECK(r.meta.seed == 99);
    CHECK(r.meta.batches_seen == 1234);
    CHECK(r.edge_scale == m.edge_scale);
    std::normal_distribution<double> gauss(0.0, 3.0);
    for (int trial = 0; trial < 1000; ++trial) {
        LlrBlock u(52);
        for (auto& x : u) x = gauss(rng);
        int iter = trial % 3;
        CHECK(cnn_forward(u, m, iter) == cnn_forward(u, r, iter));  // bitwise
    }
    std::remove(path.c_str());
}

TEST_CASE("truncated model files fail cleanly") {
    std::mt19937_64 rng(12);
    CnnModel m = init_params(20, 2, 2, CnnHyper{}, rng);
    const std::string path = "model_trunc.tmp";
    save_model(m, path);
    std::ifstream is(path);
    std::string all((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    is.close();
    std::ofstream os(path, std::ios::trunc);
    os << all.substr(0, all.size() / 2);
    os.close();
    CHECK_THROWS_AS(load_model(path), std::runtime_error);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_model("does_not_exist.tmp"), std::runtime_error);
}

TEST_CASE("shape mismatch names the dense layer") {
    std::mt19937_64 rng(13);
    CnnModel m = init_params(250, 3, 6, CnnHyper{}, rng);
    CHECK_NOTHROW(check_model_shape(m, 250, 3, 6));
    try {
        check_model_shape(m, 200, 3, 6);
        CHECK(false);
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("dense") != std::string::npos);
    }
    CHECK_THROWS_AS(check_model_shape(m, 250, 2, 6), std::runtime_error);
    CHECK_THROWS_AS(check_model_shape(m, 250, 3, 5), std::runtime_error);
}

TEST_CASE("parameter count matches the stored vectors") {
    std::mt19937_64 rng(14);
    CnnModel m = init_params(52, 2, 4, CnnHyper{}, rng);
    long count = 0;
    for (const auto& it : m.iters)
        count += static_cast<long>(it.conv1_w.size() + it.conv1_b.size() + it.conv2_w.size() +
                                   it.conv2_b.size() + it.dense_w.size() + it.dense_b.size());
    for (const auto& row : m.edge_scale) count += static_cast<long>(row.size());
    CHECK(m.parameter_count() == count);
}
