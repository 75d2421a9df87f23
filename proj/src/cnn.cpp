#include "ftn/cnn.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftn {

void CnnHyper::validate() const {
    if (fn1 < 1 || fn2 < 1 || fl1 < 1 || fl2 < 1)
        throw std::invalid_argument("cnn: filter counts/sizes must be >= 1");
    if (fs1 < 1 || fs2 < 1) throw std::invalid_argument("cnn: strides must be >= 1");
    if (std1 < 0.0 || std2 < 0.0) throw std::invalid_argument("cnn: init std must be >= 0");
}

long CnnModel::parameter_count() const {
    long per_iter = static_cast<long>(hyper.fn1) * hyper.fl1 + hyper.fn1 +
                    static_cast<long>(hyper.fn2) * hyper.fn1 * hyper.fl2 + hyper.fn2 +
                    static_cast<long>(n) * dense_in() + n + l_e;
    return per_iter * m_max;
}

namespace {

double truncated_normal(double stddev, std::mt19937_64& rng) {
    if (stddev == 0.0) return 0.0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    double z;
    do {
        z = gauss(rng);
    } while (std::abs(z) > 2.0);
    return z * stddev;
}

}  // namespace

CnnModel init_params(int n, int l_e, int m_max, const CnnHyper& hyper, std::mt19937_64& rng) {
    hyper.validate();
    if (n < hyper.fl1) throw std::invalid_argument("cnn: n must be >= first filter length");
    CnnModel model;
    model.n = n;
    model.l_e = l_e;
    model.m_max = m_max;
    model.hyper = hyper;
    model.iters.resize(static_cast<size_t>(m_max));
    model.edge_scale.assign(static_cast<size_t>(m_max),
                            std::vector<double>(static_cast<size_t>(l_e), 1.0));
    int dense_in = model.dense_in();
    for (auto& it : model.iters) {
        it.conv1_w.resize(static_cast<size_t>(hyper.fn1) * hyper.fl1);
        for (auto& w : it.conv1_w) w = truncated_normal(hyper.std1, rng);
        it.conv1_b.assign(static_cast<size_t>(hyper.fn1), 0.0);
        it.conv2_w.resize(static_cast<size_t>(hyper.fn2) * hyper.fn1 * hyper.fl2);
        for (auto& w : it.conv2_w) w = truncated_normal(hyper.std2, rng);
        it.conv2_b.assign(static_cast<size_t>(hyper.fn2), 0.0);
        it.dense_w.resize(static_cast<size_t>(n) * dense_in);
        for (auto& w : it.dense_w) w = truncated_normal(hyper.std2, rng);
        it.dense_b.assign(static_cast<size_t>(n), 0.0);
    }
    return model;
}

LlrBlock cnn_forward(const LlrBlock& u, const CnnModel& model, int iter) {
    if (static_cast<int>(u.size()) != model.n)
        throw std::invalid_argument("cnn_forward: input length mismatch");
    if (iter < 0 || iter >= model.m_max)
        throw std::invalid_argument("cnn_forward: iteration index out of range");
    const CnnHyper& h = model.hyper;
    const CnnIterParams& p = model.iters[static_cast<size_t>(iter)];
    int n = model.n;
    int out1 = model.conv1_out_len();
    int out2 = model.conv2_out_len();
    int pad1 = same_pad_left(n, h.fl1, h.fs1);
    int pad2 = same_pad_left(out1, h.fl2, h.fs2);

    // conv1: single input channel, linear
    std::vector<double> c1(static_cast<size_t>(h.fn1) * out1, 0.0);
    for (int f = 0; f < h.fn1; ++f) {
        const double* w = &p.conv1_w[static_cast<size_t>(f) * h.fl1];
        for (int o = 0; o < out1; ++o) {
            double acc = p.conv1_b[static_cast<size_t>(f)];
            int start = o * h.fs1 - pad1;
            for (int k = 0; k < h.fl1; ++k) {
                int idx = start + k;
                if (idx >= 0 && idx < n) acc += w[k] * u[static_cast<size_t>(idx)];
            }
            c1[static_cast<size_t>(f) * out1 + o] = acc;
        }
    }

    // conv2: fn1 input channels, linear
    std::vector<double> c2(static_cast<size_t>(h.fn2) * out2, 0.0);
    for (int f = 0; f < h.fn2; ++f) {
        for (int o = 0; o < out2; ++o) {
            double acc = p.conv2_b[static_cast<size_t>(f)];
            int start = o * h.fs2 - pad2;
            for (int c = 0; c < h.fn1; ++c) {
                const double* w =
                    &p.conv2_w[(static_cast<size_t>(f) * h.fn1 + c) * h.fl2];
                const double* in = &c1[static_cast<size_t>(c) * out1];
                for (int k = 0; k < h.fl2; ++k) {
                    int idx = start + k;
                    if (idx >= 0 && idx < out1) acc += w[k] * in[idx];
                }
            }
            c2[static_cast<size_t>(f) * out2 + o] = acc;
        }
    }

    // dense with a(z) = -max(0, z)
    int dense_in = model.dense_in();
    LlrBlock v(static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        double z = p.dense_b[static_cast<size_t>(i)];
        const double* w = &p.dense_w[static_cast<size_t>(i) * dense_in];
        for (int k = 0; k < dense_in; ++k) z += w[k] * c2[static_cast<size_t>(k)];
        v[static_cast<size_t>(i)] = -std::max(0.0, z);
    }
    return v;
}

ComplexityRow complexity_log_map(int n, int l_e) {
    ComplexityRow r;
    long pw = 1L << l_e;
    r.additions = static_cast<long>(n) * (15 * pw + 9);
    r.lookups = static_cast<long>(n) * (10 * pw - 4);
    return r;
}

ComplexityRow complexity_spda(int n, int l_e) {
    ComplexityRow r;
    r.additions = static_cast<long>(n) * (32L * l_e + 6);
    r.lookups = 4L * n * l_e;
    return r;
}

ComplexityRow complexity_dlspda_extra(int n, const CnnHyper& h) {
    long o1 = conv_out_len(n, h.fs1);
    long o2 = conv_out_len(static_cast<int>(o1), h.fs2);
    ComplexityRow r;
    r.additions = 2L * n + o1 * (static_cast<long>(h.fl1) * h.fn1 + 1) +
                  o2 * (static_cast<long>(h.fl2) * h.fn1 * h.fn2 + 1) +
                  o2 * static_cast<long>(h.fn2) * n;
    r.lookups = o1 * static_cast<long>(h.fl1) * h.fn1 +
                o2 * (static_cast<long>(h.fl2) * h.fn1 * h.fn2 + 1) +
                o2 * static_cast<long>(h.fn2) * n;
    return r;
}

namespace {

constexpr const char* kModelMagic = "ftnlab-model v1";

void write_array(std::ostream& os, const std::string& name,
                 const std::vector<double>& a) {
    os << "param " << name << " " << a.size() << "\n";
    char buf[64];
    for (double v : a) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf << "\n";
    }
}

std::vector<double> read_array(std::istream& is, const std::string& want, size_t want_len,
                               const char* layer) {
    std::string tok, name;
    size_t len = 0;
    if (!(is >> tok >> name >> len) || tok != "param" || name != want)
        throw std::runtime_error(std::string("model file: expected array ") + want);
    if (len != want_len)
        throw std::runtime_error(std::string("model file: shape mismatch in ") + layer);
    std::vector<double> a(len);
    for (auto& v : a)
        if (!(is >> v)) throw std::runtime_error("model file: truncated array " + name);
    return a;
}

}  // namespace

void save_model(const CnnModel& model, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("save_model: cannot open " + path);
    os << kModelMagic << "\n";
    os << "n " << model.n << "\n";
    os << "l_e " << model.l_e << "\n";
    os << "m_max " << model.m_max << "\n";
    const CnnHyper& h = model.hyper;
    char buf[160];
    std::snprintf(buf, sizeof buf, "hyper %d %d %d %d %d %d %.17g %.17g", h.fn1, h.fl1,
                  h.fs1, h.fn2, h.fl2, h.fs2, h.std1, h.std2);
    os << buf << "\n";
    std::snprintf(buf, sizeof buf, "meta %llu %ld %ld %.17g %.17g %.17g %.17g",
                  static_cast<unsigned long long>(model.meta.seed), model.meta.batches_seen,
                  model.meta.samples_seen, model.meta.snr_lo, model.meta.snr_hi,
                  model.meta.rms_decay, model.meta.rms_eps);
    os << buf << "\n";
    for (int m = 0; m < model.m_max; ++m) {
        const CnnIterParams& p = model.iters[static_cast<size_t>(m)];
        std::string pre = "iter" + std::to_string(m + 1) + ".";
        write_array(os, pre + "conv1.w", p.conv1_w);
        write_array(os, pre + "conv1.b", p.conv1_b);
        write_array(os, pre + "conv2.w", p.conv2_w);
        write_array(os, pre + "conv2.b", p.conv2_b);
        write_array(os, pre + "dense.w", p.dense_w);
        write_array(os, pre + "dense.b", p.dense_b);
        write_array(os, pre + "edge_scale", model.edge_scale[static_cast<size_t>(m)]);
    }
    os << "end\n";
    if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

CnnModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("load_model: cannot open " + path);
    std::string line;
    if (!std::getline(is, line) || line != kModelMagic)
        throw std::runtime_error("load_model: bad magic/version in " + path);
    CnnModel model;
    std::string key;
    if (!(is >> key >> model.n) || key != "n")
        throw std::runtime_error("load_model: missing n");
    if (!(is >> key >> model.l_e) || key != "l_e")
        throw std::runtime_error("load_model: missing l_e");
    if (!(is >> key >> model.m_max) || key != "m_max")
        throw std::runtime_error("load_model: missing m_max");
    CnnHyper& h = model.hyper;
    if (!(is >> key >> h.fn1 >> h.fl1 >> h.fs1 >> h.fn2 >> h.fl2 >> h.fs2 >> h.std1 >>
          h.std2) ||
        key != "hyper")
        throw std::runtime_error("load_model: missing hyper");
    unsigned long long seed = 0;
    if (!(is >> key >> seed >> model.meta.batches_seen >> model.meta.samples_seen >>
          model.meta.snr_lo >> model.meta.snr_hi >> model.meta.rms_decay >>
          model.meta.rms_eps) ||
        key != "meta")
        throw std::runtime_error("load_model: missing meta");
    model.meta.seed = seed;
    h.validate();
    if (model.n < 1 || model.m_max < 1 || model.l_e < 0)
        throw std::runtime_error("load_model: invalid dimensions");

    model.iters.resize(static_cast<size_t>(model.m_max));
    model.edge_scale.resize(static_cast<size_t>(model.m_max));
    size_t dense_in = static_cast<size_t>(model.dense_in());
    for (int m = 0; m < model.m_max; ++m) {
        CnnIterParams& p = model.iters[static_cast<size_t>(m)];
        std::string pre = "iter" + std::to_string(m + 1) + ".";
        p.conv1_w = read_array(is, pre + "conv1.w",
                               static_cast<size_t>(h.fn1) * h.fl1, "conv1");
        p.conv1_b = read_array(is, pre + "conv1.b", static_cast<size_t>(h.fn1), "conv1");
        p.conv2_w = read_array(is, pre + "conv2.w",
                               static_cast<size_t>(h.fn2) * h.fn1 * h.fl2, "conv2");
        p.conv2_b = read_array(is, pre + "conv2.b", static_cast<size_t>(h.fn2), "conv2");
        p.dense_w = read_array(is, pre + "dense.w",
                               static_cast<size_t>(model.n) * dense_in, "dense");
        p.dense_b = read_array(is, pre + "dense.b", static_cast<size_t>(model.n), "dense");
        model.edge_scale[static_cast<size_t>(m)] =
            read_array(is, pre + "edge_scale", static_cast<size_t>(model.l_e), "edge_scale");
    }
    if (!(is >> key) || key != "end") throw std::runtime_error("load_model: truncated file");
    return model;
}

void check_model_shape(const CnnModel& model, int n, int l_e, int m_max) {
    if (model.n != n)
        throw std::runtime_error("model shape mismatch: dense layer was trained for N = " +
                                 std::to_string(model.n) + ", configuration requires N = " +
                                 std::to_string(n));
    if (model.l_e != l_e)
        throw std::runtime_error("model shape mismatch: edge_scale trained for L_E = " +
                                 std::to_string(model.l_e));
    if (model.m_max != m_max)
        throw std::runtime_error("model shape mismatch: trained for m_max = " +
                                 std::to_string(model.m_max));
}

}  // namespace ftn
