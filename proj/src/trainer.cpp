#include "ftn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include "ftn/pulse.hpp"

namespace ftn {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

double j_value(double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("j_value: sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    // I = 1 - E_z[ log2(1 + e^{-(sigma^2/2 + sigma z)}) ], z ~ N(0,1).
    // Composite Simpson over z in [-10, 10].
    const int segments = 2000;
    const double lo = -10.0, hi = 10.0;
    const double h = (hi - lo) / segments;
    double mu = 0.5 * sigma * sigma;
    auto integrand = [&](double z) {
        double l = mu + sigma * z;
        double phi = std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
        return phi * softplus(-l) / kLn2;
    };
    double acc = integrand(lo) + integrand(hi);
    for (int i = 1; i < segments; ++i)
        acc += integrand(lo + i * h) * (i % 2 ? 4.0 : 2.0);
    double expectation = acc * h / 3.0;
    return std::clamp(1.0 - expectation, 0.0, 1.0);
}

double j_inverse(double mi) {
    if (mi < 0.0 || mi >= 1.0)
        throw std::invalid_argument("j_inverse: mutual information must be in [0,1)");
    if (mi == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (j_value(hi) < mi) {
        hi *= 2.0;
        if (hi > 1e6) throw std::runtime_error("j_inverse: bracket expansion failed");
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        double v = j_value(mid);
        if (std::abs(v - mi) < 1e-6) break;
        (v < mi ? lo : hi) = mid;
    }
    return mid;
}

namespace {

// j_inverse is quadrature-heavy; batches reuse a handful of targets.
double j_inverse_cached(double mi) {
    static thread_local std::map<double, double> memo;
    auto it = memo.find(mi);
    if (it != memo.end()) return it->second;
    double v = j_inverse(mi);
    memo.emplace(mi, v);
    return v;
}

}  // namespace

LlrBlock sample_extrinsic(const std::vector<double>& symbols, double sigma_e,
                          std::mt19937_64& rng) {
    if (sigma_e < 0.0) throw std::invalid_argument("sample_extrinsic: sigma_e must be >= 0");
    LlrBlock out(symbols.size(), 0.0);
    if (sigma_e == 0.0) return out;
    std::normal_distribution<double> gauss(0.0, 1.0);
    double mean_mag = 0.5 * sigma_e * sigma_e;
    for (size_t i = 0; i < symbols.size(); ++i)
        out[i] = symbols[i] * mean_mag + sigma_e * gauss(rng);
    return out;
}

void TrainConfig::validate() const {
    if (!(gamma > 0.0) || gamma > 1.0) throw std::invalid_argument("train: gamma must be in (0,1]");
    if (omega.empty()) throw std::invalid_argument("train: omega target set must not be empty");
    for (double w : omega)
        if (w < 0.0 || w > 1.0) throw std::invalid_argument("train: omega values must be in [0,1]");
    if (!(snr_lo <= snr_hi)) throw std::invalid_argument("train: SNR range is inverted");
    if (m_max < 1 || v_factor < 1 || k_info < 1 || learning_rate <= 0.0 || budget_samples < 1)
        throw std::invalid_argument("train: invalid configuration");
    hyper.validate();
}

TrainingBatch build_batch(const TrainConfig& cfg, const FtnChannel& channel,
                          const Interleaver& pi, std::mt19937_64& rng) {
    int n = cfg.block_length();
    if (channel.gram().n != n || pi.size() != n)
        throw std::invalid_argument("build_batch: channel/interleaver length mismatch");

    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<uint8_t> info(static_cast<size_t>(cfg.k_info));
    for (auto& b : info) b = static_cast<uint8_t>(bit(rng));
    std::vector<uint8_t> code = cc_encode(info);
    std::vector<double> x = bpsk_modulate(pi.interleave(code));

    std::uniform_real_distribution<double> snr_draw(cfg.snr_lo, cfg.snr_hi);
    double snr_db = snr_draw(rng);
    double sigma2 = std::pow(10.0, -snr_db / 10.0) / (2.0 * cfg.code_rate());

    std::vector<double> y = channel.transmit(x, sigma2, rng);
    LlrBlock psi = channel_llr(y, sigma2);

    TrainingBatch batch;
    batch.samples.reserve(cfg.omega.size() * static_cast<size_t>(cfg.v_factor));
    for (double target_mi : cfg.omega) {
        // Omega includes 1; sigma is unbounded there, so saturate just below.
        double sigma_e = j_inverse_cached(std::min(target_mi, 0.9999));
        for (int v = 0; v < cfg.v_factor; ++v) {
            TrainingSample s;
            s.symbols = x;
            s.sigma2 = sigma2;
            LlrBlock upsilon = sample_extrinsic(x, sigma_e, rng);
            s.combined.resize(psi.size());
            for (size_t i = 0; i < psi.size(); ++i) s.combined[i] = psi[i] + upsilon[i];
            batch.samples.push_back(std::move(s));
        }
    }
    return batch;
}

double sigmoid_cross_entropy(const LlrBlock& llr, const std::vector<double>& symbols) {
    if (llr.size() != symbols.size())
        throw std::invalid_argument("cross_entropy: length mismatch");
    double acc = 0.0;
    for (size_t i = 0; i < llr.size(); ++i) acc += softplus(-symbols[i] * llr[i]);
    return acc / static_cast<double>(llr.size());
}

double multi_loss(const std::vector<LlrBlock>& per_iter_llr,
                  const std::vector<double>& symbols, double gamma) {
    int m_max = static_cast<int>(per_iter_llr.size());
    double acc = 0.0;
    for (int m = 1; m <= m_max; ++m)
        acc += std::pow(gamma, m_max - m) *
               sigmoid_cross_entropy(per_iter_llr[static_cast<size_t>(m - 1)], symbols);
    return acc;
}

namespace {

struct Layout {
    int conv1_w, conv1_b, conv2_w, conv2_b, dense_w, dense_b, edge_scale;
    int per_iter;
};

Layout layout_of(const CnnModel& m) {
    const CnnHyper& h = m.hyper;
    Layout l;
    l.conv1_w = h.fn1 * h.fl1;
    l.conv1_b = h.fn1;
    l.conv2_w = h.fn2 * h.fn1 * h.fl2;
    l.conv2_b = h.fn2;
    l.dense_w = m.n * m.dense_in();
    l.dense_b = m.n;
    l.edge_scale = m.l_e;
    l.per_iter = l.conv1_w + l.conv1_b + l.conv2_w + l.conv2_b + l.dense_w + l.dense_b +
                 l.edge_scale;
    return l;
}

}  // namespace

std::vector<double> flatten_params(const CnnModel& model) {
    std::vector<double> flat;
    flat.reserve(static_cast<size_t>(model.parameter_count()));
    for (int m = 0; m < model.m_max; ++m) {
        const CnnIterParams& p = model.iters[static_cast<size_t>(m)];
        flat.insert(flat.end(), p.conv1_w.begin(), p.conv1_w.end());
        flat.insert(flat.end(), p.conv1_b.begin(), p.conv1_b.end());
        flat.insert(flat.end(), p.conv2_w.begin(), p.conv2_w.end());
        flat.insert(flat.end(), p.conv2_b.begin(), p.conv2_b.end());
        flat.insert(flat.end(), p.dense_w.begin(), p.dense_w.end());
        flat.insert(flat.end(), p.dense_b.begin(), p.dense_b.end());
        const auto& es = model.edge_scale[static_cast<size_t>(m)];
        flat.insert(flat.end(), es.begin(), es.end());
    }
    return flat;
}

void unflatten_params(const std::vector<double>& flat, CnnModel& model) {
    if (static_cast<long>(flat.size()) != model.parameter_count())
        throw std::invalid_argument("unflatten_params: size mismatch");
    size_t pos = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(flat.begin() + static_cast<long>(pos),
                  flat.begin() + static_cast<long>(pos + dst.size()), dst.begin());
        pos += dst.size();
    };
    for (int m = 0; m < model.m_max; ++m) {
        CnnIterParams& p = model.iters[static_cast<size_t>(m)];
        take(p.conv1_w);
        take(p.conv1_b);
        take(p.conv2_w);
        take(p.conv2_b);
        take(p.dense_w);
        take(p.dense_b);
        take(model.edge_scale[static_cast<size_t>(m)]);
    }
}

int tape_forward_loss(Tape& tape, const CnnModel& model, const TrainingSample& sample,
                      const std::vector<double>& theta, double gamma) {
    const CnnHyper& h = model.hyper;
    int n = model.n;
    int l_e = model.l_e;
    int deg = 2 * l_e;
    if (static_cast<int>(sample.combined.size()) != n)
        throw std::invalid_argument("tape_forward_loss: sample length mismatch");

    tape.clear();
    // Parameter leaves first, in flat order (their tape ids equal flat indices).
    std::vector<double> flat = flatten_params(model);
    for (double v : flat) tape.leaf(v);
    Layout lay = layout_of(model);

    auto param = [&](int m, int local) { return m * lay.per_iter + local; };
    int off_conv1_w = 0;
    int off_conv1_b = off_conv1_w + lay.conv1_w;
    int off_conv2_w = off_conv1_b + lay.conv1_b;
    int off_conv2_b = off_conv2_w + lay.conv2_w;
    int off_dense_w = off_conv2_b + lay.conv2_b;
    int off_dense_b = off_dense_w + lay.dense_w;
    int off_edge = off_dense_b + lay.dense_b;

    std::vector<int> base(static_cast<size_t>(n));
    std::vector<int> app(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        base[static_cast<size_t>(i)] = tape.leaf(sample.combined[static_cast<size_t>(i)]);
        app[static_cast<size_t>(i)] = tape.clip(base[static_cast<size_t>(i)]);
    }
    int zero = tape.leaf(0.0);
    std::vector<int> q(static_cast<size_t>(n) * deg, zero);
    std::vector<int> p(q.size(), zero);

    // same edge indexing as MessageState
    auto edge_index = [&](int i, int j) {
        int d = j - i;
        if (d == 0 || d < -l_e || d > l_e || j < 0 || j >= n) return -1;
        return d < 0 ? d + l_e : d + l_e - 1;
    };

    int out1 = model.conv1_out_len();
    int out2 = model.conv2_out_len();
    int pad1 = same_pad_left(n, h.fl1, h.fs1);
    int pad2 = same_pad_left(out1, h.fl2, h.fs2);
    int dense_in = model.dense_in();

    int loss = -1;
    for (int m = 0; m < model.m_max; ++m) {
        for (int i = 0; i < n; ++i)
            for (int j = i - l_e; j <= i + l_e; ++j) {
                int e = edge_index(i, j);
                if (e < 0) continue;
                size_t idx = static_cast<size_t>(i) * deg + e;
                p[idx] = tape.clip(tape.sub(app[static_cast<size_t>(i)], q[idx]));
            }
        for (int i = 0; i < n; ++i)
            for (int j = i - l_e; j <= i + l_e; ++j) {
                int e = edge_index(i, j);
                if (e < 0) continue;
                int e_rev = edge_index(j, i);
                int d = std::abs(j - i);
                int scale_node = param(m, off_edge + d - 1);
                q[static_cast<size_t>(i) * deg + e] =
                    tape.edge_message(p[static_cast<size_t>(j) * deg + e_rev], scale_node,
                                      theta[static_cast<size_t>(d)]);
            }
        std::vector<int> u(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int acc = zero;
            for (int e = 0; e < deg; ++e) acc = tape.add(acc, q[static_cast<size_t>(i) * deg + e]);
            u[static_cast<size_t>(i)] = tape.clip(acc);
        }

        // CNN function node on the tape (mirrors cnn_forward)
        std::vector<int> c1(static_cast<size_t>(h.fn1) * out1);
        for (int f = 0; f < h.fn1; ++f)
            for (int o = 0; o < out1; ++o) {
                int acc = param(m, off_conv1_b + f);
                int start = o * h.fs1 - pad1;
                for (int k = 0; k < h.fl1; ++k) {
                    int idx = start + k;
                    if (idx < 0 || idx >= n) continue;
                    acc = tape.fma(param(m, off_conv1_w + f * h.fl1 + k),
                                   u[static_cast<size_t>(idx)], acc);
                }
                c1[static_cast<size_t>(f) * out1 + o] = acc;
            }
        std::vector<int> c2(static_cast<size_t>(h.fn2) * out2);
        for (int f = 0; f < h.fn2; ++f)
            for (int o = 0; o < out2; ++o) {
                int acc = param(m, off_conv2_b + f);
                int start = o * h.fs2 - pad2;
                for (int c = 0; c < h.fn1; ++c)
                    for (int k = 0; k < h.fl2; ++k) {
                        int idx = start + k;
                        if (idx < 0 || idx >= out1) continue;
                        acc = tape.fma(param(m, off_conv2_w + (f * h.fn1 + c) * h.fl2 + k),
                                       c1[static_cast<size_t>(c) * out1 + idx], acc);
                    }
                c2[static_cast<size_t>(f) * out2 + o] = acc;
            }
        std::vector<int> v(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            int acc = param(m, off_dense_b + i);
            for (int k = 0; k < dense_in; ++k)
                acc = tape.fma(param(m, off_dense_w + i * dense_in + k),
                               c2[static_cast<size_t>(k)], acc);
            v[static_cast<size_t>(i)] = tape.clip(tape.neg_relu(acc));
        }

        int ce = zero;
        for (int i = 0; i < n; ++i) {
            int acc = tape.add(base[static_cast<size_t>(i)], v[static_cast<size_t>(i)]);
            for (int e = 0; e < deg; ++e)
                acc = tape.add(acc, q[static_cast<size_t>(i) * deg + e]);
            app[static_cast<size_t>(i)] = tape.clip(acc);
            ce = tape.add(ce, tape.sigmoid_ce(app[static_cast<size_t>(i)],
                                              sample.symbols[static_cast<size_t>(i)]));
        }
        int ce_avg = tape.scale(ce, 1.0 / n);
        int weighted = tape.scale(ce_avg, std::pow(gamma, model.m_max - 1 - m));
        loss = loss < 0 ? weighted : tape.add(loss, weighted);
    }
    return loss;
}

double loss_and_gradients(const CnnModel& model, const TrainingSample& sample,
                          const GramMatrix& gram, double gamma,
                          std::vector<double>& grad_out) {
    static thread_local Tape tape;
    std::vector<double> theta(static_cast<size_t>(model.l_e) + 1, 0.0);
    for (int d = 1; d <= model.l_e; ++d)
        theta[static_cast<size_t>(d)] = gram.g(d) / sample.sigma2;
    int loss = tape_forward_loss(tape, model, sample, theta, gamma);
    std::vector<double> adj = tape.backward(loss);
    long p_count = model.parameter_count();
    grad_out.assign(static_cast<size_t>(p_count), 0.0);
    std::copy(adj.begin(), adj.begin() + p_count, grad_out.begin());
    return tape.val(loss);
}

ConvergenceMonitor::ConvergenceMonitor(long report_every, long window)
    : report_every_(report_every), window_(window) {}

void ConvergenceMonitor::record(double batch_loss) {
    ++count_;
    report_sum_ += batch_loss;
    window_sum_ += batch_loss;
    if (count_ % window_ == 0) {
        double avg = window_sum_ / static_cast<double>(window_);
        window_sum_ = 0.0;
        if (norm_ == 0.0) norm_ = avg;  // xi^0 convention: first window -> 1
        double xi = avg / norm_;
        double prev = xi_avg_.empty() ? 1.0 : xi_avg_.back();
        xi_avg_.push_back(xi);
        xi_cg_.push_back(prev != 0.0 ? std::abs((xi - prev) / prev) : 0.0);
    }
    if (count_ % report_every_ == 0) {
        double avg = report_sum_ / static_cast<double>(report_every_);
        report_sum_ = 0.0;
        ConvergencePoint pt;
        pt.batch_index = count_;
        if (report_norm_ == 0.0) report_norm_ = avg;
        pt.avg_loss = avg / report_norm_;
        pt.xi_avg = xi_avg_.empty() ? 1.0 : xi_avg_.back();
        pt.xi_cg = xi_cg_.empty() ? 0.0 : xi_cg_.back();
        points_.push_back(pt);
    }
}

bool ConvergenceMonitor::stable(double threshold) const {
    if (xi_cg_.size() < 2) return false;
    // stable after window a if xi_cg stays below threshold for every a' > a
    for (size_t a = 0; a + 1 < xi_cg_.size(); ++a) {
        bool ok = true;
        for (size_t b = a + 1; b < xi_cg_.size(); ++b)
            if (xi_cg_[b] >= threshold) { ok = false; break; }
        if (ok) return true;
    }
    return false;
}

CnnModel train(const TrainConfig& cfg, std::ostream* loss_csv,
               ConvergenceMonitor* monitor_out) {
    cfg.validate();

    // Gate: the gradient check must pass before any long run.
    double gc = gradient_check(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    if (gc > 1e-3)
        throw std::runtime_error("train: gradient check failed, worst relative error " +
                                 std::to_string(gc));

    PulseSpec pulse;
    pulse.tau = cfg.tau;
    pulse.rolloff = cfg.alpha;
    pulse.tap_span = cfg.span;
    IsiProfile profile = isi_taps(pulse);
    int n = cfg.block_length();
    GramMatrix gram = build_gram(profile, n);
    FtnChannel channel(gram);
    Interleaver pi(n, cfg.interleaver_seed);

    std::mt19937_64 rng(cfg.seed);
    CnnModel model = init_params(n, cfg.l_e, cfg.m_max, cfg.hyper, rng);
    model.meta.seed = cfg.seed;
    model.meta.snr_lo = cfg.snr_lo;
    model.meta.snr_hi = cfg.snr_hi;

    long p_count = model.parameter_count();
    std::vector<double> grad(static_cast<size_t>(p_count));
    std::vector<double> grad_acc(static_cast<size_t>(p_count));
    std::vector<double> rms(static_cast<size_t>(p_count), 0.0);
    const double decay = model.meta.rms_decay;
    const double eps = model.meta.rms_eps;

    ConvergenceMonitor local_monitor;
    ConvergenceMonitor& monitor = monitor_out ? *monitor_out : local_monitor;
    if (loss_csv) *loss_csv << "batch_index,avg_loss,xi_avg,xi_cg\n";
    size_t csv_rows = 0;

    long samples_seen = 0;
    long batches = 0;
    while (samples_seen < cfg.budget_samples) {
        TrainingBatch batch = build_batch(cfg, channel, pi, rng);
        std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
        double loss_sum = 0.0;
        for (const TrainingSample& s : batch.samples) {
            loss_sum += loss_and_gradients(model, s, gram, cfg.gamma, grad);
            for (size_t i = 0; i < grad_acc.size(); ++i) grad_acc[i] += grad[i];
        }
        double inv = 1.0 / static_cast<double>(batch.samples.size());
        double batch_loss = loss_sum * inv;
        if (!std::isfinite(batch_loss))
            throw std::runtime_error("train: loss diverged (NaN/inf) at batch " +
                                     std::to_string(batches));

        std::vector<double> flat = flatten_params(model);
        for (size_t i = 0; i < flat.size(); ++i) {
            double g = grad_acc[i] * inv;
            rms[i] = decay * rms[i] + (1.0 - decay) * g * g;
            flat[i] -= cfg.learning_rate * g / (std::sqrt(rms[i]) + eps);
        }
        unflatten_params(flat, model);

        monitor.record(batch_loss);
        samples_seen += static_cast<long>(batch.samples.size());
        ++batches;
        if (loss_csv) {
            for (; csv_rows < monitor.points().size(); ++csv_rows) {
                const ConvergencePoint& pt = monitor.points()[csv_rows];
                char buf[128];
                std::snprintf(buf, sizeof buf, "%ld,%.9g,%.9g,%.9g\n", pt.batch_index,
                              pt.avg_loss, pt.xi_avg, pt.xi_cg);
                *loss_csv << buf;
            }
        }
    }

    model.meta.batches_seen = batches;
    model.meta.samples_seen = samples_seen;
    return model;
}

double gradient_check(uint64_t seed, int k_info, int m_max, int n_params) {
    TrainConfig cfg;
    cfg.k_info = k_info;
    cfg.m_max = m_max;
    cfg.span = 5;
    cfg.l_e = 2;
    cfg.omega = {0.4};
    cfg.v_factor = 1;

    PulseSpec pulse;
    pulse.tau = cfg.tau;
    pulse.rolloff = cfg.alpha;
    pulse.tap_span = cfg.span;
    int n = cfg.block_length();
    GramMatrix gram = build_gram(isi_taps(pulse), n);
    FtnChannel channel(gram);
    Interleaver pi(n, cfg.interleaver_seed);

    std::mt19937_64 rng(seed);
    CnnModel model = init_params(n, cfg.l_e, cfg.m_max, cfg.hyper, rng);
    TrainingBatch batch = build_batch(cfg, channel, pi, rng);
    const TrainingSample& s = batch.samples.front();

    std::vector<double> grad;
    loss_and_gradients(model, s, gram, cfg.gamma, grad);

    std::vector<double> flat = flatten_params(model);
    std::uniform_int_distribution<size_t> pick(0, flat.size() - 1);
    const double h = 1e-4;
    double worst = 0.0;
    int checked = 0, attempts = 0;
    while (checked < n_params && attempts < 20 * n_params) {
        ++attempts;
        size_t idx = pick(rng);
        double keep = flat[idx];
        auto eval = [&](double v) {
            flat[idx] = v;
            CnnModel tmp = model;
            unflatten_params(flat, tmp);
            static thread_local Tape tape;
            std::vector<double> theta(static_cast<size_t>(tmp.l_e) + 1, 0.0);
            for (int d = 1; d <= tmp.l_e; ++d) theta[static_cast<size_t>(d)] = gram.g(d) / s.sigma2;
            return tape.val(tape_forward_loss(tape, tmp, s, theta, cfg.gamma));
        };
        double fd = (eval(keep + h) - eval(keep - h)) / (2.0 * h);
        double fd_half = (eval(keep + h / 2.0) - eval(keep - h / 2.0)) / h;
        flat[idx] = keep;
        // a clip or ReLU kink inside the stencil makes the difference quotient
        // step-size dependent; such parameters are not differentiable there
        // and get resampled
        if (std::abs(fd - fd_half) > 1e-5 * std::max({std::abs(fd), std::abs(fd_half), 1e-6}))
            continue;
        ++checked;
        double ad = grad[idx];
        double denom = std::max({std::abs(fd), std::abs(ad), 1e-6});
        worst = std::max(worst, std::abs(fd - ad) / denom);
    }
    if (checked < n_params)
        throw std::runtime_error("gradient_check: too few smooth parameters in this instance");
    return worst;
}

}  // namespace ftn
