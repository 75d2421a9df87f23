#include "ftn/spda.hpp"

#include <cmath>

namespace ftn {

LlrBlock channel_llr(const std::vector<double>& y, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("channel_llr: sigma2 must be > 0");
    LlrBlock t(y.size());
    for (size_t i = 0; i < y.size(); ++i) t[i] = 2.0 * y[i] / sigma2;
    return t;
}

double edge_message(double p_llr, double t) {
    if (t == 0.0) return 0.0;
    double q = log_add_exp(p_llr - t, t) - log_add_exp(p_llr + t, -t);
    return clip_llr(q);
}

void MessageState::reset(int n_, int l_e_) {
    n = n_;
    l_e = l_e_;
    q.assign(static_cast<size_t>(n) * (2 * l_e), 0.0);
    p.assign(static_cast<size_t>(n) * (2 * l_e), 0.0);
    u.assign(static_cast<size_t>(n), 0.0);
    v.assign(static_cast<size_t>(n), 0.0);
    app.assign(static_cast<size_t>(n), 0.0);
}

int MessageState::edge_index(int i, int j) const {
    int d = j - i;
    if (d == 0 || d < -l_e || d > l_e) return -1;
    if (j < 0 || j >= n) return -1;
    return d < 0 ? d + l_e : d + l_e - 1;
}

LlrBlock spda_detect(const std::vector<double>& y, const LlrBlock& prior,
                     const GramMatrix& gram, const FgConfig& cfg,
                     const CnnModel* model, DetectTrace* trace) {
    cfg.validate();
    if (cfg.use_nn && model == nullptr)
        throw std::invalid_argument("spda_detect: use_nn requires a model");
    if (static_cast<int>(y.size()) != cfg.n || static_cast<int>(prior.size()) != cfg.n)
        throw std::invalid_argument("spda_detect: length mismatch");
    if (cfg.l_e > gram.band)
        throw std::invalid_argument("spda_detect: l_e exceeds gram bandwidth");

    int n = cfg.n;
    int l_e = cfg.l_e;
    int deg = 2 * l_e;

    // per-offset couplings theta_d = g_d / sigma^2, d = 1..l_e
    std::vector<double> theta(static_cast<size_t>(l_e) + 1, 0.0);
    for (int d = 1; d <= l_e; ++d) theta[static_cast<size_t>(d)] = gram.g(d) / cfg.sigma2;

    LlrBlock t = channel_llr(y, cfg.sigma2);
    LlrBlock base(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        base[static_cast<size_t>(i)] =
            prior[static_cast<size_t>(i)] + t[static_cast<size_t>(i)];

    MessageState st;
    st.reset(n, l_e);
    st.app = base;  // initial p, q, u, v are 0 so Q starts at O + T
    for (auto& a : st.app) a = clip_llr(a);

    std::vector<double> p_new(st.p.size(), 0.0);
    if (trace) trace->per_iter_app.clear();

    for (int m = 0; m < cfg.m_max; ++m) {
        // Step: p_{i,j} = Q_i - q_{i,j} (flooding; uses previous iteration's q)
        for (int i = 0; i < n; ++i) {
            for (int j = i - l_e; j <= i + l_e; ++j) {
                int e = st.edge_index(i, j);
                if (e < 0) continue;
                size_t idx = static_cast<size_t>(i) * deg + e;
                p_new[idx] = clip_llr(st.app[static_cast<size_t>(i)] - st.q[idx]);
            }
        }
        // Step: q_{i,j} = edge(p_{j,i}, theta * scale)
        for (int i = 0; i < n; ++i) {
            for (int j = i - l_e; j <= i + l_e; ++j) {
                int e = st.edge_index(i, j);
                if (e < 0) continue;
                int e_rev = st.edge_index(j, i);
                int d = std::abs(j - i);
                double scale = 1.0;
                if (cfg.use_nn)
                    scale = model->edge_scale[static_cast<size_t>(m)][static_cast<size_t>(d - 1)];
                double t_eff = theta[static_cast<size_t>(d)] * scale;
                st.q[static_cast<size_t>(i) * deg + e] =
                    edge_message(p_new[static_cast<size_t>(j) * deg + e_rev], t_eff);
            }
        }
        // Step: u_i = sum_j q_{i,j} (excludes O and T by construction)
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (int e = 0; e < deg; ++e) acc += st.q[static_cast<size_t>(i) * deg + e];
            st.u[static_cast<size_t>(i)] = clip_llr(acc);
        }
        // Step: v via the CNN function node
        if (cfg.use_nn) {
            st.v = cnn_forward(st.u, *model, m);
            for (auto& vi : st.v) vi = clip_llr(vi);
        }
        // Step: Q_i = O_i + T_i + v_i + sum_j q_{i,j}
        for (int i = 0; i < n; ++i) {
            double acc = base[static_cast<size_t>(i)] + st.v[static_cast<size_t>(i)];
            for (int e = 0; e < deg; ++e) acc += st.q[static_cast<size_t>(i) * deg + e];
            st.app[static_cast<size_t>(i)] = clip_llr(acc);
        }
        st.p.swap(p_new);
        if (trace) trace->per_iter_app.push_back(st.app);
    }

    LlrBlock extrinsic(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        extrinsic[static_cast<size_t>(i)] =
            st.app[static_cast<size_t>(i)] - prior[static_cast<size_t>(i)];
    return extrinsic;
}

}  // namespace ftn
