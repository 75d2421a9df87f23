#pragma once

#include <cmath>
#include <vector>

#include "ftn/llr.hpp"

namespace ftn {

// Scalar reverse-mode tape. Local partials are evaluated during the forward
// recording, so the backward sweep is a single generic adjoint accumulation.
class Tape {
public:
    struct Node {
        double val;
        double pd[3];
        int parent[3];
        int np;
    };

    void clear() { nodes_.clear(); }
    size_t size() const { return nodes_.size(); }
    double val(int id) const { return nodes_[static_cast<size_t>(id)].val; }

    int leaf(double v) {
        Node n;
        n.val = v;
        n.np = 0;
        nodes_.push_back(n);
        return last();
    }

    int add(int a, int b) { return binary(val(a) + val(b), a, 1.0, b, 1.0); }
    int sub(int a, int b) { return binary(val(a) - val(b), a, 1.0, b, -1.0); }
    int mul(int a, int b) { return binary(val(a) * val(b), a, val(b), b, val(a)); }
    int add_const(int a, double c) { return unary(val(a) + c, a, 1.0); }
    int scale(int a, double k) { return unary(val(a) * k, a, k); }

    // a*b + c
    int fma(int a, int b, int c) {
        Node n;
        n.val = val(a) * val(b) + val(c);
        n.np = 3;
        n.parent[0] = a;
        n.pd[0] = val(b);
        n.parent[1] = b;
        n.pd[1] = val(a);
        n.parent[2] = c;
        n.pd[2] = 1.0;
        nodes_.push_back(n);
        return last();
    }

    // Saturating clip; gradient is 1 inside the range, 0 once saturated.
    int clip(int a) {
        double v = val(a);
        return unary(clip_llr(v), a, std::abs(v) <= kLlrClip ? 1.0 : 0.0);
    }

    // LLR-domain edge message with t = theta * scale:
    //   q = logaddexp(p - t, t) - logaddexp(p + t, -t)
    // parents: (p node, scale node); theta enters the scale partial.
    int edge_message(int p, int s, double theta) {
        double t = theta * val(s);
        double pv = val(p);
        double sa = sigmoid(pv - 2.0 * t);   // d logaddexp(p-t, t)/dp
        double sb = sigmoid(pv + 2.0 * t);   // d logaddexp(p+t, -t)/dp
        double q = log_add_exp(pv - t, t) - log_add_exp(pv + t, -t);
        double dq_dp = sa - sb;
        double dq_dt = (1.0 - 2.0 * sa) - (2.0 * sb - 1.0);
        double pass = std::abs(q) <= kLlrClip ? 1.0 : 0.0;  // saturation kills the gradient
        return binary(clip_llr(q), p, pass * dq_dp, s, pass * dq_dt * theta);
    }

    // -max(0, z)
    int neg_relu(int a) {
        double z = val(a);
        return unary(-std::max(0.0, z), a, z > 0.0 ? -1.0 : 0.0);
    }

    // Per-bit sigmoid cross entropy against the transmitted symbol s in {+1,-1}:
    //   l = softplus(-s * llr); 0 when the LLR confidently matches the symbol.
    int sigmoid_ce(int llr, double symbol) {
        double z = -symbol * val(llr);
        return unary(softplus(z), llr, -symbol * sigmoid(z));
    }

    // Adjoints of every node with respect to the root.
    std::vector<double> backward(int root) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        adj[static_cast<size_t>(root)] = 1.0;
        for (int id = root; id >= 0; --id) {
            const Node& n = nodes_[static_cast<size_t>(id)];
            double a = adj[static_cast<size_t>(id)];
            if (a == 0.0) continue;
            for (int k = 0; k < n.np; ++k)
                adj[static_cast<size_t>(n.parent[k])] += n.pd[k] * a;
        }
        return adj;
    }

private:
    int last() const { return static_cast<int>(nodes_.size()) - 1; }

    int unary(double v, int a, double da) {
        Node n;
        n.val = v;
        n.np = 1;
        n.parent[0] = a;
        n.pd[0] = da;
        nodes_.push_back(n);
        return last();
    }

    int binary(double v, int a, double da, int b, double db) {
        Node n;
        n.val = v;
        n.np = 2;
        n.parent[0] = a;
        n.pd[0] = da;
        n.parent[1] = b;
        n.pd[1] = db;
        nodes_.push_back(n);
        return last();
    }

    std::vector<Node> nodes_;
};

}  // namespace ftn
