#include "ftn/gram.hpp"

#include <algorithm>

namespace ftn {

std::vector<double> GramMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(x.size(), 0.0);
    int len = static_cast<int>(x.size());
    for (int i = 0; i < len; ++i) {
        double acc = 0.0;
        int lo = std::max(0, i - band);
        int hi = std::min(len - 1, i + band);
        for (int j = lo; j <= hi; ++j) acc += g(i - j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = acc;
    }
    return y;
}

double GramMatrix::quadratic_form(const std::vector<double>& e) const {
    double acc = 0.0;
    int len = static_cast<int>(e.size());
    for (int i = 0; i < len; ++i) {
        double ei = e[static_cast<size_t>(i)];
        if (ei == 0.0) continue;
        int lo = std::max(0, i - band);
        int hi = std::min(len - 1, i + band);
        for (int j = lo; j <= hi; ++j) acc += ei * g(i - j) * e[static_cast<size_t>(j)];
    }
    return acc;
}

GramMatrix build_gram(const IsiProfile& profile, int n) {
    if (n < 1) throw std::invalid_argument("build_gram: n must be >= 1");
    GramMatrix g;
    g.n = n;
    g.band = profile.span;
    g.taps = profile.taps;
    return g;
}

TruncatedGram truncate_gram(const GramMatrix& g, int l_e) {
    if (l_e < 0 || l_e > g.band) throw std::invalid_argument("truncate_gram: invalid L_E");
    TruncatedGram f;
    f.n = g.n;
    f.band = l_e;
    f.taps.assign(g.taps.begin(), g.taps.begin() + l_e + 1);
    return f;
}

}  // namespace ftn
