#include "ftn/channel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace ftn {

FtnChannel::FtnChannel(const GramMatrix& gram) : gram_(gram) {
    int n = gram.n;
    Eigen::MatrixXd dense(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dense(i, j) = gram.at(i, j);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("FtnChannel: eigendecomposition failed");

    Eigen::VectorXd lambda = eig.eigenvalues();
    double most_negative = 0.0;
    for (int i = 0; i < n; ++i) {
        if (lambda(i) < most_negative) most_negative = lambda(i);
        if (lambda(i) < 0.0) lambda(i) = 0.0;
    }
    clamp_magnitude_ = -most_negative;

    Eigen::MatrixXd root =
        eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * eig.eigenvectors().transpose();
    sqrt_dense_.resize(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) sqrt_dense_[static_cast<size_t>(i) * n + j] = root(i, j);
}

std::vector<double> FtnChannel::sample_noise(double sigma2, std::mt19937_64& rng) const {
    if (sigma2 < 0.0) throw std::invalid_argument("transmit: sigma2 must be >= 0");
    int n = gram_.n;
    std::vector<double> eta(static_cast<size_t>(n), 0.0);
    if (sigma2 == 0.0) return eta;
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> z(static_cast<size_t>(n));
    for (auto& zi : z) zi = gauss(rng);
    double sigma = std::sqrt(sigma2);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = &sqrt_dense_[static_cast<size_t>(i) * n];
        for (int j = 0; j < n; ++j) acc += row[j] * z[static_cast<size_t>(j)];
        eta[static_cast<size_t>(i)] = sigma * acc;
    }
    return eta;
}

std::vector<double> FtnChannel::transmit(const std::vector<double>& x, double sigma2,
                                         std::mt19937_64& rng) const {
    if (static_cast<int>(x.size()) != gram_.n)
        throw std::invalid_argument("transmit: block length mismatch");
    std::vector<double> y = gram_.multiply(x);
    if (sigma2 > 0.0) {
        std::vector<double> eta = sample_noise(sigma2, rng);
        for (size_t i = 0; i < y.size(); ++i) y[i] += eta[i];
    } else if (sigma2 < 0.0) {
        throw std::invalid_argument("transmit: sigma2 must be >= 0");
    }
    return y;
}

std::vector<double> bpsk_modulate(const std::vector<uint8_t>& bits) {
    std::vector<double> x(bits.size());
    for (size_t i = 0; i < bits.size(); ++i) x[i] = bits[i] ? -1.0 : 1.0;
    return x;
}

}  // namespace ftn
