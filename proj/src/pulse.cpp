#include "ftn/pulse.hpp"

#include <cmath>

namespace ftn {

namespace {

constexpr double kPi = 3.14159265358979323846;

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

double raised_cosine(double t, double alpha, double symbol_period) {
    double u = t / symbol_period;
    if (alpha <= 0.0) return sinc(u);
    double denom = 1.0 - 4.0 * alpha * alpha * u * u;
    if (std::abs(denom) < 1e-8) {
        // |t| -> T/(2 alpha): limit of the 0/0 form
        return (kPi / 4.0) * sinc(1.0 / (2.0 * alpha));
    }
    return sinc(u) * std::cos(kPi * alpha * u) / denom;
}

double rrc_pulse(double t, double alpha, double symbol_period) {
    double T = symbol_period;
    double u = t / T;
    double scale = 1.0 / std::sqrt(T);
    if (std::abs(u) < 1e-10) {
        return scale * (1.0 - alpha + 4.0 * alpha / kPi);
    }
    if (alpha > 0.0 && std::abs(std::abs(u) - 1.0 / (4.0 * alpha)) < 1e-8) {
        double a = (1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * alpha));
        double b = (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * alpha));
        return scale * alpha / std::sqrt(2.0) * (a + b);
    }
    double num = std::sin(kPi * u * (1.0 - alpha)) +
                 4.0 * alpha * u * std::cos(kPi * u * (1.0 + alpha));
    double den = kPi * u * (1.0 - 16.0 * alpha * alpha * u * u);
    return scale * num / den;
}

IsiProfile isi_taps(const PulseSpec& pulse) {
    pulse.validate();
    IsiProfile profile;
    profile.span = pulse.tap_span;
    profile.taps.resize(static_cast<size_t>(pulse.tap_span) + 1);
    for (int i = 0; i <= pulse.tap_span; ++i) {
        double t = static_cast<double>(i) * pulse.tau * pulse.symbol_period;
        profile.taps[static_cast<size_t>(i)] =
            raised_cosine(t, pulse.rolloff, pulse.symbol_period);
    }
    profile.taps[0] = 1.0;  // unit-energy pulse
    return profile;
}

}  // namespace ftn
