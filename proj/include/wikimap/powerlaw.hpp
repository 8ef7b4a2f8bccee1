#pragma once

// Discrete power-law exponent estimation for the edge-weight tail:
// p(x) = x^(-gamma) / zeta(gamma, xmin) for integer x >= xmin. The
// log-likelihood is concave in gamma, so a golden-section search over a
// fixed bracket suffices.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wikimap/histogram.hpp"

namespace wikimap {

struct InsufficientTail : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateSupport : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PowerLawFit {
    double gamma = 0.0;  // reported negative, as a decay exponent
    std::int64_t xmin = 0;
    std::uint64_t n_tail = 0;
    double stderr_est = 0.0;  // continuous-MLE approximation
    bool stderr_approximate = true;

    double magnitude() const { return -gamma; }
};

// Hurwitz zeta for s in (1, 8], a >= 1: a short direct sum plus an
// Euler-Maclaurin tail, accurate to ~1e-13 relative.
inline double hurwitz_zeta(double s, double a) {
    constexpr int kDirectTerms = 18;
    double sum = 0.0;
    for (int k = 0; k < kDirectTerms; ++k) sum += std::pow(a + k, -s);
    const double big_n = a + kDirectTerms;
    sum += std::pow(big_n, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(big_n, -s);
    const double t1 = s * std::pow(big_n, -s - 1.0);
    sum += t1 / 12.0;
    const double t2 = s * (s + 1.0) * (s + 2.0) * std::pow(big_n, -s - 3.0);
    sum -= t2 / 720.0;
    const double t3 =
        s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * std::pow(big_n, -s - 5.0);
    sum += t3 / 30240.0;
    return sum;
}

inline PowerLawFit fit_power_law(const Histogram& hist, std::int64_t xmin) {
    std::uint64_t n = 0;
    double sum_log = 0.0;
    std::int64_t first_value = -1;
    std::size_t distinct = 0;
    for (const Histogram::Bin& b : hist.bins) {
        if (b.value < xmin) continue;
        ++distinct;
        if (first_value < 0) first_value = b.value;
        n += b.count;
        sum_log += static_cast<double>(b.count) * std::log(static_cast<double>(b.value));
    }
    if (n < 50)
        throw InsufficientTail("need at least 50 samples >= xmin, have " + std::to_string(n));
    if (distinct < 2)
        throw DegenerateSupport("all tail values equal " + std::to_string(first_value));

    const double a = static_cast<double>(xmin);
    auto neg_log_likelihood = [&](double gamma) {
        return static_cast<double>(n) * std::log(hurwitz_zeta(gamma, a)) + gamma * sum_log;
    };

    double lo = 1.05, hi = 6.0;
    constexpr double kInvPhi = 0.6180339887498949;
    double x1 = hi - kInvPhi * (hi - lo);
    double x2 = lo + kInvPhi * (hi - lo);
    double f1 = neg_log_likelihood(x1);
    double f2 = neg_log_likelihood(x2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kInvPhi * (hi - lo);
            f1 = neg_log_likelihood(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kInvPhi * (hi - lo);
            f2 = neg_log_likelihood(x2);
        }
    }
    const double gamma_hat = 0.5 * (lo + hi);

    PowerLawFit fit;
    fit.gamma = -gamma_hat;
    fit.xmin = xmin;
    fit.n_tail = n;
    fit.stderr_est = (gamma_hat - 1.0) / std::sqrt(static_cast<double>(n));
    fit.stderr_approximate = true;
    return fit;
}

}  // namespace wikimap
