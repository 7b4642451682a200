#include "tailest/spacings.hpp"

#include <cmath>

#include "tailest/error.hpp"
#include "tailest/numeric.hpp"

namespace tailest {

std::vector<double> log_spacings(const SortedSample& sample, std::size_t k) {
    const std::size_t n = sample.size();
    if (k < 1 || k > n - 1 || n < 2) {
        throw DomainError("log_spacings requires 1 <= k <= n-1");
    }
    std::vector<double> t(k);
    for (std::size_t j = 1; j <= k; ++j) {
        const double upper = sample.order_stat(n - j + 1);
        const double lower = sample.order_stat(n - j);
        t[j - 1] = static_cast<double>(j) * std::log(upper / lower);
    }
    return t;
}

std::vector<double> covariates(std::size_t k, double rho) {
    if (k < 1) {
        throw DomainError("covariates require k >= 1");
    }
    if (!(rho < 0.0) || !std::isfinite(rho)) {
        throw DomainError("covariates require a finite rho < 0");
    }
    std::vector<double> c(k);
    const double denom = static_cast<double>(k + 1);
    for (std::size_t j = 1; j <= k; ++j) {
        c[j - 1] = std::pow(static_cast<double>(j) / denom, -rho);
    }
    return c;
}

double kappa(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError("kappa requires alpha >= 0");
    }
    return (alpha + 1.0) / (2.0 * alpha + 1.0);
}

double phi(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError("phi requires alpha >= 0");
    }
    const double two_a1 = 2.0 * alpha + 1.0;
    return (alpha + 1.0) * (6.0 * alpha * alpha + 4.0 * alpha + 1.0) / (two_a1 * two_a1);
}

double AlphaSchedule::operator()(std::size_t k) const {
    switch (kind) {
    case Kind::LogK: return std::log1p(static_cast<double>(k));
    case Kind::Linear: return delta * static_cast<double>(k);
    }
    return 0.0; // unreachable
}

AlphaSchedule AlphaSchedule::linear(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw DomainError("linear alpha schedule requires delta in (0,1]");
    }
    return {Kind::Linear, delta};
}

std::vector<double> weights(std::size_t k, double alpha_k,
                            std::span<const double> theta, WeightForm form) {
    if (k < 1 || theta.size() != k) {
        throw DomainError("weights require k >= 1 and theta of length k");
    }
    if (!(alpha_k >= 0.0) || !std::isfinite(alpha_k)) {
        throw DomainError("weights require alpha_k >= 0");
    }
    std::vector<double> w(k);
    const double denom = static_cast<double>(k + 1);
    for (std::size_t j = 1; j <= k; ++j) {
        const double th = theta[j - 1];
        if (!(th > 0.0 && th <= 1.0)) {
            throw DomainError("weights require every theta_j in (0,1]");
        }
        w[j - 1] = 1.0 - std::pow(th, alpha_k) * static_cast<double>(j) / denom;
    }
    if (form == WeightForm::Normalised) {
        const double total = pairwise_sum(w);
        for (double& wj : w) wj /= total;
    }
    return w;
}

std::vector<double> constant_theta(std::size_t k, double value) {
    return std::vector<double>(k, value);
}

SpacingSet make_spacing_set(const SortedSample& sample, std::size_t k, double rho,
                            const AlphaSchedule& schedule) {
    SpacingSet s;
    s.k = k;
    s.rho = rho;
    s.alpha_k = schedule(k);
    s.t = log_spacings(sample, k);
    s.c = covariates(k, rho);
    const auto theta = constant_theta(k);
    s.w_tilde = weights(k, s.alpha_k, theta, WeightForm::Normalised);
    return s;
}

} // namespace tailest
