#include "tailest/second_order.hpp"

#include <cmath>
#include <limits>

#include "tailest/error.hpp"
#include "tailest/numeric.hpp"
#include "tailest/spacings.hpp"

namespace tailest {

KRange default_rho_k_range(std::size_t n) {
    if (n < 12) {
        throw DomainError("rho estimation needs n >= 12");
    }
    auto lo = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    auto hi = static_cast<std::size_t>(static_cast<double>(n) * 0.9);
    lo = std::max<std::size_t>(lo, 2);
    hi = std::min<std::size_t>(hi, n - 1);
    if (lo >= hi) {
        throw DomainError("degenerate default rho k-range");
    }
    return {lo, hi};
}

std::vector<double> default_rho_grid() {
    std::vector<double> grid;
    grid.reserve(80);
    for (int i = 1; i <= 80; ++i) {
        grid.push_back(-static_cast<double>(5 * i) / 100.0);
    }
    return grid;
}

std::size_t default_beta_k(std::size_t n) {
    auto k = static_cast<std::size_t>(static_cast<double>(n) * 0.9);
    k = std::max<std::size_t>(k, 2);
    return std::min<std::size_t>(k, n - 1);
}

double estimate_rho(const SortedSample& sample, std::span<const double> grid,
                    KRange k_range) {
    const std::size_t n = sample.size();
    if (grid.empty()) {
        throw DomainError("rho grid must be non-empty");
    }
    for (double r : grid) {
        if (!(r < 0.0) || !std::isfinite(r)) {
            throw DomainError("rho grid values must be finite and < 0");
        }
    }
    if (k_range.lo < 2 || k_range.hi > n - 1 || k_range.lo >= k_range.hi) {
        throw DomainError("rho k-range must satisfy 2 <= lo < hi <= n-1");
    }

    const std::size_t k_hi = k_range.hi;
    const std::vector<double> t = log_spacings(sample, k_hi);

    // Prefix sums let every path point cost O(1) per candidate: with uniform
    // weights and zero penalty the fit only needs running sums of T_j and of
    // j^{-rho} powers, since C_j(k) = j^{-rho} * (k+1)^{rho} separates.
    std::vector<double> log_j(k_hi + 2);
    for (std::size_t j = 1; j <= k_hi + 1; ++j) {
        log_j[j] = std::log(static_cast<double>(j));
    }
    std::vector<double> sum_t(k_hi + 1, 0.0);
    for (std::size_t j = 1; j <= k_hi; ++j) {
        sum_t[j] = sum_t[j - 1] + t[j - 1];
    }

    std::vector<double> p1(k_hi + 1), p2(k_hi + 1), pt(k_hi + 1);
    double best_var = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, double>> scan; // (variance, rho)
    scan.reserve(grid.size());
    std::vector<double> path;
    path.reserve(k_range.hi - k_range.lo + 1);

    for (double rho : grid) {
        p1[0] = p2[0] = pt[0] = 0.0;
        for (std::size_t j = 1; j <= k_hi; ++j) {
            const double pw = std::exp(-rho * log_j[j]); // j^{-rho}
            p1[j] = p1[j - 1] + pw;
            p2[j] = p2[j - 1] + pw * pw;
            pt[j] = pt[j - 1] + pw * t[j - 1];
        }
        path.clear();
        for (std::size_t k = k_range.lo; k <= k_range.hi; ++k) {
            const double kd = static_cast<double>(k);
            const double scale = std::exp(rho * log_j[k + 1]); // (k+1)^{rho}
            const double m1 = scale * p1[k] / kd;
            const double m2 = scale * scale * p2[k] / kd;
            const double mt = sum_t[k] / kd;
            const double mct = scale * pt[k] / kd;
            const double s2 = m2 - m1 * m1;
            if (s2 <= 1e-12) continue; // covariate spread too small at this k
            const double b = (mct - m1 * mt) / s2;
            path.push_back(mt - b * m1);
        }
        double var = std::numeric_limits<double>::infinity();
        if (path.size() >= 2) {
            const double mean = pairwise_mean(path);
            double acc = 0.0;
            for (double g : path) acc += (g - mean) * (g - mean);
            var = acc / static_cast<double>(path.size());
        }
        scan.emplace_back(var, rho);
        best_var = std::min(best_var, var);
    }

    if (!std::isfinite(best_var)) {
        throw SingularError("rho scan produced no valid path points");
    }

    // Tie band, then closest to -1, then the larger rho.
    const double band = best_var + 1e-12 + 1e-9 * best_var;
    double chosen = 0.0;
    double chosen_dist = std::numeric_limits<double>::infinity();
    bool have = false;
    for (const auto& [var, rho] : scan) {
        if (var > band) continue;
        const double dist = std::fabs(rho + 1.0);
        if (!have || dist < chosen_dist || (dist == chosen_dist && rho > chosen)) {
            chosen = rho;
            chosen_dist = dist;
            have = true;
        }
    }
    return chosen;
}

double estimate_beta(const SortedSample& sample, std::size_t k, double rho_hat) {
    const std::size_t n = sample.size();
    if (k < 2 || k > n - 1) {
        throw DomainError("beta estimation requires 2 <= k <= n-1");
    }
    if (!(rho_hat < 0.0) || !std::isfinite(rho_hat)) {
        throw DomainError("beta estimation requires finite rho_hat < 0");
    }
    const std::vector<double> t = log_spacings(sample, k);
    const double kd = static_cast<double>(k);

    // d(a) = mean (j/k)^{-a}, D(a) = mean (j/k)^{-a} T_j for a in {rho, 2rho}
    // plus D(0) = mean T_j.  One pass, pairwise-summed.
    std::vector<double> va(k), vb(k), vc(k), vd(k);
    for (std::size_t j = 1; j <= k; ++j) {
        const double u = static_cast<double>(j) / kd;
        const double pr = std::pow(u, -rho_hat);
        va[j - 1] = pr;                  // -> d(rho)
        vb[j - 1] = t[j - 1];            // -> D(0)
        vc[j - 1] = pr * t[j - 1];       // -> D(rho)
        vd[j - 1] = pr * pr * t[j - 1];  // -> D(2rho)
    }
    const double d_rho = pairwise_mean(va);
    const double cap_d0 = pairwise_mean(vb);
    const double cap_drho = pairwise_mean(vc);
    const double cap_d2rho = pairwise_mean(vd);

    const double num = d_rho * cap_d0 - cap_drho;
    const double den = d_rho * cap_drho - cap_d2rho;
    if (std::fabs(den) < 1e-12) {
        throw SingularError("beta estimate denominator below 1e-12");
    }
    return std::pow(kd / static_cast<double>(n), rho_hat) * num / den;
}

double estimate_beta_or_zero(const SortedSample& sample, std::size_t k, double rho_hat,
                             bool* fell_back) {
    if (fell_back) *fell_back = false;
    try {
        return estimate_beta(sample, k, rho_hat);
    } catch (const SingularError&) {
        if (fell_back) *fell_back = true;
        return 0.0;
    }
}

SecondOrderParams fit_second_order(const SortedSample& sample) {
    const auto grid = default_rho_grid();
    SecondOrderParams so;
    so.rho_hat = estimate_rho(sample, grid, default_rho_k_range(sample.size()));
    so.beta_hat = estimate_beta_or_zero(sample, default_beta_k(sample.size()),
                                        so.rho_hat, &so.beta_fallback);
    return so;
}

} // namespace tailest
