#include "tailest/estimators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <thread>

#include "tailest/error.hpp"
#include "tailest/numeric.hpp"

namespace tailest {

const char* tag_name(EstimatorTag tag) {
    switch (tag) {
    case EstimatorTag::HILL: return "HILL";
    case EstimatorTag::BCHILL: return "BCHILL";
    case EstimatorTag::LS: return "LS";
    case EstimatorTag::RR: return "RR";
    case EstimatorTag::WLS: return "WLS";
    case EstimatorTag::RWLS: return "RWLS";
    }
    return "?";
}

std::optional<EstimatorTag> tag_from_name(std::string name) {
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (name == "hill") return EstimatorTag::HILL;
    if (name == "bchill") return EstimatorTag::BCHILL;
    if (name == "ls") return EstimatorTag::LS;
    if (name == "rr") return EstimatorTag::RR;
    if (name == "wls") return EstimatorTag::WLS;
    if (name == "rwls") return EstimatorTag::RWLS;
    return std::nullopt;
}

EstimatorKind EstimatorKind::hill() {
    EstimatorKind k;
    k.tag = EstimatorTag::HILL;
    return k;
}

EstimatorKind EstimatorKind::bchill() {
    EstimatorKind k;
    k.tag = EstimatorTag::BCHILL;
    return k;
}

EstimatorKind EstimatorKind::ls() {
    EstimatorKind k;
    k.tag = EstimatorTag::LS;
    k.weights.kind = WeightMode::Kind::Uniform;
    k.penalty.kind = PenaltyMode::Kind::None;
    return k;
}

EstimatorKind EstimatorKind::rr() {
    EstimatorKind k = ls();
    k.tag = EstimatorTag::RR;
    k.penalty.kind = PenaltyMode::Kind::DataDriven;
    return k;
}

EstimatorKind EstimatorKind::wls() {
    EstimatorKind k;
    k.tag = EstimatorTag::WLS;
    k.weights.kind = WeightMode::Kind::Tapered;
    k.penalty.kind = PenaltyMode::Kind::None;
    return k;
}

EstimatorKind EstimatorKind::rwls() {
    EstimatorKind k = wls();
    k.tag = EstimatorTag::RWLS;
    k.penalty.kind = PenaltyMode::Kind::DataDriven;
    return k;
}

EstimatorKind EstimatorKind::from_tag(EstimatorTag tag) {
    switch (tag) {
    case EstimatorTag::HILL: return hill();
    case EstimatorTag::BCHILL: return bchill();
    case EstimatorTag::LS: return ls();
    case EstimatorTag::RR: return rr();
    case EstimatorTag::WLS: return wls();
    case EstimatorTag::RWLS: return rwls();
    }
    return hill(); // unreachable
}

EstimatorKind EstimatorKind::with_fixed_lambda(double lambda) const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw DomainError("fixed lambda must be finite and >= 0");
    }
    EstimatorKind k = *this;
    k.penalty.kind = PenaltyMode::Kind::Fixed;
    k.penalty.fixed_lambda = lambda;
    return k;
}

SStats s_stats(std::span<const double> w_tilde, std::span<const double> c) {
    const std::size_t k = w_tilde.size();
    if (k < 1 || c.size() != k) {
        throw DomainError("s_stats require equal-length weight and covariate vectors");
    }
    const double total = pairwise_sum(w_tilde);
    if (std::fabs(total - 1.0) > 1e-6) {
        throw DomainError("s_stats require normalised weights (sum within 1e-6 of 1)");
    }
    std::vector<double> tmp(k);
    for (std::size_t j = 0; j < k; ++j) tmp[j] = w_tilde[j] * c[j];
    SStats s;
    s.s1 = pairwise_sum(tmp);
    for (std::size_t j = 0; j < k; ++j) {
        const double dev = c[j] - s.s1;
        tmp[j] = w_tilde[j] * dev * dev; // centred form keeps S2 >= 0 exactly
    }
    s.s2 = pairwise_sum(tmp);
    for (std::size_t j = 0; j < k; ++j) {
        tmp[j] = w_tilde[j] * w_tilde[j] * (s.s1 - c[j]);
    }
    s.s_dot = pairwise_sum(tmp);
    for (std::size_t j = 0; j < k; ++j) {
        const double dev = s.s1 - c[j];
        tmp[j] = w_tilde[j] * w_tilde[j] * dev * dev;
    }
    s.s_ddot = pairwise_sum(tmp);
    return s;
}

FitResult fit_penalized_wls(std::span<const double> t, std::span<const double> c,
                            std::span<const double> w_tilde, double lambda_eff) {
    const std::size_t k = t.size();
    if (k < 2 || c.size() != k || w_tilde.size() != k) {
        throw DomainError("slope fit requires k >= 2 and equal-length inputs");
    }
    if (!(lambda_eff >= 0.0) || !std::isfinite(lambda_eff)) {
        throw DomainError("lambda_eff must be finite and >= 0");
    }
    for (double v : t) {
        if (!std::isfinite(v)) {
            throw DomainError("non-finite spacing passed to the fit");
        }
    }
    const SStats s = s_stats(w_tilde, c);
    const double denom = lambda_eff + s.s2;
    if (denom < 1e-12) {
        throw SingularError("fit denominator lambda_eff + S2 below 1e-12");
    }
    std::vector<double> tmp(k);
    for (std::size_t j = 0; j < k; ++j) {
        tmp[j] = w_tilde[j] * (c[j] - s.s1) * t[j];
    }
    FitResult fit;
    fit.b_hat = pairwise_sum(tmp) / denom;
    for (std::size_t j = 0; j < k; ++j) tmp[j] = w_tilde[j] * t[j];
    fit.gamma_hat = pairwise_sum(tmp) - fit.b_hat * s.s1;
    return fit;
}

double hill(const SortedSample& sample, std::size_t k) {
    const std::size_t n = sample.size();
    if (n < 2 || k < 1 || k > n - 1) {
        throw DomainError("hill requires 1 <= k <= n-1");
    }
    const double pivot = sample.order_stat(n - k);
    std::vector<double> excess(k);
    for (std::size_t j = 1; j <= k; ++j) {
        excess[j - 1] = std::log(sample.order_stat(n - j + 1) / pivot);
    }
    const double direct = pairwise_mean(excess);
    const std::vector<double> t = log_spacings(sample, k);
    const double via_spacings = pairwise_mean(t);
    // Abel summation makes the two forms equal; a gap means corrupted input
    // or a broken build, not a statistical condition.
    if (std::fabs(direct - via_spacings) > 1e-12 * std::max(1.0, std::fabs(direct))) {
        throw Error("hill consistency check failed: spacing mean diverged from log-excess mean");
    }
    return direct;
}

LambdaTheta lambda_hat_theta(const SStats& s, double beta_hat, double rho_hat,
                             std::size_t n, std::size_t k, double alpha_k) {
    if (k < 1 || n <= k) {
        throw DomainError("lambda_hat_theta requires 1 <= k < n");
    }
    if (!(rho_hat < 0.0) || !std::isfinite(rho_hat) || !std::isfinite(beta_hat)) {
        throw DomainError("lambda_hat_theta requires finite beta_hat and rho_hat < 0");
    }
    const double kap = kappa(alpha_k);
    const double ratio_pow = std::pow(static_cast<double>(n) / static_cast<double>(k),
                                      2.0 * rho_hat);
    const double num = s.s1 * s.s_ddot + s.s_dot * s.s2;
    const double den = 2.0 * kap * (s.s1 * s.s2 * beta_hat * beta_hat * ratio_pow - s.s_dot);
    LambdaTheta out;
    out.included = s.s1 * s.s2 * beta_hat * ratio_pow > s.s_dot;
    if (std::fabs(den) < 1e-12) {
        out.singular = true;
        out.included = false;
        return out;
    }
    out.lambda = std::max(num / den, 0.0);
    return out;
}

LambdaHat lambda_hat(std::span<const double> c, std::size_t n, std::size_t k,
                     double alpha_k, double beta_hat, double rho_hat,
                     int n_draws, CounterRng rng) {
    if (n_draws < 1) {
        throw DomainError("lambda_hat requires at least one theta draw");
    }
    LambdaHat out;
    out.total_draws = n_draws;
    std::vector<double> contributions(static_cast<std::size_t>(n_draws), 0.0);
    std::vector<double> theta(k);
    for (int d = 0; d < n_draws; ++d) {
        CounterRng sub = rng.substream(static_cast<std::uint64_t>(d));
        for (std::size_t j = 0; j < k; ++j) theta[j] = sub.next_u01();
        const auto w = weights(k, alpha_k, theta, WeightForm::Normalised);
        const SStats s = s_stats(w, c);
        const LambdaTheta lt = lambda_hat_theta(s, beta_hat, rho_hat, n, k, alpha_k);
        if (lt.included && !lt.singular) {
            contributions[static_cast<std::size_t>(d)] = lt.lambda;
            ++out.included_draws;
        }
    }
    out.all_excluded = out.included_draws == 0;
    // Expectation over ALL draws: excluded draws stand in the average as 0.
    out.lambda = pairwise_sum(contributions) / static_cast<double>(n_draws);
    return out;
}

namespace {

void validate_second_order(const std::optional<SecondOrderParams>& so) {
    if (!so) {
        throw DomainError("this estimator requires second-order parameters (rho, beta)");
    }
    if (!(so->rho_hat < 0.0) || !std::isfinite(so->rho_hat) || !std::isfinite(so->beta_hat)) {
        throw DomainError("second-order parameters require finite beta and rho < 0");
    }
}

// Shared by estimate() and tail_path(); t_full holds at least the first k
// scaled log-spacings of the sample.
EstimateResult estimate_core(const SortedSample& sample, std::span<const double> t_full,
                             std::size_t k, const EstimatorKind& kind,
                             const std::optional<SecondOrderParams>& so,
                             std::uint64_t seed) {
    const std::size_t n = sample.size();
    EstimateResult res;
    res.tag = kind.tag;
    res.k = k;

    if (kind.tag == EstimatorTag::HILL) {
        res.gamma_hat = hill(sample, k);
        return res;
    }
    validate_second_order(so);
    const double rho = so->rho_hat;

    if (kind.tag == EstimatorTag::BCHILL) {
        const double h = hill(sample, k);
        const double correction =
            1.0 - so->beta_hat *
                      std::pow(static_cast<double>(n) / static_cast<double>(k), rho) /
                      (1.0 - rho);
        res.gamma_hat = h * correction;
        return res;
    }

    if (k < 2 || k > n - 1) {
        throw DomainError("regression estimators require 2 <= k <= n-1");
    }
    const auto t = t_full.first(k);
    const auto c = covariates(k, rho);

    double alpha_k = 0.0; // uniform weights behave like the alpha -> 0 limit
    std::vector<double> w;
    if (kind.weights.kind == WeightMode::Kind::Uniform) {
        w.assign(k, 1.0 / static_cast<double>(k));
    } else {
        alpha_k = kind.weights.alpha(k);
        const auto theta = constant_theta(k, kind.weights.theta);
        w = weights(k, alpha_k, theta, WeightForm::Normalised);
    }
    // The penalty enters the slope denominator as 2*kappa(alpha_k)*lambda for
    // the down-weighted kinds and as plain lambda for the uniform ridge.
    const double penalty_scale =
        kind.weights.kind == WeightMode::Kind::Uniform ? 1.0 : 2.0 * kappa(alpha_k);

    switch (kind.penalty.kind) {
    case PenaltyMode::Kind::None:
        break;
    case PenaltyMode::Kind::Fixed:
        res.lambda = kind.penalty.fixed_lambda;
        break;
    case PenaltyMode::Kind::DataDriven:
        if (kind.weights.kind == WeightMode::Kind::Uniform) {
            // No theta dependence: a single closed-form evaluation.
            const LambdaTheta lt = lambda_hat_theta(s_stats(w, c), so->beta_hat, rho,
                                                    n, k, alpha_k);
            res.lambda = (lt.included && !lt.singular) ? lt.lambda : 0.0;
            res.all_theta_excluded = !(lt.included && !lt.singular);
        } else {
            const LambdaHat lh = lambda_hat(c, n, k, alpha_k, so->beta_hat, rho,
                                            kind.n_theta_draws, CounterRng(seed));
            res.lambda = lh.lambda;
            res.all_theta_excluded = lh.all_excluded;
        }
        break;
    }
    res.lambda_eff = penalty_scale * res.lambda;

    const FitResult fit = fit_penalized_wls(t, c, w, res.lambda_eff);
    res.gamma_hat = fit.gamma_hat;
    res.b_hat = fit.b_hat;
    return res;
}

} // namespace

EstimateResult estimate(const SortedSample& sample, std::size_t k,
                        const EstimatorKind& kind,
                        const std::optional<SecondOrderParams>& so,
                        std::uint64_t seed) {
    const std::size_t n = sample.size();
    if (n < 2 || k < 1 || k > n - 1) {
        throw DomainError("estimate requires 1 <= k <= n-1");
    }
    std::vector<double> t;
    const bool needs_spacings =
        kind.tag != EstimatorTag::HILL && kind.tag != EstimatorTag::BCHILL;
    if (needs_spacings) {
        t = log_spacings(sample, k);
    }
    return estimate_core(sample, t, k, kind, so, seed);
}

std::vector<EstimateResult> tail_path(const SortedSample& sample,
                                      const EstimatorKind& kind,
                                      std::size_t k_lo, std::size_t k_hi,
                                      const std::optional<SecondOrderParams>& so,
                                      std::uint64_t seed, int threads) {
    const std::size_t n = sample.size();
    const bool regression = kind.tag != EstimatorTag::HILL && kind.tag != EstimatorTag::BCHILL;
    const std::size_t min_k = regression ? 2 : 1;
    if (n < 2 || k_lo < min_k || k_lo > k_hi || k_hi > n - 1) {
        throw DomainError("tail_path requires min_k <= k_lo <= k_hi <= n-1");
    }
    // The spacings do not depend on k: compute the longest prefix once and
    // hand each k its slice.
    const std::vector<double> t_full = log_spacings(sample, k_hi);
    std::vector<EstimateResult> out(k_hi - k_lo + 1);

    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = estimate_core(sample, t_full, k_lo + i, kind, so, seed);
        }
    };

    const std::size_t count = out.size();
    const int use_threads =
        std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (use_threads == 1) {
        work(0, count);
        return out;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(use_threads));
    const std::size_t chunk = (count + use_threads - 1) / use_threads;
    for (int w = 0; w < use_threads; ++w) {
        const std::size_t begin = std::min(count, static_cast<std::size_t>(w) * chunk);
        const std::size_t end = std::min(count, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

} // namespace tailest
