#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailest/sample.hpp"

namespace tailest {

// Scaled log-spacings of the top k+1 order statistics:
//
//   T_j = j * log(X_{n-j+1,n} / X_{n-j,n}),   j = 1..k.
//
// Computed as the log of the ratio (not a difference of logs) so that a
// constant rescaling of the sample cancels before the log is taken; for
// power-of-two scale factors the result is bit-identical.  Requires
// 1 <= k <= n-1.  T_1 refers to the two largest observations.
std::vector<double> log_spacings(const SortedSample& sample, std::size_t k);

// Regression covariates C_j = (j/(k+1))^{-rho}, j = 1..k, for a second-order
// parameter rho < 0.  C_k < 1 and C_j increases with j.
std::vector<double> covariates(std::size_t k, double rho);

// kappa(alpha) = (alpha+1)/(2 alpha+1): the weight-mass constant appearing in
// the normalisation approximation and in the penalty scaling.  alpha >= 0.
double kappa(double alpha);

// phi(alpha) = (alpha+1)(6 alpha^2 + 4 alpha + 1)/(2 alpha + 1)^2: the
// variance constant of the weighted estimator family.  alpha >= 0.
double phi(double alpha);

// Weight exponent schedules alpha(k).  The default grows like log(1+k) so the
// weights flatten slowly; a linear alpha = delta*k (delta in (0,1]) is the
// regime in which the asymptotic weight-mass approximations are sharpest and
// is kept available for limit checks and experimentation.
struct AlphaSchedule {
    enum class Kind { LogK, Linear };

    Kind kind = Kind::LogK;
    double delta = 0.5; // only used by Linear

    double operator()(std::size_t k) const;

    static AlphaSchedule log_schedule() { return {Kind::LogK, 0.0}; }
    static AlphaSchedule linear(double delta);
};

enum class WeightForm { Raw, Normalised };

// Down-weighting of the deep-tail spacings:
//
//   W_j = 1 - theta_j^{alpha_k} * j/(k+1),   theta_j in (0,1].
//
// Raw returns W; Normalised returns W / sum(W) (exact ratio, pairwise sum).
// Every theta_j outside (0,1] is a domain error.  All weights are strictly
// positive and, for constant theta, strictly decreasing in j.
std::vector<double> weights(std::size_t k, double alpha_k,
                            std::span<const double> theta, WeightForm form);

// Convenience: theta identically 1/2 (the point-estimate weighting).
std::vector<double> constant_theta(std::size_t k, double value = 0.5);

// Everything the regression estimators need for one (sample, k, rho) triple.
struct SpacingSet {
    std::size_t k = 0;
    double rho = 0.0;
    double alpha_k = 0.0;
    std::vector<double> t;       // scaled log-spacings, size k
    std::vector<double> c;       // covariates, size k
    std::vector<double> w_tilde; // normalised weights, size k
};

// Builds T, C and normalised weights with theta = 1/2 under the given
// schedule.  Uniform weights are obtained by the estimators directly.
SpacingSet make_spacing_set(const SortedSample& sample, std::size_t k, double rho,
                            const AlphaSchedule& schedule);

} // namespace tailest
