#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tailest/rng.hpp"
#include "tailest/sample.hpp"
#include "tailest/second_order.hpp"
#include "tailest/spacings.hpp"

namespace tailest {

// The six tail-index estimators.  HILL is the plain average of scaled
// log-spacings; BCHILL multiplies it by an analytic bias-correction factor;
// the remaining four are intercepts of the weighted regression
// T_j = gamma + b*C_j + noise, differing in their weights and penalty:
//
//   LS    uniform weights, no penalty
//   RR    uniform weights, data-driven ridge penalty
//   WLS   down-weighted spacings (theta = 1/2), no penalty
//   RWLS  down-weighted spacings, data-driven penalty averaged over theta
enum class EstimatorTag { HILL, BCHILL, LS, RR, WLS, RWLS };

const char* tag_name(EstimatorTag tag);                  // "HILL", ...
std::optional<EstimatorTag> tag_from_name(std::string name); // case-insensitive

struct PenaltyMode {
    enum class Kind { None, Fixed, DataDriven };
    Kind kind = Kind::None;
    double fixed_lambda = 0.0;
};

struct WeightMode {
    enum class Kind { Uniform, Tapered };
    Kind kind = Kind::Uniform;
    AlphaSchedule alpha = AlphaSchedule::log_schedule();
    double theta = 0.5; // point estimate used for the fit weights
};

struct EstimatorKind {
    EstimatorTag tag = EstimatorTag::HILL;
    PenaltyMode penalty;
    WeightMode weights;
    int n_theta_draws = 100; // theta draws in the penalty expectation (RWLS)

    static EstimatorKind hill();
    static EstimatorKind bchill();
    static EstimatorKind ls();
    static EstimatorKind rr();
    static EstimatorKind wls();
    static EstimatorKind rwls();
    static EstimatorKind from_tag(EstimatorTag tag);

    // Same estimator with the penalty pinned to a constant (0 recovers the
    // unpenalised sibling bit-for-bit); for identity tests and diagnostics.
    EstimatorKind with_fixed_lambda(double lambda) const;
};

// The four weighted sums of the closed-form fit:
//   S1 = sum w~_j C_j
//   S2 = sum w~_j (C_j - S1)^2
//   S. = sum w~_j^2 (S1 - C_j)
//   S: = sum w~_j^2 (S1 - C_j)^2
struct SStats {
    double s1 = 0.0;
    double s2 = 0.0;
    double s_dot = 0.0;
    double s_ddot = 0.0;
};

// Requires w_tilde normalised (sum within 1e-6 of 1) and |w| == |c| >= 1.
SStats s_stats(std::span<const double> w_tilde, std::span<const double> c);

struct FitResult {
    double gamma_hat = 0.0;
    double b_hat = 0.0;
};

// Closed-form penalised weighted least squares for T_j = gamma + b C_j:
//
//   b_hat     = sum w~_j (C_j - S1) T_j / (lambda_eff + S2)
//   gamma_hat = sum w~_j T_j - b_hat * S1
//
// lambda_eff is the full additive term in the slope denominator; callers
// pre-multiply their convention (2*kappa(alpha_k)*lambda for the
// down-weighted kinds, plain lambda for the uniform ridge).  Throws
// SingularError when lambda_eff + S2 < 1e-12 and DomainError for k < 2,
// size mismatches, non-finite T, or negative lambda_eff.
FitResult fit_penalized_wls(std::span<const double> t, std::span<const double> c,
                            std::span<const double> w_tilde, double lambda_eff);

// Hill estimator: the average of log(X_{n-j+1,n} / X_{n-k,n}) over j = 1..k.
// Also computed as the average of the scaled log-spacings T_j (the two are
// equal by Abel summation) and cross-checked to 1e-12.
double hill(const SortedSample& sample, std::size_t k);

struct LambdaTheta {
    double lambda = 0.0;  // clamped at 0
    bool included = false; // passed the sign indicator
    bool singular = false; // denominator magnitude below 1e-12
};

// Plug-in MSE-minimising penalty for one weight draw:
//
//   lambda = [S1*S: + S.*S2] / (2 kappa [S1 S2 beta^2 (n/k)^{2 rho} - S.])
//
// clamped at 0.  The inclusion indicator is the sign condition
// S1 S2 beta (n/k)^{2 rho} > S. with beta UNSQUARED — kept exactly as the
// source formula prints it.  A singular denominator marks the draw excluded.
LambdaTheta lambda_hat_theta(const SStats& s, double beta_hat, double rho_hat,
                             std::size_t n, std::size_t k, double alpha_k);

struct LambdaHat {
    double lambda = 0.0;
    int included_draws = 0;
    int total_draws = 0;
    bool all_excluded = false;
};

// Expectation of the clamped penalty over random theta vectors: the sum of
// included draws' lambdas divided by the TOTAL draw count (the indicator is
// inside the expectation).  Returns 0 with all_excluded set when no draw
// passes.  Draws use independent substreams, and the mean is reduced
// pairwise, so the result is independent of evaluation order.
LambdaHat lambda_hat(std::span<const double> c, std::size_t n, std::size_t k,
                     double alpha_k, double beta_hat, double rho_hat,
                     int n_draws, CounterRng rng);

struct EstimateResult {
    EstimatorTag tag = EstimatorTag::HILL;
    std::size_t k = 0;
    double gamma_hat = 0.0;
    double b_hat = 0.0;      // regression kinds only, otherwise 0
    double lambda = 0.0;     // data-driven or fixed penalty before scaling
    double lambda_eff = 0.0; // additive term actually used in the fit
    bool all_theta_excluded = false;
};

// One estimate at one k.  Second-order parameters are required for every
// kind except HILL.  The seed drives the theta draws of the RWLS penalty
// (other kinds are deterministic given the inputs).
EstimateResult estimate(const SortedSample& sample, std::size_t k,
                        const EstimatorKind& kind,
                        const std::optional<SecondOrderParams>& so,
                        std::uint64_t seed);

// Estimates for every k in [k_lo, k_hi] with rho/beta held fixed across the
// path.  With threads > 1 the k's are processed in parallel chunks; results
// are written by index, so the output is identical for any thread count.
std::vector<EstimateResult> tail_path(const SortedSample& sample,
                                      const EstimatorKind& kind,
                                      std::size_t k_lo, std::size_t k_hi,
                                      const std::optional<SecondOrderParams>& so,
                                      std::uint64_t seed, int threads = 1);

} // namespace tailest
