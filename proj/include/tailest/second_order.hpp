#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tailest/sample.hpp"

namespace tailest {

// Plug-in second-order tail parameters shared by the bias-aware estimators.
struct SecondOrderParams {
    double rho_hat = -1.0;
    double beta_hat = 0.0;
    bool beta_fallback = false; // beta estimation was singular, 0 substituted
};

struct KRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
};

// Default scan range for the rho grid search: (ceil(sqrt(n)), floor(0.9 n)),
// clamped into [2, n-1].
KRange default_rho_k_range(std::size_t n);

// Default grid {-0.05, -0.10, ..., -4.00}.
std::vector<double> default_rho_grid();

// Default k at which beta is estimated: floor(0.9 n), clamped into [2, n-1].
std::size_t default_beta_k(std::size_t n);

// Grid search for rho: for each candidate the zero-penalty uniform-weight
// regression path {gamma_hat(k) : k in k_range} is computed and the candidate
// with the smallest path variance wins.  A correctly specified covariate
// exponent makes the fitted intercept stable across k, a misspecified one
// makes it drift.  Variances within (min + 1e-12 + 1e-9*min) are treated as
// tied and resolved towards the grid point closest to -1 (then the larger
// rho): on samples with no detectable second-order curvature every candidate
// fits equally well and the scan must still return a deterministic value.
// The result is always an element of the grid.
double estimate_rho(const SortedSample& sample, std::span<const double> grid,
                    KRange k_range);

// Scaled-spacings moment-ratio estimator of the bias scale beta:
//
//   beta_hat = (k/n)^{rho} * [d(rho) D(0) - D(rho)] / [d(rho) D(rho) - D(2rho)]
//
// with d(a) = mean_j (j/k)^{-a} and D(a) = mean_j (j/k)^{-a} T_j over the
// first k scaled log-spacings.  Throws SingularError when the denominator
// magnitude falls below 1e-12 (e.g. constant spacings); most callers then
// fall back to beta_hat = 0, which turns the bias corrections off.
double estimate_beta(const SortedSample& sample, std::size_t k, double rho_hat);

// estimate_beta with the documented fallback applied.
double estimate_beta_or_zero(const SortedSample& sample, std::size_t k, double rho_hat,
                             bool* fell_back = nullptr);

// Convenience used by the CLI and the simulation harness: rho from the
// default grid/range, beta at default_beta_k.
SecondOrderParams fit_second_order(const SortedSample& sample);

} // namespace tailest
