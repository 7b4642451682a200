#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tailest/distributions.hpp"
#include "tailest/estimators.hpp"

namespace tailest {

// Monte Carlo study of estimator bias and MSE as functions of k.
//
// For every (distribution, sample size) pair the harness draws R independent
// samples, fits the second-order plug-ins once per sample, evaluates every
// requested estimator on a k-grid, and aggregates bias and MSE per
// (estimator, k) cell together with their standard errors.

struct StudyConfig {
    std::vector<ParetoTypeDist> distributions;
    std::vector<std::size_t> sample_sizes{50, 500, 2000};
    std::size_t replications = 1000;
    std::vector<EstimatorKind> kinds;
    // 0 = size-dependent default: every k for n = 50, every 5th for n = 500,
    // every 20th for n = 2000 (max(1, n/100) in general).  Grid points are
    // the multiples of the stride inside [2, n-1].
    std::size_t k_stride = 0;
    std::uint64_t master_seed = 971201;
    // Use the distribution's exact rho instead of the per-sample estimate
    // (beta is still estimated, and strict Pareto falls back to the fitted
    // rho since its second-order scale is degenerate).  Isolates estimator
    // error from plug-in error.
    bool oracle_second_order = false;
    unsigned threads = 1;
};

// The six-distribution benchmark grid used throughout the tests: Frechet
// with alpha in {10, 2, 1} and Burr XII with (xi, tau) in {(sqrt(10),
// sqrt(10)), (sqrt(2), sqrt(2)), (2, 1/2)}, i.e. gamma in {0.1, 0.5, 1.0}
// twice over, all six estimators, R = 1000.
StudyConfig standard_benchmark();

std::size_t default_k_stride(std::size_t n);
std::vector<std::size_t> k_grid(std::size_t n, std::size_t stride);

// One aggregated (estimator, k) cell.
struct CellStats {
    std::size_t k = 0;
    EstimatorTag tag = EstimatorTag::HILL;
    double bias = 0.0;    // mean(gamma_hat) - gamma
    double mse = 0.0;     // mean((gamma_hat - gamma)^2)
    double se_bias = 0.0; // sd(gamma_hat) / sqrt(reps_used), 0 when reps_used < 2
    double se_mse = 0.0;  // sd((gamma_hat - gamma)^2) / sqrt(reps_used)
    std::size_t reps_used = 0;  // replications entering the means
    std::size_t fail_count = 0; // replications that threw for this cell
    bool flagged = false;       // fail_count > 5% of R
};

// All cells for one (distribution, sample size) block, cells ordered by k
// and, within a k, by the configured estimator order.
struct StudyTable {
    std::string dist_label;
    double true_gamma = 0.0;
    std::size_t n = 0;
    std::size_t replications = 0;
    std::vector<CellStats> cells;
};

struct StudyReport {
    std::vector<StudyTable> tables;
};

// Runs the full grid.  Deterministic for a given master seed regardless of
// the thread count: replication r of block (distribution i, size j) always
// sees the same derived seeds, replication results are stored by index, and
// the final per-cell reduction is a fixed-order pairwise sum.  A replication
// whose fit throws is excluded from that cell's means and counted in
// fail_count; it never aborts the study.  Throws DomainError for an invalid
// config (no distributions, no kinds, R = 0, or a sample size < 3).
StudyReport run_study(const StudyConfig& config);

// Writes one CSV per table into `dir` (created if missing) with the fixed
// header  k,kind,bias,mse,se_bias,se_mse,fail_count  and shortest
// round-trip number formatting, and optionally one SVG per distribution
// with a bias row and an MSE row of per-size panels.  Returns the paths
// written.  Throws IoError with the offending path on any write failure.
std::vector<std::filesystem::path> export_report(const StudyReport& report,
                                                 const std::filesystem::path& dir,
                                                 bool with_svg = false);

// One parsed CSV data row.
struct ReportRow {
    std::size_t k = 0;
    std::string kind;
    double bias = 0.0;
    double mse = 0.0;
    double se_bias = 0.0;
    double se_mse = 0.0;
    std::size_t fail_count = 0;
};

// Parses a CSV written by export_report.  Throws IoError if the file cannot
// be read and DataError on a malformed header or row.
std::vector<ReportRow> parse_report_csv(const std::filesystem::path& path);

} // namespace tailest
