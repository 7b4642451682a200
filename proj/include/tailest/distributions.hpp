#pragma once

#include <cstdint>
#include <string>

#include "tailest/sample.hpp"

namespace tailest {

enum class Family { StrictPareto, BurrXII, Frechet };

// A Pareto-type distribution: 1 - F(x) = x^{-1/gamma} * ell(x) with ell slowly
// varying.  The three families below cover the simulation study:
//
//   StrictPareto(gamma):   1 - F(x) = x^{-1/gamma},            x >= 1
//   BurrXII(xi, tau):      1 - F(x) = (1 + x^tau)^{-xi},       x >= 0
//   Frechet(alpha):        F(x) = exp(-x^{-alpha}),            x > 0
//
// true_gamma is 1/ (tau*xi) for Burr and 1/alpha for Frechet.  true_rho is the
// second-order parameter of the tail quantile function: -1/xi for Burr, -1 for
// Frechet, and -infinity for the strict Pareto (no second-order term at all).
class ParetoTypeDist {
public:
    static ParetoTypeDist strict_pareto(double gamma);
    static ParetoTypeDist burr_xii(double xi, double tau);
    static ParetoTypeDist frechet(double alpha);

    Family family() const noexcept { return family_; }

    // Inverse CDF.  p must lie in the open interval (0,1).
    double quantile(double p) const;

    // CDF, used by the inverse-transform round-trip checks.
    double cdf(double x) const;

    double true_gamma() const noexcept;

    // -infinity for StrictPareto.
    double true_rho() const noexcept;

    // n i.i.d. draws by inverse transform on a counter-based stream, returned
    // sorted.  Identical seed => identical sample, on any machine.
    SortedSample sample(std::size_t n, std::uint64_t seed) const;

    // e.g. "burr(xi=1.41,tau=1.41)"; used as a default report label.
    std::string label() const;

private:
    ParetoTypeDist(Family f, double a, double b) : family_(f), a_(a), b_(b) {}

    Family family_;
    double a_; // gamma | xi | alpha
    double b_; // unused | tau | unused
};

} // namespace tailest
