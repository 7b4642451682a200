#include "doctest.h"

#include <cmath>
#include <vector>

#include "tailest/distributions.hpp"
#include "tailest/error.hpp"
#include "tailest/estimators.hpp"
#include "tailest/numeric.hpp"

using namespace tailest;

TEST_CASE("quantile hand values") {
    CHECK(ParetoTypeDist::burr_xii(1.0, 1.0).quantile(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ParetoTypeDist::frechet(1.0).quantile(std::exp(-1.0)) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(ParetoTypeDist::strict_pareto(0.5).quantile(0.75) ==
          doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("quantile domain and parameter validation") {
    const auto d = ParetoTypeDist::strict_pareto(1.0);
    CHECK_THROWS_AS(d.quantile(0.0), DomainError);
    CHECK_THROWS_AS(d.quantile(1.0), DomainError);
    CHECK_THROWS_AS(d.quantile(-0.2), DomainError);
    CHECK_THROWS_AS(ParetoTypeDist::strict_pareto(0.0), DomainError);
    CHECK_THROWS_AS(ParetoTypeDist::burr_xii(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS(ParetoTypeDist::burr_xii(1.0, 0.0), DomainError);
    CHECK_THROWS_AS(ParetoTypeDist::frechet(-2.0), DomainError);
    CHECK_THROWS_AS(d.sample(0, 1), DomainError);
}

TEST_CASE("cdf inverts quantile across families") {
    const std::vector<ParetoTypeDist> dists = {
        ParetoTypeDist::strict_pareto(0.5),
        ParetoTypeDist::strict_pareto(2.0),
        ParetoTypeDist::burr_xii(1.0, 2.0),
        ParetoTypeDist::burr_xii(std::sqrt(10.0), std::sqrt(10.0)),
        ParetoTypeDist::frechet(2.0),
    };
    for (const auto& d : dists) {
        for (double p = 0.001; p < 0.9995; p += 0.0377) {
            CHECK(d.cdf(d.quantile(p)) == doctest::Approx(p).epsilon(1e-12));
        }
        CHECK(d.cdf(d.quantile(0.999)) == doctest::Approx(0.999).epsilon(1e-12));
        // strict monotonicity on a grid
        double prev = 0.0;
        for (double p = 0.01; p < 1.0; p += 0.01) {
            const double q = d.quantile(p);
            CHECK(q > prev);
            prev = q;
        }
    }
}

TEST_CASE("true parameter bookkeeping") {
    CHECK(ParetoTypeDist::burr_xii(1.0, 2.0).true_gamma() == doctest::Approx(0.5));
    CHECK(ParetoTypeDist::burr_xii(1.0, 2.0).true_rho() == doctest::Approx(-1.0));
    CHECK(ParetoTypeDist::burr_xii(2.0, 1.0).true_rho() == doctest::Approx(-0.5));
    CHECK(ParetoTypeDist::frechet(4.0).true_gamma() == doctest::Approx(0.25));
    CHECK(ParetoTypeDist::frechet(4.0).true_rho() == doctest::Approx(-1.0));
    CHECK(ParetoTypeDist::strict_pareto(0.7).true_gamma() == doctest::Approx(0.7));
    CHECK(std::isinf(ParetoTypeDist::strict_pareto(0.7).true_rho()));
    CHECK(ParetoTypeDist::strict_pareto(0.7).true_rho() < 0.0);
}

TEST_CASE("sampling is seed-deterministic") {
    const auto d = ParetoTypeDist::burr_xii(1.0, 2.0);
    const auto a = d.sample(200, 42);
    const auto b = d.sample(200, 42);
    const auto c = d.sample(200, 43);
    REQUIRE(a.size() == 200);
    CHECK(a.values() == b.values()); // bitwise
    CHECK(a.values() != c.values());
    const auto one = d.sample(1, 7);
    CHECK(one.size() == 1);
    CHECK(one.order_stat(1) > 0.0);
    CHECK(one.order_stat(1) == d.sample(1, 7).order_stat(1));
}

// The quantile function's slowly varying part ell_u(y) = U(y)/y^gamma should
// satisfy log(ell_u(yv)/ell_u(y)) ~ const * y^rho (1 - v^rho)/(-rho) for large
// y, so r(y,v) = g(y,v^2)/g(y,v) -> v^rho + 1.  This checks the reported rho
// against the family's actual quantile function, independently of any closed
// form for ell_u.
static double numeric_rho(const ParetoTypeDist& d, double y, double v) {
    const double gamma = d.true_gamma();
    auto log_ell = [&](double x) { return std::log(d.quantile(1.0 - 1.0 / x)) - gamma * std::log(x); };
    const double g1 = log_ell(y * v) - log_ell(y);
    const double g2 = log_ell(y * v * v) - log_ell(y);
    return std::log(g2 / g1 - 1.0) / std::log(v);
}

TEST_CASE("reported rho matches a numeric slowly-varying-function oracle") {
    // Probe points chosen so the O(y^rho) truncation error and the
    // O(eps * y^{1-rho}) cancellation error of 1 - 1/y are both << 2e-3.
    CHECK(numeric_rho(ParetoTypeDist::burr_xii(1.0, 2.0), 3e4, 8.0) ==
          doctest::Approx(-1.0).epsilon(2e-3));
    CHECK(numeric_rho(ParetoTypeDist::burr_xii(2.0, 1.0), 1e7, 8.0) ==
          doctest::Approx(-0.5).epsilon(2e-3));
    CHECK(numeric_rho(ParetoTypeDist::burr_xii(std::sqrt(2.0), std::sqrt(2.0)), 1e6, 8.0) ==
          doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(2e-3));
    CHECK(numeric_rho(ParetoTypeDist::frechet(2.0), 3e4, 8.0) ==
          doctest::Approx(-1.0).epsilon(2e-3));
}

TEST_CASE("Hill on strict Pareto samples is unbiased (Monte Carlo)") {
    const double gamma = 0.5;
    const auto d = ParetoTypeDist::strict_pareto(gamma);
    const std::size_t n = 500, k = 100;
    const int reps = 400;
    std::vector<double> estimates(reps);
    for (int r = 0; r < reps; ++r) {
        estimates[r] = hill(d.sample(n, 9000 + static_cast<std::uint64_t>(r)), k);
    }
    const double mean = pairwise_mean(estimates);
    // Var(hill) = gamma^2/k per replication.
    const double se = gamma / std::sqrt(static_cast<double>(k) * reps);
    CHECK(std::fabs(mean - gamma) <= 4.0 * se);
}

TEST_CASE("empirical quantiles match the quantile function (Monte Carlo)") {
    const auto d = ParetoTypeDist::burr_xii(std::sqrt(10.0), std::sqrt(10.0));
    const std::size_t n = 200000;
    const auto s = d.sample(n, 123);
    for (double p : {0.9, 0.99, 0.999}) {
        const double q = d.quantile(p);
        // empirical CDF at the true quantile
        std::size_t count = 0;
        for (double x : s.values()) {
            if (x <= q) ++count;
        }
        const double ecdf = static_cast<double>(count) / static_cast<double>(n);
        const double sd = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
        CHECK(std::fabs(ecdf - p) <= 4.0 * sd);
    }
    // the 0.999 quantile of the draws themselves, within 2% of the exact value
    const double emp = s.order_stat(static_cast<std::size_t>(0.999 * n));
    CHECK(emp == doctest::Approx(d.quantile(0.999)).epsilon(0.02));
}

TEST_CASE("labels are stable strings") {
    CHECK(ParetoTypeDist::strict_pareto(0.5).label() == "strict_pareto(gamma=0.5)");
    CHECK(ParetoTypeDist::burr_xii(1.0, 2.0).label() == "burr(xi=1,tau=2)");
    CHECK(ParetoTypeDist::frechet(2.0).label() == "frechet(alpha=2)");
}
