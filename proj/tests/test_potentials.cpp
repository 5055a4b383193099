#include <cmath>
#include <vector>

#include "chblab/potentials.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace chb;
using namespace oracle;

namespace {

std::vector<double> rgrid(int n, double R) {
    std::vector<double> r(n);
    for (int k = 0; k < n; ++k) r[k] = -R + 2 * R * k / (n - 1);
    return r;
}

}  // namespace

TEST_CASE("obstacle examples") {
    const auto s01 = PotentialSpec::obstacle(0.1);
    CHECK(beta_hat(s01, 0.5) == 0.0);
    CHECK(beta_hat(s01, 1.05) == doctest::Approx(std::pow(0.05, 3) / (6 * 0.01)).epsilon(1e-13));
    CHECK(beta(PotentialSpec::obstacle(0.5), 2.0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(beta(PotentialSpec::obstacle(0.3), 0.9) == 0.0);
    CHECK(beta_prime(s01, 5.0) == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(beta_prime(s01, 0.0) == 0.0);
    CHECK(psi(s01, 0.0) == doctest::Approx(0.5));
    CHECK(psi(s01, 1.05) == doctest::Approx(std::pow(0.05, 3) / 0.06 + 0.5 * (1 - 1.05 * 1.05)).epsilon(1e-13));
    CHECK(psi(s01, 1.05) == doctest::Approx(-0.04916667).epsilon(1e-7));
}

TEST_CASE("logarithmic examples") {
    const auto s = PotentialSpec::logarithmic(1.0, 2.0, 0.25);
    CHECK(beta_hat(s, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    const auto s1 = PotentialSpec::logarithmic(1.0, 1.5, 0.1);
    CHECK(std::abs(beta(s1, std::tanh(1.0)) - 1.0) < 1e-12);
    CHECK(beta_prime(s1, 0.0) == doctest::Approx(1.0));
    // the hand value 1/2 (1.5 ln 1.5 + 0.5 ln 0.5) + 0.75
    const double hand = 0.5 * (1.5 * std::log(1.5) + 0.5 * std::log(0.5)) + 0.75;
    CHECK(psi(s, 0.5) == doctest::Approx(hand).epsilon(1e-13));
    CHECK(psi(s, 0.5) == doctest::Approx(0.8808120359).epsilon(1e-9));
    CHECK(psi_log_exact(1.0, 2.0, 0.5) == doctest::Approx(hand).epsilon(1e-13));
}

TEST_CASE("spec validation") {
    CHECK_THROWS(PotentialSpec::obstacle(0.0).validate());
    CHECK_THROWS(PotentialSpec::obstacle(1.0).validate());
    CHECK_THROWS(PotentialSpec::logarithmic(2.0, 1.0, 0.1).validate());
    CHECK(PotentialSpec::obstacle(0.1).theta_cap == 1.0);
    CHECK(PotentialSpec::logarithmic(1.0, 1.5, 0.1).theta_cap == 1.5);
    CHECK(PotentialSpec::logarithmic(1.0, 2.0, 0.1).log_delta_limit() == doctest::Approx(0.125));
}

TEST_CASE("obstacle matches branchwise reference") {
    for (double d : {0.2, 0.1, 0.01})
        for (double r : rgrid(2001, 3.0)) {
            const auto s = PotentialSpec::obstacle(d);
            CHECK(beta_hat(s, r) == doctest::Approx(obstacle_hat_ref(d, r)).epsilon(1e-12));
            CHECK(beta(s, r) == doctest::Approx(obstacle_beta_ref(d, r)).epsilon(1e-12));
            CHECK(psi(s, r) == doctest::Approx(obstacle_hat_ref(d, r) + 0.5 * (1 - r * r)).epsilon(1e-12));
        }
}

TEST_CASE("log matches Taylor-extension reference") {
    for (double d : {0.2, 0.05, 0.01})
        for (double r : rgrid(2001, 3.0)) {
            const auto s = PotentialSpec::logarithmic(1.0, 1.5, d);
            CHECK(psi(s, r) == doctest::Approx(psi_log_delta_ref(1.0, 1.5, d, r)).epsilon(1e-11));
            CHECK(beta_hat(s, r) == doctest::Approx(psi_log_delta_ref(1.0, 1.5, d, r) - 0.75 * (1 - r * r))
                                        .epsilon(1e-11)
                                        .scale(1.0));
        }
}

TEST_CASE("derivatives agree with finite differences") {
    const double h = 1e-6;
    for (const auto& s : {PotentialSpec::obstacle(0.1), PotentialSpec::logarithmic(1.0, 1.5, 0.1)}) {
        for (double r : rgrid(301, 2.5)) {
            const double fd_hat = (beta_hat(s, r + h) - beta_hat(s, r - h)) / (2 * h);
            CHECK(beta(s, r) == doctest::Approx(fd_hat).epsilon(1e-6).scale(1.0));
            const double fd_psi = (psi(s, r + h) - psi(s, r - h)) / (2 * h);
            CHECK(psi_prime(s, r) == doctest::Approx(fd_psi).epsilon(1e-6).scale(1.0));
            const double fd_b = (beta(s, r + h) - beta(s, r - h)) / (2 * h);
            CHECK(beta_prime(s, r) == doctest::Approx(fd_b).epsilon(1e-4).scale(1.0));
        }
    }
}

TEST_CASE("convexity, monotonicity and the subgradient bound") {
    for (const auto& s : {PotentialSpec::obstacle(0.05), PotentialSpec::logarithmic(1.0, 1.5, 0.05)}) {
        CHECK(beta_hat(s, 0.0) == doctest::Approx(0.0).scale(1.0));
        const auto r = rgrid(4001, 5.0);
        for (size_t k = 1; k + 1 < r.size(); ++k) {
            CHECK(beta(s, r[k]) >= beta(s, r[k - 1]));
            const double mid = beta_hat(s, 0.5 * (r[k - 1] + r[k + 1]));
            CHECK(mid <= 0.5 * (beta_hat(s, r[k - 1]) + beta_hat(s, r[k + 1])) + 1e-13);
            CHECK(beta_hat(s, r[k]) <= beta(s, r[k]) * r[k] + 1e-12);
            CHECK(beta_hat(s, r[k]) >= 0.0);
            CHECK(beta_prime(s, r[k]) >= 0.0);
        }
    }
    // continuity across every breakpoint
    const double d = 0.1;
    for (const auto& s : {PotentialSpec::obstacle(d), PotentialSpec::logarithmic(1.0, 1.5, d)})
        for (double b : {-1 - d, -1.0, -1 + d, 1 - d, 1.0, 1 + d})
            CHECK(beta(s, b + 1e-12) == doctest::Approx(beta(s, b - 1e-12)).epsilon(1e-8).scale(1.0));
}

TEST_CASE("obstacle inequalities on a dense grid") {
    for (double d : {0.2, 0.1, 0.05, 0.01, 0.001}) {
        const auto s = PotentialSpec::obstacle(d);
        int bad = 0;
        for (double r : rgrid(10000, 5.0)) {
            const double b = beta(s, r), bh = beta_hat(s, r), bp = beta_prime(s, r);
            const double tol = 1e-12 * (1 + bh);
            bad += d * b * b > 2 * bh + tol;
            bad += 2 * bh > d * b * b + 1 + tol;
            bad += d * bp * bp > bp + 1e-12 * (1 + bp);
            bad += bp > 1.0 / d + 1e-12 / d;
            bad += std::abs(b) > r * b + 1e-12 * (1 + std::abs(b));
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("log inequalities on a dense grid") {
    const double th = 1.0, thc = 1.5;
    for (double d : {0.2, 0.1, 0.05, 0.01, 0.001}) {
        if (d > std::min(1.0, th / (4 * thc))) continue;
        const auto s = PotentialSpec::logarithmic(th, thc, d);
        int bad = 0;
        for (double r : rgrid(10000, 5.0)) {
            const double bh = beta_hat(s, r), bp = beta_prime(s, r);
            const double e = std::max(0.0, std::abs(r) - 1);
            bad += 4 * d / th * bh < e * e - 1e-12 * (1 + bh / d);
            bad += d * bp * bp > th * bp + 1e-12 * (1 + bp);
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("log coercivity with brute-force c2") {
    const double th = 1.0, thc = 1.5;
    double c2 = 0.0;
    const auto r = rgrid(10000, 5.0);
    const std::vector<double> deltas{0.5, 0.2, 0.1, 0.05, 0.01, 0.001};
    for (double d : deltas) {
        const auto s = PotentialSpec::logarithmic(th, thc, d);
        for (double x : r) c2 = std::max(c2, std::abs(beta(s, x)) - th * std::abs(x) - x * beta(s, x));
    }
    CHECK(std::isfinite(c2));
    for (double d : deltas) {
        const auto s = PotentialSpec::logarithmic(th, thc, d);
        for (double x : r) CHECK(x * beta(s, x) >= std::abs(beta(s, x)) - th * std::abs(x) - c2 - 1e-12);
    }
}

TEST_CASE("cutoff") {
    CHECK(cutoff(0.1, 0.3) == doctest::Approx(0.3));
    CHECK(cutoff(0.1, 1.0) == doctest::Approx(0.925));
    CHECK(cutoff(0.1, -1.0) == doctest::Approx(-0.925));
    for (double d : {0.5, 0.1, 0.01}) {
        const auto r = rgrid(4001, 2.0);
        for (size_t k = 0; k < r.size(); ++k) {
            const double t = cutoff(d, r[k]);
            CHECK(t == doctest::Approx(-cutoff(d, -r[k])).scale(1.0));
            CHECK(std::abs(t) <= 1.0);
            CHECK(cutoff_prime(d, r[k]) >= 0.0);
            CHECK(cutoff_prime(d, r[k]) <= 1.0);
            if (k) CHECK(t >= cutoff(d, r[k - 1]));
            if (std::abs(r[k]) <= 1 - d) CHECK(t == r[k]);
            if (std::abs(r[k]) >= 1 - d / 2) CHECK(std::abs(t) == doctest::Approx(1 - 0.75 * d));
        }
    }
}

TEST_CASE("cutoff derivative matches centred differences away from breakpoints") {
    const double d = 0.2;
    // T is piecewise polynomial of degree <= 2, so centred differences are exact up to rounding
    for (double h : {1e-2, 5e-3, 2.5e-3})
        for (double x : {0.3, 0.82, 0.85, 0.88, -0.85, 1.5}) {
            const double fd = (cutoff(d, x + h) - cutoff(d, x - h)) / (2 * h);
            CHECK(std::abs(fd - cutoff_prime(d, x)) < 1e-9);
        }
}
