#include "chblab/sources.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chb {

namespace {

// Cubic Hermite basis on t in [0,1].
double h00(double t) { return (2.0 * t - 3.0) * t * t + 1.0; }
double h10(double t) { return ((t - 2.0) * t + 1.0) * t; }
double dh00(double t) { return 6.0 * t * t - 6.0 * t; }
double dh10(double t) { return (3.0 * t - 4.0) * t + 1.0; }

// Cubic going from (a, y0, slope m0) to (b, 0, slope 0).
double hermite_to_zero(double x, double a, double b, double y0, double m0) {
    const double L = b - a;
    const double t = (x - a) / L;
    return y0 * h00(t) + m0 * L * h10(t);
}

double hermite_to_zero_d(double x, double a, double b, double y0, double m0) {
    const double L = b - a;
    const double t = (x - a) / L;
    return (y0 * dh00(t) + m0 * L * dh10(t)) / L;
}

constexpr double kTaperEnd = 1.5;

// Odd extension of r -> r beyond [-1,1] that tapers C^1 to zero on [1, 1.5].
double taper_identity(double r) {
    const double a = std::abs(r);
    double w;
    if (a <= 1.0) w = a;
    else if (a < kTaperEnd) w = hermite_to_zero(a, 1.0, kTaperEnd, 1.0, 1.0);
    else w = 0.0;
    return r < 0.0 ? -w : w;
}

double taper_identity_d(double r) {
    const double a = std::abs(r);
    if (a <= 1.0) return 1.0;
    if (a < kTaperEnd) return hermite_to_zero_d(a, 1.0, kTaperEnd, 1.0, 1.0);
    return 0.0;
}

double plus_part_quadratic(double r) { return std::max(0.0, 1.0 - r * r); }
double plus_part_quadratic_d(double r) { return std::abs(r) < 1.0 ? -2.0 * r : 0.0; }

}  // namespace

SourceFunction SourceFunction::zero() {
    return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

SourceModel SourceModel::none() { return SourceModel{}; }

SourceModel build_example_model(double P, double A, double alpha, double rho_S,
                                PotentialKind kind, double r0) {
    if (!(P > 0.0) || !(A > 0.0))
        throw std::invalid_argument("source.P and source.A must be positive");
    if (!(rho_S > std::abs(alpha)))
        throw std::invalid_argument(
            "(B1) sign condition violated: need rho_S > |alpha| so that f_phi(1) - f_v(1) < 0 "
            "and f_phi(-1) + f_v(-1) > 0");
    if (alpha < 0.0)
        throw std::invalid_argument(
            "(A4) requires b_v >= 0, so alpha must be nonnegative");
    if (kind == PotentialKind::Logarithmic && !(r0 > 1.0))
        throw std::invalid_argument("source.r0 must exceed 1 for the log-case source extension");

    SourceModel m;
    m.params = {P, A, alpha, rho_S, r0};
    m.kind = kind;
    m.active = true;

    m.b_v = {[=](double r) { return alpha * P * plus_part_quadratic(r); },
             [=](double r) { return alpha * P * plus_part_quadratic_d(r); }};
    m.b_phi = {[=](double r) { return rho_S * P * plus_part_quadratic(r); },
               [=](double r) { return rho_S * P * plus_part_quadratic_d(r); }};
    m.f_v = {[=](double r) { return -alpha * A * taper_identity(r); },
             [=](double r) { return -alpha * A * taper_identity_d(r); }};

    // f_phi = r f_v + G with G = -H; H is the balance r f_v - f_phi.
    const double hp = A * (rho_S - alpha);  // H(1)
    const double hm = -A * (rho_S + alpha); // H(-1)
    std::function<double(double)> G, dG;
    if (kind == PotentialKind::DoubleObstacle) {
        G = [=](double r) {
            if (r >= 1.0) return -hp;
            if (r <= -1.0) return -hm;
            return -A * r * (rho_S - alpha * r);
        };
        dG = [=](double r) {
            if (std::abs(r) >= 1.0) return 0.0;
            return -A * (rho_S - 2.0 * alpha * r);
        };
    } else {
        G = [=](double r) {
            const double a = std::abs(r);
            const double h1 = r > 0.0 ? hp : hm;
            if (a <= 1.0) return -A * r * (rho_S - alpha * r);
            if (a <= r0) return -h1;
            if (a < 2.0 * r0) return -hermite_to_zero(a, r0, 2.0 * r0, h1, 0.0);
            return 0.0;
        };
        dG = [=](double r) {
            const double a = std::abs(r);
            const double h1 = r > 0.0 ? hp : hm;
            if (a <= 1.0) return -A * (rho_S - 2.0 * alpha * r);
            if (a <= r0 || a >= 2.0 * r0) return 0.0;
            const double sgn = r > 0.0 ? 1.0 : -1.0;
            return -sgn * hermite_to_zero_d(a, r0, 2.0 * r0, h1, 0.0);
        };
    }
    m.f_phi = {[=](double r) { return -alpha * A * r * taper_identity(r) + G(r); },
               [=](double r) {
                   return -alpha * A * (taper_identity(r) + r * taper_identity_d(r)) + dG(r);
               }};
    return m;
}

double gamma_v(const SourceModel& m, double r, double s) { return m.b_v(r) * s + m.f_v(r); }

double gamma_phi(const SourceModel& m, double r, double s) {
    return m.b_phi(r) * s + m.f_phi(r);
}

double gamma_stationary(const SourceModel& m, double r, double s) {
    return r * gamma_v(m, r, s) - gamma_phi(m, r, s);
}

double gamma_v_dr(const SourceModel& m, double r, double s) {
    return m.b_v.d(r) * s + m.f_v.d(r);
}

double gamma_phi_dr(const SourceModel& m, double r, double s) {
    return m.b_phi.d(r) * s + m.f_phi.d(r);
}

double gamma_stationary_dr(const SourceModel& m, double r, double s) {
    return gamma_v(m, r, s) + r * gamma_v_dr(m, r, s) - gamma_phi_dr(m, r, s);
}

double source_balance(const SourceModel& m, double r) { return r * m.f_v(r) - m.f_phi(r); }

double source_delta0(const SourceModel& m) {
    const double upper = std::min(1.0, m.params.r0 - 1.0);
    auto bracket_ok = [&](double d) {
        constexpr int samples = 2000;
        for (int k = 1; k < samples; ++k) {
            const double x = -d + 2.0 * d * k / samples;
            if (!(source_balance(m, 1.0 + x) > 0.0)) return false;
            if (!(source_balance(m, -1.0 + x) < 0.0)) return false;
        }
        return true;
    };
    if (!bracket_ok(1e-6))
        throw std::invalid_argument("log-case sign structure fails near r = +-1; no delta0 exists");
    double lo = 1e-6, hi = upper;
    if (bracket_ok(hi)) return hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (bracket_ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

double max_abs_gamma(const SourceModel& m) {
    double best = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double r = -2.0 + 4.0 * i / 400.0;
        for (int j = 0; j <= 10; ++j) {
            const double s = j / 10.0;
            best = std::max(best, std::abs(gamma_stationary(m, r, s)));
        }
    }
    return best;
}

}  // namespace chb
