#include "chblab/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace chb {

namespace {

// Core of the logarithmic convex part, valid for |r| < 1.
double log_hat_core(double theta, double r) {
    return 0.5 * theta * ((1.0 + r) * std::log1p(r) + (1.0 - r) * std::log1p(-r));
}

double log_beta_core(double theta, double r) {
    return 0.5 * theta * (std::log1p(r) - std::log1p(-r));
}

double log_beta_prime_core(double theta, double r) { return theta / (1.0 - r * r); }

double obstacle_hat(double delta, double r) {
    const double a = std::abs(r);
    if (a <= 1.0) return 0.0;
    if (a < 1.0 + delta) {
        const double e = a - 1.0;
        return e * e * e / (6.0 * delta * delta);
    }
    const double e = a - (1.0 + 0.5 * delta);
    return e * e / (2.0 * delta) + delta / 24.0;
}

double obstacle_beta(double delta, double r) {
    const double a = std::abs(r);
    double b = 0.0;
    if (a <= 1.0) {
        b = 0.0;
    } else if (a < 1.0 + delta) {
        const double e = a - 1.0;
        b = e * e / (2.0 * delta * delta);
    } else {
        b = (a - 1.0 - 0.5 * delta) / delta;
    }
    return r < 0.0 ? -b : b;
}

double obstacle_beta_prime(double delta, double r) {
    const double a = std::abs(r);
    if (a <= 1.0) return 0.0;
    if (a < 1.0 + delta) return (a - 1.0) / (delta * delta);
    return 1.0 / delta;
}

}  // namespace

PotentialSpec PotentialSpec::obstacle(double delta) {
    PotentialSpec s;
    s.kind = PotentialKind::DoubleObstacle;
    s.delta = delta;
    s.theta_cap = 1.0;
    return s;
}

PotentialSpec PotentialSpec::logarithmic(double theta, double theta_c, double delta) {
    PotentialSpec s;
    s.kind = PotentialKind::Logarithmic;
    s.theta = theta;
    s.theta_c = theta_c;
    s.delta = delta;
    s.theta_cap = theta_c;
    return s;
}

void PotentialSpec::validate() const {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("potential.delta must lie in (0,1)");
    if (kind == PotentialKind::Logarithmic) {
        if (!(theta > 0.0 && theta < theta_c))
            throw std::invalid_argument("logarithmic potential requires 0 < theta < theta_c");
        if (theta_cap != theta_c)
            throw std::invalid_argument("theta_cap must equal theta_c for the logarithmic potential");
    } else if (theta_cap != 1.0) {
        throw std::invalid_argument("theta_cap must equal 1 for the double obstacle potential");
    }
}

double PotentialSpec::log_delta_limit() const {
    if (kind != PotentialKind::Logarithmic) return 1.0;
    return std::min(1.0, theta / (4.0 * theta_c));
}

std::string to_string(PotentialKind kind) {
    return kind == PotentialKind::DoubleObstacle ? "obstacle" : "log";
}

double beta_hat(const PotentialSpec& spec, double r) {
    if (spec.kind == PotentialKind::DoubleObstacle) return obstacle_hat(spec.delta, r);
    const double a = std::abs(r);
    const double r0 = 1.0 - spec.delta;
    if (a <= r0) return log_hat_core(spec.theta, r);
    const double e = a - r0;
    return log_hat_core(spec.theta, r0) + log_beta_core(spec.theta, r0) * e +
           0.5 * log_beta_prime_core(spec.theta, r0) * e * e;
}

double beta(const PotentialSpec& spec, double r) {
    if (spec.kind == PotentialKind::DoubleObstacle) return obstacle_beta(spec.delta, r);
    const double a = std::abs(r);
    const double r0 = 1.0 - spec.delta;
    if (a <= r0) return log_beta_core(spec.theta, r);
    const double b = log_beta_core(spec.theta, r0) + log_beta_prime_core(spec.theta, r0) * (a - r0);
    return r < 0.0 ? -b : b;
}

double beta_prime(const PotentialSpec& spec, double r) {
    if (spec.kind == PotentialKind::DoubleObstacle) return obstacle_beta_prime(spec.delta, r);
    const double r0 = 1.0 - spec.delta;
    return log_beta_prime_core(spec.theta, std::min(std::abs(r), r0));
}

double psi(const PotentialSpec& spec, double r) {
    return beta_hat(spec, r) + 0.5 * spec.theta_cap * (1.0 - r * r);
}

double psi_prime(const PotentialSpec& spec, double r) { return beta(spec, r) - spec.theta_cap * r; }

double psi_log_exact(double theta, double theta_c, double r) {
    if (!(std::abs(r) < 1.0)) return r == 1.0 || r == -1.0 ? theta * std::log(2.0) : INFINITY;
    return log_hat_core(theta, r) + 0.5 * theta_c * (1.0 - r * r);
}

double cutoff(double delta, double s) {
    const double a = std::abs(s);
    double t;
    if (a <= 1.0 - delta) {
        t = a;
    } else if (a <= 1.0 - 0.5 * delta) {
        const double e = a - (1.0 - delta);
        t = a - e * e / delta;
    } else {
        t = 1.0 - 0.75 * delta;
    }
    return s < 0.0 ? -t : t;
}

double cutoff_prime(double delta, double s) {
    const double a = std::abs(s);
    if (a <= 1.0 - delta) return 1.0;
    if (a <= 1.0 - 0.5 * delta) return 1.0 - 2.0 * (a - (1.0 - delta)) / delta;
    return 0.0;
}

}  // namespace chb
