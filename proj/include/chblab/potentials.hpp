#pragma once

#include <string>

namespace chb {

enum class PotentialKind { DoubleObstacle, Logarithmic };

/// Singular potential together with its regularization width.
///
/// For the double obstacle the concave coefficient is 1; for the logarithmic
/// potential it equals theta_c. Use the factory functions so that theta_cap
/// stays consistent with the kind.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::DoubleObstacle;
    double theta = 0.0;
    double theta_c = 0.0;
    double delta = 0.1;
    double theta_cap = 1.0;

    static PotentialSpec obstacle(double delta);
    static PotentialSpec logarithmic(double theta, double theta_c, double delta);

    /// Throws std::invalid_argument when the parameters are out of range.
    void validate() const;

    /// Largest delta for which the logarithmic lower bounds are guaranteed.
    double log_delta_limit() const;
};

std::string to_string(PotentialKind kind);

/// Regularized convex part, nonnegative and convex.
double beta_hat(const PotentialSpec& spec, double r);
/// Derivative of beta_hat.
double beta(const PotentialSpec& spec, double r);
/// Derivative of beta, nonnegative.
double beta_prime(const PotentialSpec& spec, double r);
/// Full regularized potential beta_hat(r) + theta_cap/2 (1 - r^2).
double psi(const PotentialSpec& spec, double r);
/// psi'(r) = beta(r) - theta_cap r.
double psi_prime(const PotentialSpec& spec, double r);

/// Unregularized logarithmic potential, finite only on (-1, 1).
double psi_log_exact(double theta, double theta_c, double r);

/// Odd C^{1,1} saturation: identity on |s| <= 1-delta, plateau 1-3delta/4.
double cutoff(double delta, double s);
double cutoff_prime(double delta, double s);

}  // namespace chb
