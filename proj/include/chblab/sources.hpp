#pragma once

#include <functional>

#include "chblab/potentials.hpp"

namespace chb {

/// A scalar source building block with its derivative.
struct SourceFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;

    double operator()(double r) const { return value(r); }
    double d(double r) const { return derivative(r); }

    static SourceFunction zero();
};

struct ExampleParams {
    double P = 1.0;
    double A = 0.5;
    double alpha = 1.0;
    double rho_S = 2.0;
    double r0 = 1.5;
};

/// Gamma_v = b_v(r) s + f_v(r), Gamma_phi = b_phi(r) s + f_phi(r).
struct SourceModel {
    SourceFunction b_v = SourceFunction::zero();
    SourceFunction b_phi = SourceFunction::zero();
    SourceFunction f_v = SourceFunction::zero();
    SourceFunction f_phi = SourceFunction::zero();
    ExampleParams params;
    PotentialKind kind = PotentialKind::DoubleObstacle;
    bool active = false;

    /// Model with every source switched off.
    static SourceModel none();
};

/// Tumour growth example: Gamma = P(1-r^2)s - A r scaled by alpha (volume) and rho_S (phase),
/// extended beyond [-1,1] according to the potential kind.
/// Throws std::invalid_argument when the sign condition (B1) fails.
SourceModel build_example_model(double P, double A, double alpha, double rho_S,
                                PotentialKind kind, double r0 = 1.5);

double gamma_v(const SourceModel& m, double r, double s);
double gamma_phi(const SourceModel& m, double r, double s);
/// gamma(r,s) = r Gamma_v(r,s) - Gamma_phi(r,s).
double gamma_stationary(const SourceModel& m, double r, double s);
/// Partial derivatives with respect to r.
double gamma_v_dr(const SourceModel& m, double r, double s);
double gamma_phi_dr(const SourceModel& m, double r, double s);
double gamma_stationary_dr(const SourceModel& m, double r, double s);

/// H(r) = r f_v(r) - f_phi(r).
double source_balance(const SourceModel& m, double r);

/// Largest delta0 < r0 - 1 with H > 0 on (1-delta0, 1+delta0) and H < 0 on
/// (-1-delta0, -1+delta0), found by bisection on a sampled bracketing test.
double source_delta0(const SourceModel& m);

/// Upper bound of |gamma(r,s)| sampled over r in [-2,2], s in [0,1].
double max_abs_gamma(const SourceModel& m);

}  // namespace chb
