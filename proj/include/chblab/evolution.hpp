#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chblab/flow.hpp"
#include "chblab/grid.hpp"
#include "chblab/linalg.hpp"
#include "chblab/nutrient.hpp"
#include "chblab/potentials.hpp"
#include "chblab/sources.hpp"

namespace chb {

enum class FlowMode { None, Brinkman, Darcy };

std::string to_string(FlowMode mode);

/// Physical constants shared by the time-dependent and stationary solvers.
struct ModelParams {
    double chi = 0.0;
    double K = 1.0;
    Profile h = default_consumption(1.0);
    double nu = 1.0;
    ViscosityProfile viscosity = ViscosityProfile::constant_profile(1.0, 0.0);
    FlowMode mode = FlowMode::Brinkman;
};

struct SimState {
    ScalarField phi, mu, sigma, p;
    StaggeredVectorField v;
    double t = 0.0;
    double delta = 0.1;
    int step_count = 0;
};

/// One ledger row per accepted step.
struct LedgerRow {
    int step = 0;
    double t = 0.0;
    double dt = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double chemotaxis = 0.0;
    double source_work = 0.0;
    double lifting_work = 0.0;
    double energy_defect = 0.0;
    double mass_lhs = 0.0;
    double mass_rhs = 0.0;
    double mass_defect = 0.0;
    double overshoot = 0.0;
    double overshoot_integral = 0.0;
    double phi_mean = 0.0;
    double phi_max_abs = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    int newton_iterations = 0;
    double energy_slack = 0.0;
};

struct EnergyLedger {
    std::vector<LedgerRow> rows;
    static std::vector<std::string> columns();
    void write_csv(const std::string& path) const;
};

class CflViolation : public std::runtime_error {
public:
    CflViolation(double dt, double limit)
        : std::runtime_error("advective CFL bound violated: dt=" + std::to_string(dt) +
                             " exceeds h/(2 max|v|)=" + std::to_string(limit)),
          dt(dt),
          limit(limit) {}
    double dt, limit;
};

struct StepSettings {
    double newton_tol = 1e-10;
    int newton_max = 25;
    bool cap_cfl = true;
    /// Freeze v = 0 regardless of the flow mode.
    bool freeze_flow = false;
    bool skip_nutrient = false;
};

/// Discrete Ginzburg-Landau energy sum psi(phi) vol + 1/2 |grad phi|^2.
double discrete_energy(const ScalarField& phi, const PotentialSpec& spec);

struct MassRate {
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0;
};

/// lhs = (phi_Omega(next) - phi_Omega(prev)) / dt,
/// rhs = |Omega|^-1 int (Gamma_phi - phi Gamma_v - grad phi . v) at the next state.
MassRate mass_rate(const SimState& prev, const SimState& next, const SourceModel& model);
/// rhs alone for a single state.
double mass_source(const SimState& state, const SourceModel& model);

double overshoot(const ScalarField& phi);

/// Owns the caches (LU factors) of one run; not shareable between threads.
class Simulation {
public:
    Simulation(const Grid2D& grid, PotentialSpec spec, SourceModel model, ModelParams params,
               StepSettings settings = {});

    /// Completes phi0 to a full state (sigma, mu, v = 0).
    SimState initial_state(const ScalarField& phi0) const;

    /// Advances one operator-split step in place and returns the ledger row.
    LedgerRow step(SimState& state, double dt);

    const PotentialSpec& spec() const { return spec_; }
    const SourceModel& model() const { return model_; }
    const ModelParams& params() const { return params_; }
    const Grid2D& grid() const { return grid_; }
    int factorizations() const { return factorizations_; }

private:
    ScalarField solve_sigma(const ScalarField& phi) const;
    void solve_flow(SimState& s, const ScalarField& sigma);
    int newton_ch(SimState& s, const ScalarField& sigma, double dt, const Vector& source, double& slack);

    Grid2D grid_;
    PotentialSpec spec_;
    SourceModel model_;
    ModelParams params_;
    StepSettings settings_;
    SparseMatrix L_;
    BrinkmanSolver brinkman_;
    DirectSolver lagged_;
    double lagged_dt_ = -1.0;
    int factorizations_ = 0;
    double overshoot_integral_ = 0.0;
};

struct RunSettings {
    double t_end = 1.0;
    double dt = 0.0;  // 0 means 0.1 min(hx,hy)^2
    int snapshot_every = 0;
    std::function<void(const SimState&)> on_snapshot;
    std::function<void(const SimState&, const LedgerRow&)> on_step;
};

struct Trajectory {
    SimState final_state;
    EnergyLedger ledger;
    double holder_constant = 0.0;  // max |mean diff| / |t diff|^{1/2}
};

Trajectory run(Simulation& sim, SimState state, const RunSettings& settings);

double default_dt(const Grid2D& g);

/// tanh tumour seed of radius R centred in the domain, interface width eps.
ScalarField tanh_seed(const Grid2D& g, double radius, double eps = 1.0);
/// Clips into [-1+delta, 1-delta] (logarithmic potential initial data).
ScalarField clip_interior(const ScalarField& phi, double delta);

struct ContinuationScenario {
    Grid2D grid;
    PotentialSpec spec;  // delta is overwritten per run
    SourceModel model;
    ModelParams params;
    StepSettings step;
    std::function<ScalarField(const Grid2D&, double delta)> initial;
    double t_end = 1.0;
    double dt = 0.0;
};

struct ContinuationRow {
    double delta = 0.0;
    double overshoot_integral = 0.0;
    double ratio = 0.0;  // O / delta
    double max_overshoot = 0.0;
    double max_abs_phi = 0.0;
    double min_mean = 0.0;
    double max_mean = 0.0;
    bool means_inside = true;
    int steps = 0;
    EnergyLedger ledger;
};

/// Runs the scenario for each delta; runs are independent and fan out over threads.
std::vector<ContinuationRow> delta_continuation(const ContinuationScenario& scenario,
                                                const std::vector<double>& deltas, int threads = 1);

}  // namespace chb
