#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swfem/io/config.hpp"
#include "swfem/timeint/integrator.hpp"

namespace swfem {

/// Either a structured n x n torus ("n=16") or an MSH file ("msh=path").
struct MeshSpec {
    int n = 0;
    std::string msh;

    /// Throws ConfigError for anything but n=<int >= 3> or msh=<path>.
    static MeshSpec parse(const std::string& text);
    std::shared_ptr<const Mesh> load() const;
    std::string str() const;
};

/// Fully resolved settings of one experiment. Unset optionals take the
/// experiment's defaults (see resolve_config).
struct ExperimentConfig {
    std::string experiment = "run";  ///< balance | conservation | vortex | run
    TripleFamily family = TripleFamily::BDM1;
    std::vector<MeshSpec> meshes;
    double f = 0.0;
    double g = 0.0;
    std::vector<double> dts;
    double t_end = 0.0;
    bool apvm = false;
    /// APVM timescale; empty means dt/2 for each dt.
    std::optional<double> tau;
    int sample_every = 1;
    std::string out_dir = "out";
    /// Initial condition for `run`: balance | conservation | vortex | rest.
    std::string init = "conservation";
    /// Times at which vortex snapshots are written.
    std::vector<double> snapshot_times;
    CgOptions cg{};
    bool write_vtk = true;

    double tau_for(double dt) const { return tau ? *tau : 0.5 * dt; }
    /// Key = value form that Config::parse reads back into the same settings.
    Config to_config() const;
};

/// Defaults for `experiment`, then overridden by every key present in
/// `config`. Recognised keys: experiment, element, mesh (comma-separated
/// specs), f, g, dt (comma-separated), t_end, apvm, tau, sample_every, out,
/// init, snapshots, cg_tolerance, cg_max_iterations, vtk. Throws
/// ConfigError for unknown keys or invalid values.
ExperimentConfig resolve_config(const std::string& experiment, const Config& config);

// ---- initial conditions -------------------------------------------------------

struct InitialCondition {
    VectorFunction u;
    ScalarFunction h;
};

/// Zonal jet in geostrophic balance: u = (sin 4 pi y, 0),
/// h = 10 + (f / g) cos(4 pi y) / (4 pi).
InitialCondition balanced_jet(double f, double g);
/// u = (0, sin 2 pi x), h = 1 + (f / g) sin(4 pi y) / (4 pi).
InitialCondition conservation_state(double f, double g);

/// Two Gaussian vortices of width sigma at (0.4, 0.5) and (0.6, 0.5): the
/// streamfunction psi sums each Gaussian over its nine nearest periodic
/// copies, u = perp-grad psi and h = 1 + (f / g) psi (linear balance). The
/// amplitude makes max |u| equal `max_speed` on a 400 x 400 sample grid.
struct VortexPair {
    double sigma = 0.07;
    double max_speed = 0.05;
    double amplitude = 0.0;
    double f = 5.0, g = 5.0;

    static VortexPair make(double f, double g, double sigma = 0.07, double max_speed = 0.05);
    double psi(const Vec2& x) const;
    Vec2 velocity(const Vec2& x) const;
    InitialCondition initial() const;
};

// ---- experiments --------------------------------------------------------------

struct BalanceRow {
    std::string mesh;
    int cells = 0;
    double dx = 0.0;
    int ndof = 0;  ///< velocity plus depth DOFs
    double err_u = 0.0, err_h = 0.0;
    /// Largest relative error over all steps; the final-time error of a
    /// balanced state is a snapshot of oscillating gravity waves, so this
    /// envelope converges more regularly.
    double max_err_u = 0.0, max_err_h = 0.0;
    int steps = 0;
};

struct BalanceResult {
    std::vector<BalanceRow> rows;
    /// Least-squares log-log slopes against dx and against 1/sqrt(ndof).
    double slope_u_dx = 0.0, slope_h_dx = 0.0;
    double slope_u_dof = 0.0, slope_h_dof = 0.0;
    /// Slopes of the maximum-over-time errors against dx.
    double slope_u_max = 0.0, slope_h_max = 0.0;
};

/// Run the balanced jet on each mesh; errors are L2 norms of final minus
/// initial (projected) fields, relative to the initial field norms.
BalanceResult exp_balance(const ExperimentConfig& cfg);

struct ConservationRow {
    double dt = 0.0;
    int steps = 0;
    double energy_change = 0.0;     ///< (E_final - E_0) / E_0
    double enstrophy_change = 0.0;  ///< (Z_final - Z_0) / Z_0
    double tau = 0.0;
};

struct ConservationResult {
    std::vector<ConservationRow> rows;
    /// Slopes of log |change| against log dt.
    double energy_slope = 0.0, enstrophy_slope = 0.0;
};

/// One run per dt on the first mesh of the config.
ConservationResult exp_conservation(const ExperimentConfig& cfg);

struct VortexRun {
    RunRecord record;
    State final_state;
};

struct VortexResult {
    VortexRun plain, apvm;
    double energy_change_plain = 0.0, energy_change_apvm = 0.0;        ///< relative, final vs initial
    double enstrophy_change_plain = 0.0, enstrophy_change_apvm = 0.0;  ///< relative, final vs initial
    /// Largest per-sample increase of APVM enstrophy after t = 1, relative.
    double apvm_max_enstrophy_increase = 0.0;
    double max_energy_difference = 0.0;     ///< max |E_apvm - E_plain| / E_0 over samples
    double max_imbalance_difference = 0.0;  ///< max |I_apvm - I_plain| over samples
    double imbalance_variation = 0.0;       ///< min over runs of (max I - min I)
};

/// The vortex pair with and without APVM on the first mesh. When `out_dir`
/// is non-empty and cfg.write_vtk is set, PV/velocity/depth snapshots are
/// written at cfg.snapshot_times.
VortexResult exp_vortex(const ExperimentConfig& cfg, const std::string& out_dir = "");

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Run an experiment end to end: results, CSV tables, VTK files, a
/// manifest.json and config.ini (re-usable with --config) in cfg.out_dir.
/// Returns a short human-readable summary.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace swfem
