#pragma once

#include <memory>

#include "swfem/fem/assembly.hpp"
#include "swfem/fem/function_space.hpp"
#include "swfem/linalg/solvers.hpp"

namespace swfem {

struct Params {
    /// Coriolis parameter as a function of physical position in [0,1)^2.
    ScalarFunction f = [](const Vec2&) { return 0.0; };
    double g = 1.0;
    bool apvm = false;
    /// APVM timescale; the driver sets dt/2 unless overridden.
    double tau = 0.0;

    static Params constant(double f0, double g, bool apvm = false, double tau = 0.0) {
        return {[f0](const Vec2&) { return f0; }, g, apvm, tau};
    }
};

struct State {
    Field u;  ///< velocity in S
    Field h;  ///< layer depth in V
    double t = 0.0;
};

/// Right-hand side of the coefficient ODE system plus the diagnostics it
/// was computed from.
struct Tendency {
    Eigen::VectorXd du;  ///< S coefficients of du/dt
    Eigen::VectorXd dh;  ///< V coefficients of dh/dt
    Field q;             ///< potential vorticity in E
    Field flux;          ///< volume flux F in S
    /// Largest CG iteration count among the solves of this evaluation.
    int cg_iterations = 0;
};

/// Previous solutions reused as CG starting guesses. Purely an accelerator:
/// results agree with cold starts to solver tolerance.
struct WarmStart {
    Eigen::VectorXd q, flux, du;
};

/// Pointwise modified PV q* = q - tau (u . grad q) of the anticipated
/// potential vorticity method, evaluated cellwise from E basis gradients.
class ModifiedPv {
public:
    ModifiedPv(const Field& q, const Field& u, double tau) : q_(q), u_(u), tau_(tau) {}
    double operator()(int cell, const Vec2& ref) const;

private:
    const Field& q_;
    const Field& u_;
    double tau_;
};

/// Mixed finite element shallow-water model on a compatible (E, S, V)
/// triple over a doubly-periodic mesh.
///
/// Prognostic: u in S, h in V. Diagnostic: q in E from
///   <g, q h> = -<perp-grad g, u> + <g, f>          for all g in E
/// and F in S from <w, F> = <w, h u>. Tendencies:
///   <w, u_t> = -<w, q* F^perp> + <div w, g h + |u|^2 / 2>
///   h_t = -div F    (pointwise, as V coefficients)
/// with q* = q unless APVM is enabled. All nonlinear integrands are
/// polynomial and integrated exactly, so energy and enstrophy rates vanish
/// to solver tolerance.
class ShallowWaterModel {
public:
    ShallowWaterModel(std::shared_ptr<const Mesh> mesh, TripleFamily family, Params params,
                      CgOptions cg = {});

    const CompatibleSpaces& spaces() const { return spaces_; }
    const Params& params() const { return params_; }
    const Mesh& mesh() const { return *mesh_; }
    const CgOptions& cg_options() const { return cg_; }
    /// Exactness degree of the rule used for all nonlinear forms.
    int quadrature_degree() const { return rule_.degree; }

    const SparseMatrix& velocity_mass() const { return mass_s_; }
    const SparseMatrix& depth_mass() const { return mass_v_; }
    const SparseMatrix& div() const { return div_; }
    const SparseMatrix& perp_grad() const { return perp_grad_; }

    /// L2 projections of analytic fields (arguments wrapped into [0,1)^2).
    State initial_state(const VectorFunction& u, const ScalarFunction& h) const;
    Field project_velocity(const VectorFunction& u) const;
    Field project_depth(const ScalarFunction& h) const;
    Field project_vorticity(const ScalarFunction& q) const;

    /// Throws StateError if h <= 1e-10 at any quadrature point.
    void check_state(const State& state) const;

    Field diagnose_q(const State& state, SolverReport* report = nullptr, const Eigen::VectorXd* guess = nullptr) const;
    Field project_flux(const State& state, SolverReport* report = nullptr,
                       const Eigen::VectorXd* guess = nullptr) const;
    /// Full tendency with the model's parameters (q* when APVM is on).
    Tendency tendency(const State& state, WarmStart* warm = nullptr) const;

    /// Weighted E mass <g, h g'>.
    SparseMatrix vorticity_mass(const Field& h) const;
    /// Weak curl: <g, zeta> = -<perp-grad g, u> for all g in E.
    Field weak_curl(const Field& u) const;

    double energy(const State& state) const;
    double enstrophy(const State& state, const Field& q) const;
    double total_vorticity(const State& state, const Field& q) const;
    double total_mass(const State& state) const;
    /// sqrt(<r, r>) with <w, r> = <w, f u^perp> - <div w, g h> for all w in S.
    double geostrophic_imbalance(const State& state) const;

    /// dE/dt = <h u, u_t> + <h_t, g h + |u|^2 / 2>, integrated directly.
    double energy_rate(const State& state, const Tendency& tend) const;
    /// dZ/dt = 2 <q, (q h)_t> - <q^2, h_t> = -2 <perp-grad q, u_t> - <q^2, h_t>.
    double enstrophy_rate(const State& state, const Tendency& tend) const;

    /// {F, G} = <dFdu, -q dGdu^perp> + <div dFdu, dGdh> - <dFdh, div dGdu>.
    double bracket(const Field& dfdu, const Field& dfdh, const Field& dgdu, const Field& dgdh, const Field& q) const;
    /// Functional derivatives of the Hamiltonian: (F, Pi_V(g h + |u|^2 / 2)).
    std::pair<Field, Field> energy_derivatives(const State& state) const;
    /// Functional derivatives of the enstrophy: (-2 perp-grad q, -Pi_V(q^2)).
    std::pair<Field, Field> enstrophy_derivatives(const Field& q) const;

    /// Solve with the velocity mass matrix (CG) or the depth mass (blockwise).
    Eigen::VectorXd solve_velocity_mass(const Eigen::VectorXd& rhs, SolverReport* report = nullptr,
                                        const Eigen::VectorXd* guess = nullptr) const;
    Eigen::VectorXd solve_depth_mass(const Eigen::VectorXd& rhs) const;

private:
    // Depth and velocity at the nonlinear quadrature points, [cell * nq + q].
    std::vector<double> depth_at_points(const Field& h) const;
    std::vector<Vec2> velocity_at_points(const Field& u) const;
    std::vector<double> vorticity_at_points(const Field& q) const;
    std::vector<Vec2> vorticity_gradient_at_points(const Field& q) const;
    std::vector<double> divergence_at_points(const Field& u) const;
    void check_depth(const std::vector<double>& hq) const;
    SparseMatrix weighted_vorticity_mass(const std::vector<double>& hq) const;
    Eigen::VectorXd velocity_load(const std::vector<Vec2>& values, const std::vector<double>* divergence_values) const;
    Eigen::VectorXd depth_load(const std::vector<double>& values) const;
    double integrate(const std::vector<double>& values) const;

    std::shared_ptr<const Mesh> mesh_;
    CompatibleSpaces spaces_;
    Params params_;
    CgOptions cg_;
    QuadratureRule rule_;
    ScalarTabulation e_tab_, v_tab_;
    VectorTabulation s_tab_;
    SparseMatrix mass_s_, mass_v_, div_, perp_grad_;
    std::unique_ptr<BlockDiagonalSolver> depth_solver_;
    std::unique_ptr<L2Projector> e_projector_, s_projector_, v_projector_;
    AssemblyPattern e_pattern_;
    std::vector<double> f_at_points_;
    Eigen::VectorXd f_load_;  ///< <g, f> for all g in E
};

/// Exactness degree needed for every nonlinear integrand of a triple.
int nonlinear_quadrature_degree(TripleFamily family);

}  // namespace swfem
