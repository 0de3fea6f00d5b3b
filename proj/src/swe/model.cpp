#include "swfem/swe/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "swfem/error.hpp"
#include "swfem/fem/piola.hpp"
#include "swfem/swe/operators.hpp"

namespace swfem {

namespace {

constexpr double kMinDepth = 1e-10;

}  // namespace

int nonlinear_quadrature_degree(TripleFamily family) {
    // max(3kS + kE - 1, 2kE + kV, 2kS + kE, 2kS + 2) over (kE, kS, kV): the
    // APVM flux term q* F^perp . w is the highest-degree integrand.
    switch (family) {
        case TripleFamily::RT0: return 4;
        case TripleFamily::BDM1: return 4;
        case TripleFamily::BDFM1: return 8;
        case TripleFamily::BDM2: return 8;
    }
    return 8;
}

double ModifiedPv::operator()(int cell, const Vec2& ref) const {
    const double q = q_.value(cell, ref);
    if (tau_ == 0.0) return q;
    return q - tau_ * u_.vector_value(cell, ref).dot(q_.gradient(cell, ref));
}

ShallowWaterModel::ShallowWaterModel(std::shared_ptr<const Mesh> mesh, TripleFamily family, Params params,
                                     CgOptions cg)
    : mesh_(std::move(mesh)),
      spaces_(make_triple(mesh_, family)),
      params_(std::move(params)),
      cg_(cg),
      rule_(triangle_quadrature(nonlinear_quadrature_degree(family))),
      e_pattern_(spaces_.vorticity->dim(), spaces_.vorticity->dim(), mesh_->num_cells(),
                 [this](int c) { return spaces_.vorticity->cell_dofs(c); },
                 [this](int c) { return spaces_.vorticity->cell_dofs(c); }) {
    if (!(params_.g > 0.0)) throw ConfigError("g must be positive");
    if (!(params_.tau >= 0.0)) throw ConfigError("tau must be non-negative");
    e_tab_ = spaces_.vorticity->element().tabulate_scalar(rule_.points);
    v_tab_ = spaces_.depth->element().tabulate_scalar(rule_.points);
    s_tab_ = spaces_.velocity->element().tabulate_vector(rule_.points);

    const ProjectionOptions popts{14, cg_};
    e_projector_ = std::make_unique<L2Projector>(spaces_.vorticity, popts);
    s_projector_ = std::make_unique<L2Projector>(spaces_.velocity, popts);
    v_projector_ = std::make_unique<L2Projector>(spaces_.depth, popts);
    mass_s_ = s_projector_->mass();
    mass_v_ = v_projector_->mass();
    depth_solver_ = std::make_unique<BlockDiagonalSolver>(mass_v_, spaces_.depth->cell_blocks());
    div_ = assemble_div(*spaces_.velocity, *spaces_.depth);
    perp_grad_ = assemble_perp_grad_embedding(*spaces_.vorticity, *spaces_.velocity);

    const int nq = rule_.size();
    f_at_points_.resize(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const CellGeometry& g = mesh_->geometry(c);
        for (int q = 0; q < nq; ++q) f_at_points_[c * nq + q] = params_.f(wrap_periodic(g.map(rule_.points[q])));
    }
    f_load_ = assemble_load(*spaces_.vorticity, params_.f, popts.quadrature_degree);
}

// ---- pointwise evaluation ----------------------------------------------

std::vector<double> ShallowWaterModel::depth_at_points(const Field& h) const {
    const int nq = rule_.size();
    const FunctionSpace& v = *spaces_.depth;
    std::vector<double> out(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = v.cell_dofs(c);
        for (int q = 0; q < nq; ++q) {
            double s = 0.0;
            for (int j = 0; j < v_tab_.dim; ++j) s += h.coeffs[dofs[j]] * v_tab_.value(q, j);
            out[c * nq + q] = s;
        }
    }
    return out;
}

std::vector<double> ShallowWaterModel::vorticity_at_points(const Field& q) const {
    const int nq = rule_.size();
    const FunctionSpace& e = *spaces_.vorticity;
    std::vector<double> out(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = e.cell_dofs(c);
        for (int k = 0; k < nq; ++k) {
            double s = 0.0;
            for (int j = 0; j < e_tab_.dim; ++j) s += q.coeffs[dofs[j]] * e_tab_.value(k, j);
            out[c * nq + k] = s;
        }
    }
    return out;
}

std::vector<Vec2> ShallowWaterModel::vorticity_gradient_at_points(const Field& q) const {
    const int nq = rule_.size();
    const FunctionSpace& e = *spaces_.vorticity;
    std::vector<Vec2> out(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = e.cell_dofs(c);
        const CellGeometry& g = mesh_->geometry(c);
        for (int k = 0; k < nq; ++k) {
            Vec2 s = Vec2::Zero();
            for (int j = 0; j < e_tab_.dim; ++j) s += q.coeffs[dofs[j]] * e_tab_.gradient(k, j);
            out[c * nq + k] = physical_gradient(g, s);
        }
    }
    return out;
}

std::vector<Vec2> ShallowWaterModel::velocity_at_points(const Field& u) const {
    const int nq = rule_.size();
    const FunctionSpace& s = *spaces_.velocity;
    std::vector<Vec2> out(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = s.cell_dofs(c);
        const auto signs = s.cell_signs(c);
        const CellGeometry& g = mesh_->geometry(c);
        const Mat2 scaled = g.jacobian / g.det;
        for (int k = 0; k < nq; ++k) {
            Vec2 ref = Vec2::Zero();
            for (int i = 0; i < s_tab_.dim; ++i) ref += (signs[i] * u.coeffs[dofs[i]]) * s_tab_.value(k, i);
            out[c * nq + k] = scaled * ref;
        }
    }
    return out;
}

std::vector<double> ShallowWaterModel::divergence_at_points(const Field& u) const {
    const int nq = rule_.size();
    const FunctionSpace& s = *spaces_.velocity;
    std::vector<double> out(static_cast<std::size_t>(mesh_->num_cells()) * nq);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = s.cell_dofs(c);
        const auto signs = s.cell_signs(c);
        const double inv_det = 1.0 / mesh_->geometry(c).det;
        for (int k = 0; k < nq; ++k) {
            double d = 0.0;
            for (int i = 0; i < s_tab_.dim; ++i) d += signs[i] * u.coeffs[dofs[i]] * s_tab_.divergence(k, i);
            out[c * nq + k] = d * inv_det;
        }
    }
    return out;
}

void ShallowWaterModel::check_depth(const std::vector<double>& hq) const {
    const int nq = rule_.size();
    for (std::size_t k = 0; k < hq.size(); ++k) {
        if (!(hq[k] > kMinDepth)) {
            std::ostringstream os;
            os << "layer depth " << hq[k] << " <= " << kMinDepth << " at quadrature point " << k % nq << " of cell "
               << k / nq;
            throw StateError(os.str());
        }
    }
}

void ShallowWaterModel::check_state(const State& state) const { check_depth(depth_at_points(state.h)); }

// ---- assembly on the nonlinear rule --------------------------------------

SparseMatrix ShallowWaterModel::weighted_vorticity_mass(const std::vector<double>& hq) const {
    SparseMatrix m = e_pattern_.zero_matrix();
    auto& values = m.values();
    const int n = e_tab_.dim;
    const int nq = rule_.size();
    Eigen::MatrixXd local(n, n);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double det = mesh_->geometry(c).det;
        local.setZero();
        for (int k = 0; k < nq; ++k) {
            const double w = rule_.weights[k] * det * hq[c * nq + k];
            for (int i = 0; i < n; ++i) {
                const double wi = w * e_tab_.value(k, i);
                for (int j = 0; j <= i; ++j) local(i, j) += wi * e_tab_.value(k, j);
            }
        }
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                values[e_pattern_.slot(c, i, j)] += local(i, j);
                if (i != j) values[e_pattern_.slot(c, j, i)] += local(i, j);
            }
    }
    return m;
}

Eigen::VectorXd ShallowWaterModel::velocity_load(const std::vector<Vec2>& values,
                                                 const std::vector<double>* divergence_values) const {
    // <w, v> + <div w, d> with w = J w_ref / det and dA = det dA_ref.
    const int nq = rule_.size();
    const FunctionSpace& s = *spaces_.velocity;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(s.dim());
    std::vector<double> local(s_tab_.dim);
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = s.cell_dofs(c);
        const auto signs = s.cell_signs(c);
        const Mat2 jt = mesh_->geometry(c).jacobian.transpose();
        std::fill(local.begin(), local.end(), 0.0);
        for (int k = 0; k < nq; ++k) {
            const Vec2 pulled = rule_.weights[k] * (jt * values[c * nq + k]);
            const double d = divergence_values ? rule_.weights[k] * (*divergence_values)[c * nq + k] : 0.0;
            for (int i = 0; i < s_tab_.dim; ++i) local[i] += pulled.dot(s_tab_.value(k, i)) + d * s_tab_.divergence(k, i);
        }
        for (int i = 0; i < s_tab_.dim; ++i) b[dofs[i]] += signs[i] * local[i];
    }
    return b;
}

Eigen::VectorXd ShallowWaterModel::depth_load(const std::vector<double>& values) const {
    const int nq = rule_.size();
    const FunctionSpace& v = *spaces_.depth;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(v.dim());
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const auto dofs = v.cell_dofs(c);
        const double det = mesh_->geometry(c).det;
        for (int k = 0; k < nq; ++k) {
            const double w = rule_.weights[k] * det * values[c * nq + k];
            for (int j = 0; j < v_tab_.dim; ++j) b[dofs[j]] += w * v_tab_.value(k, j);
        }
    }
    return b;
}

double ShallowWaterModel::integrate(const std::vector<double>& values) const {
    const int nq = rule_.size();
    double total = 0.0;
    for (int c = 0; c < mesh_->num_cells(); ++c) {
        const double det = mesh_->geometry(c).det;
        double cell = 0.0;
        for (int k = 0; k < nq; ++k) cell += rule_.weights[k] * values[c * nq + k];
        total += det * cell;
    }
    return total;
}

// ---- projections and solves ----------------------------------------------

Field ShallowWaterModel::project_velocity(const VectorFunction& u) const { return s_projector_->project(u); }
Field ShallowWaterModel::project_depth(const ScalarFunction& h) const { return v_projector_->project(h); }
Field ShallowWaterModel::project_vorticity(const ScalarFunction& q) const { return e_projector_->project(q); }

State ShallowWaterModel::initial_state(const VectorFunction& u, const ScalarFunction& h) const {
    State s{project_velocity(u), project_depth(h), 0.0};
    check_state(s);
    return s;
}

Eigen::VectorXd ShallowWaterModel::solve_velocity_mass(const Eigen::VectorXd& rhs, SolverReport* report,
                                                       const Eigen::VectorXd* guess) const {
    CgResult r = cg_solve(mass_s_, rhs, cg_, guess);
    if (report) *report = r.report;
    return std::move(r.x);
}

Eigen::VectorXd ShallowWaterModel::solve_depth_mass(const Eigen::VectorXd& rhs) const {
    return depth_solver_->solve(rhs);
}

// ---- diagnostics -----------------------------------------------------------

SparseMatrix ShallowWaterModel::vorticity_mass(const Field& h) const {
    const auto hq = depth_at_points(h);
    check_depth(hq);
    return weighted_vorticity_mass(hq);
}

Field ShallowWaterModel::diagnose_q(const State& state, SolverReport* report, const Eigen::VectorXd* guess) const {
    const auto hq = depth_at_points(state.h);
    check_depth(hq);
    const Eigen::VectorXd rhs = f_load_ - perp_grad_.transpose_multiply(mass_s_ * state.u.coeffs);
    CgResult r = cg_solve(weighted_vorticity_mass(hq), rhs, cg_, guess);
    if (report) *report = r.report;
    return Field(spaces_.vorticity, std::move(r.x));
}

Field ShallowWaterModel::project_flux(const State& state, SolverReport* report, const Eigen::VectorXd* guess) const {
    const auto hq = depth_at_points(state.h);
    auto hu = velocity_at_points(state.u);
    for (std::size_t k = 0; k < hu.size(); ++k) hu[k] *= hq[k];
    return Field(spaces_.velocity, solve_velocity_mass(velocity_load(hu, nullptr), report, guess));
}

Field ShallowWaterModel::weak_curl(const Field& u) const {
    const Eigen::VectorXd rhs = -perp_grad_.transpose_multiply(mass_s_ * u.coeffs);
    return Field(spaces_.vorticity, e_projector_->solve(rhs));
}

Tendency ShallowWaterModel::tendency(const State& state, WarmStart* warm) const {
    const auto hq = depth_at_points(state.h);
    check_depth(hq);
    const auto uq = velocity_at_points(state.u);

    Tendency out;
    SolverReport report;
    auto guess = [warm](Eigen::VectorXd WarmStart::*member, int n) -> const Eigen::VectorXd* {
        if (!warm) return nullptr;
        const Eigen::VectorXd& v = warm->*member;
        return v.size() == n ? &v : nullptr;
    };

    // Potential vorticity.
    const Eigen::VectorXd q_rhs = f_load_ - perp_grad_.transpose_multiply(mass_s_ * state.u.coeffs);
    CgResult qr = cg_solve(weighted_vorticity_mass(hq), q_rhs, cg_,
                           guess(&WarmStart::q, spaces_.vorticity->dim()));
    out.q = Field(spaces_.vorticity, std::move(qr.x));
    out.cg_iterations = qr.report.iterations;

    // Volume flux.
    std::vector<Vec2> hu(uq.size());
    for (std::size_t k = 0; k < hu.size(); ++k) hu[k] = hq[k] * uq[k];
    out.flux = Field(spaces_.velocity, solve_velocity_mass(velocity_load(hu, nullptr), &report,
                                                           guess(&WarmStart::flux, spaces_.velocity->dim())));
    out.cg_iterations = std::max(out.cg_iterations, report.iterations);

    // Momentum: -<w, q* F^perp> + <div w, g h + |u|^2 / 2>.
    const auto fq = velocity_at_points(out.flux);
    auto qq = vorticity_at_points(out.q);
    if (params_.apvm && params_.tau > 0.0) {
        const auto grad_q = vorticity_gradient_at_points(out.q);
        for (std::size_t k = 0; k < qq.size(); ++k) qq[k] -= params_.tau * uq[k].dot(grad_q[k]);
    }
    std::vector<Vec2> vec(uq.size());
    std::vector<double> bernoulli(uq.size());
    for (std::size_t k = 0; k < vec.size(); ++k) {
        vec[k] = -qq[k] * perp(fq[k]);
        bernoulli[k] = params_.g * hq[k] + 0.5 * uq[k].squaredNorm();
    }
    out.du = solve_velocity_mass(velocity_load(vec, &bernoulli), &report,
                                 guess(&WarmStart::du, spaces_.velocity->dim()));
    out.cg_iterations = std::max(out.cg_iterations, report.iterations);

    out.dh = -(div_ * out.flux.coeffs);

    if (warm) {
        warm->q = out.q.coeffs;
        warm->flux = out.flux.coeffs;
        warm->du = out.du;
    }
    return out;
}

// ---- functionals -----------------------------------------------------------

double ShallowWaterModel::energy(const State& state) const {
    const auto hq = depth_at_points(state.h);
    const auto uq = velocity_at_points(state.u);
    std::vector<double> density(hq.size());
    for (std::size_t k = 0; k < hq.size(); ++k) density[k] = 0.5 * hq[k] * (uq[k].squaredNorm() + params_.g * hq[k]);
    return integrate(density);
}

double ShallowWaterModel::enstrophy(const State& state, const Field& q) const {
    const auto hq = depth_at_points(state.h);
    const auto qq = vorticity_at_points(q);
    std::vector<double> density(hq.size());
    for (std::size_t k = 0; k < hq.size(); ++k) density[k] = qq[k] * qq[k] * hq[k];
    return integrate(density);
}

double ShallowWaterModel::total_vorticity(const State& state, const Field& q) const {
    const auto hq = depth_at_points(state.h);
    const auto qq = vorticity_at_points(q);
    std::vector<double> density(hq.size());
    for (std::size_t k = 0; k < hq.size(); ++k) density[k] = qq[k] * hq[k];
    return integrate(density);
}

double ShallowWaterModel::total_mass(const State& state) const { return integrate(depth_at_points(state.h)); }

double ShallowWaterModel::geostrophic_imbalance(const State& state) const {
    const auto hq = depth_at_points(state.h);
    const auto uq = velocity_at_points(state.u);
    std::vector<Vec2> coriolis(uq.size());
    std::vector<double> pressure(uq.size());
    for (std::size_t k = 0; k < uq.size(); ++k) {
        coriolis[k] = f_at_points_[k] * perp(uq[k]);
        pressure[k] = -params_.g * hq[k];
    }
    const Eigen::VectorXd b = velocity_load(coriolis, &pressure);
    if (b.norm() == 0.0) return 0.0;
    const Eigen::VectorXd r = solve_velocity_mass(b);
    return std::sqrt(std::max(0.0, r.dot(mass_s_ * r)));
}

double ShallowWaterModel::energy_rate(const State& state, const Tendency& tend) const {
    const auto hq = depth_at_points(state.h);
    const auto uq = velocity_at_points(state.u);
    const auto duq = velocity_at_points(Field(spaces_.velocity, tend.du));
    const auto dhq = depth_at_points(Field(spaces_.depth, tend.dh));
    std::vector<double> density(hq.size());
    for (std::size_t k = 0; k < hq.size(); ++k) {
        density[k] = hq[k] * uq[k].dot(duq[k]) + dhq[k] * (params_.g * hq[k] + 0.5 * uq[k].squaredNorm());
    }
    return integrate(density);
}

double ShallowWaterModel::enstrophy_rate(const State& state, const Tendency& tend) const {
    (void)state;
    const Eigen::VectorXd cq = perp_grad_ * tend.q.coeffs;
    const auto qq = vorticity_at_points(tend.q);
    const auto dhq = depth_at_points(Field(spaces_.depth, tend.dh));
    std::vector<double> density(qq.size());
    for (std::size_t k = 0; k < qq.size(); ++k) density[k] = qq[k] * qq[k] * dhq[k];
    return -2.0 * cq.dot(mass_s_ * tend.du) - integrate(density);
}

double ShallowWaterModel::bracket(const Field& dfdu, const Field& dfdh, const Field& dgdu, const Field& dgdh,
                                  const Field& q) const {
    const auto fu = velocity_at_points(dfdu);
    const auto gu = velocity_at_points(dgdu);
    const auto div_fu = divergence_at_points(dfdu);
    const auto div_gu = divergence_at_points(dgdu);
    const auto fh = depth_at_points(dfdh);
    const auto gh = depth_at_points(dgdh);
    const auto qq = vorticity_at_points(q);
    std::vector<double> density(fu.size());
    for (std::size_t k = 0; k < fu.size(); ++k) {
        density[k] = -qq[k] * fu[k].dot(perp(gu[k])) + div_fu[k] * gh[k] - fh[k] * div_gu[k];
    }
    return integrate(density);
}

std::pair<Field, Field> ShallowWaterModel::energy_derivatives(const State& state) const {
    const auto hq = depth_at_points(state.h);
    const auto uq = velocity_at_points(state.u);
    std::vector<double> bernoulli(hq.size());
    for (std::size_t k = 0; k < hq.size(); ++k) bernoulli[k] = params_.g * hq[k] + 0.5 * uq[k].squaredNorm();
    return {project_flux(state), Field(spaces_.depth, solve_depth_mass(depth_load(bernoulli)))};
}

std::pair<Field, Field> ShallowWaterModel::enstrophy_derivatives(const Field& q) const {
    auto qq = vorticity_at_points(q);
    for (double& v : qq) v = -v * v;
    return {Field(spaces_.velocity, -2.0 * (perp_grad_ * q.coeffs)),
            Field(spaces_.depth, solve_depth_mass(depth_load(qq)))};
}

}  // namespace swfem
