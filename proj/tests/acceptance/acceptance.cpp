// Acceptance suite: one PASS/FAIL line per criterion, with the measured
// values and the pinned tolerances.
//
//   acceptance [--data DIR] [--only N]... [--expect-fail N]... [--report FILE]
//
// Exits nonzero when a criterion fails that is not listed with --expect-fail.
// An expected failure still prints FAIL, marked "(expected)". With --report
// the same text is also written to FILE.

#include <algorithm>
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "swfem/cli/experiments.hpp"
#include "swfem/fem/quadrature.hpp"

using namespace swfem;

namespace {

const TripleFamily kFamilies[] = {TripleFamily::RT0, TripleFamily::BDM1, TripleFamily::BDFM1, TripleFamily::BDM2};
constexpr double kTwoPi = 2.0 * M_PI;
std::string g_data_dir = SWFEM_TEST_DATA;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "\n    ";
        detail += std::string(ok ? "ok   " : "FAIL ") + what;
    }
    void note(const std::string& what) {
        if (!detail.empty()) detail += "\n    ";
        detail += "info " + what;
    }
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

std::shared_ptr<const Mesh> structured(int n) { return std::make_shared<const Mesh>(structured_mesh(n)); }
std::shared_ptr<const Mesh> msh(const std::string& name) {
    return std::make_shared<const Mesh>(read_msh(g_data_dir + "/" + name));
}

// Smooth periodic state from a few random Fourier amplitudes; h stays in [0.7, 1.3].
struct RandomModes {
    double a[6];
    explicit RandomModes(std::mt19937& rng) {
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (double& x : a) x = d(rng);
    }
    VectorFunction velocity() const {
        const RandomModes m = *this;
        return [m](const Vec2& p) {
            return Vec2(m.a[0] * std::sin(kTwoPi * p.y()) + 0.3 * m.a[1] * std::cos(2 * kTwoPi * p.x()),
                        m.a[2] * std::cos(kTwoPi * p.x()) + 0.3 * m.a[3] * std::sin(kTwoPi * (p.x() + p.y())));
        };
    }
    ScalarFunction depth() const {
        const RandomModes m = *this;
        return [m](const Vec2& p) {
            return 1.0 + 0.2 * m.a[4] * std::cos(kTwoPi * p.x()) + 0.1 * m.a[5] * std::sin(kTwoPi * (p.y() - p.x()));
        };
    }
};

Eigen::VectorXd random_coeffs(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = d(rng);
    return v;
}

// ---- 1. exact sequence -------------------------------------------------------------

Outcome exact_sequence() {
    Outcome o;
    for (const auto& [label, mesh] : {std::pair{"structured n=8", structured(8)}, std::pair{"periodic_8.msh", msh("periodic_8.msh")}}) {
        for (auto family : kFamilies) {
            const ShallowWaterModel model(mesh, family, Params::constant(1.0, 1.0));
            const Eigen::MatrixXd dc = model.div().to_dense() * model.perp_grad().to_dense();
            const double err = dc.lpNorm<Eigen::Infinity>();
            o.require(err <= 1e-12, fmt("%-5s %-15s max|D C| = %.2e (tol 1e-12)", to_string(family).c_str(), label, err));
        }
    }
    return o;
}

// ---- 2. commuting projection ----------------------------------------------------------

Outcome commuting_projection() {
    Outcome o;
    const VectorFunction v = [](const Vec2& p) {
        return Vec2(std::sin(kTwoPi * p.y()) * std::cos(kTwoPi * p.x()), std::sin(kTwoPi * p.x()) * std::cos(2 * kTwoPi * p.y()));
    };
    const ScalarFunction curl = [](const Vec2& p) {
        return kTwoPi * std::cos(kTwoPi * p.x()) * std::cos(2 * kTwoPi * p.y()) -
               kTwoPi * std::cos(kTwoPi * p.y()) * std::cos(kTwoPi * p.x());
    };
    for (auto family : kFamilies) {
        const ShallowWaterModel model(structured(8), family, Params::constant(0.0, 1.0), {1e-14, 4000});
        const Field lhs = model.weak_curl(model.project_velocity(v));
        const Field rhs = model.project_vorticity(curl);
        const double err = (lhs.coeffs - rhs.coeffs).lpNorm<Eigen::Infinity>();
        o.require(err <= 1e-9, fmt("%-5s n=8 max|wcurl(P_S v) - P_E(curl v)| = %.2e (tol 1e-9)", to_string(family).c_str(), err));
    }
    return o;
}

// ---- 3. semi-discrete conservation ------------------------------------------------------

Outcome semi_discrete_conservation() {
    Outcome o;
    std::mt19937 rng(2024);
    for (auto family : kFamilies) {
        const ShallowWaterModel plain(structured(8), family, Params::constant(5.0, 5.0), {1e-14, 4000});
        const ShallowWaterModel apvm(structured(8), family, Params::constant(5.0, 5.0, true, 1e-2), {1e-14, 4000});
        double de = 0, dz = 0, de_apvm = 0, dz_apvm = -INFINITY;
        for (int trial = 0; trial < 10; ++trial) {
            const RandomModes modes(rng);
            const State s = plain.initial_state(modes.velocity(), modes.depth());
            const Tendency t = plain.tendency(s);
            const double e = plain.energy(s), z = plain.enstrophy(s, t.q);
            de = std::max(de, std::abs(plain.energy_rate(s, t)) / e);
            dz = std::max(dz, std::abs(plain.enstrophy_rate(s, t)) / z);
            const Tendency ta = apvm.tendency(s);
            de_apvm = std::max(de_apvm, std::abs(apvm.energy_rate(s, ta)) / e);
            dz_apvm = std::max(dz_apvm, apvm.enstrophy_rate(s, ta) / z);
        }
        const std::string family_name = to_string(family);
        const char* name = family_name.c_str();
        o.require(de <= 1e-9 && dz <= 1e-9,
                  fmt("%-5s plain: max |dE/dt|/E = %.2e, max |dZ/dt|/Z = %.2e (tol 1e-9)", name, de, dz));
        o.require(de_apvm <= 1e-9 && dz_apvm <= 1e-9,
                  fmt("%-5s APVM tau=1e-2: max |dE/dt|/E = %.2e (tol 1e-9), max (dZ/dt)/Z = %.2e (<= 1e-9)", name,
                      de_apvm, dz_apvm));
    }
    return o;
}

// ---- 4. balanced-state convergence --------------------------------------------------------

Outcome balance_convergence() {
    Outcome o;
    for (auto family : kFamilies) {
        Config c;
        c.set("element", to_string(family));
        const ExperimentConfig cfg = resolve_config("balance", c);
        const auto start = std::chrono::steady_clock::now();
        const BalanceResult r = exp_balance(cfg);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double need = (family == TripleFamily::RT0 || family == TripleFamily::BDM1) ? 1.8 : 2.5;
        std::string errors;
        for (const auto& row : r.rows) errors += fmt(" %s: %.2e/%.2e", row.mesh.c_str(), row.err_u, row.err_h);
        o.require(r.slope_u_dx >= need && r.slope_h_dx >= need,
                  fmt("%-5s t=0.25 slopes vs dx: u %.2f, h %.2f (>= %.1f); rel. errors u/h%s", to_string(family).c_str(),
                      r.slope_u_dx, r.slope_h_dx, need, errors.c_str()));
        o.note(fmt("%-5s max-over-time error slopes vs dx: u %.2f, h %.2f; slopes vs 1/sqrt(ndof): u %.2f, h %.2f; %.0f s",
                   to_string(family).c_str(), r.slope_u_max, r.slope_h_max, r.slope_u_dof, r.slope_h_dof, secs));
    }
    return o;
}

// ---- 5. conservation order in dt ------------------------------------------------------------

Outcome conservation_order() {
    Outcome o;
    Config c;
    c.set("element", "bdm1");
    ExperimentConfig cfg = resolve_config("conservation", c);
    const ConservationResult plain = exp_conservation(cfg);
    std::string rows;
    for (const auto& r : plain.rows) rows += fmt(" dt=%g: %.2e/%.2e", r.dt, r.energy_change, r.enstrophy_change);
    o.require(std::abs(plain.enstrophy_slope - 4.0) <= 0.5,
              fmt("BDM1 n=16 enstrophy-change slope %.2f (4.0 +- 0.5)", plain.enstrophy_slope));
    o.require(plain.energy_slope >= 4.0, fmt("BDM1 n=16 energy-change slope %.2f (>= 4.0)", plain.energy_slope));
    o.note("relative changes E/Z:" + rows);

    cfg.apvm = true;
    const ConservationResult apvm = exp_conservation(cfg);
    rows.clear();
    for (const auto& r : apvm.rows) rows += fmt(" dt=%g: %.2e/%.2e", r.dt, r.energy_change, r.enstrophy_change);
    const bool deficit = std::all_of(apvm.rows.begin(), apvm.rows.end(), [](const auto& r) { return r.enstrophy_change < 0; });
    o.require(deficit && std::abs(apvm.enstrophy_slope - 1.0) <= 0.3,
              fmt("BDM1 APVM tau=dt/2 enstrophy-deficit slope %.2f (1.0 +- 0.3)%s", apvm.enstrophy_slope,
                  deficit ? "" : ", but enstrophy did not decrease"));
    o.note("APVM relative changes E/Z:" + rows);
    return o;
}

// ---- 6. mass and vorticity over 500 steps -------------------------------------------------

Outcome mass_and_vorticity() {
    Outcome o;
    const InitialCondition ic = conservation_state(5.0, 5.0);
    for (auto family : kFamilies) {
        for (bool apvm : {false, true}) {
            const ShallowWaterModel model(structured(8), family, Params::constant(5.0, 5.0, apvm, apvm ? 5e-4 : 0.0));
            RunOptions opts;
            opts.dt = 1e-3;
            opts.t_end = 0.5;
            const RunResult r = run(model, model.initial_state(ic.u, ic.h), opts);
            const Sample& first = r.record.samples.front();
            double dm = 0, dv = 0;
            for (const Sample& s : r.record.samples) {
                dm = std::max(dm, std::abs(s.mass - first.mass) / std::abs(first.mass));
                dv = std::max(dv, std::abs(s.vorticity - first.vorticity) / std::abs(first.vorticity));
            }
            o.require(dm <= 1e-12 && dv <= 1e-10 && r.record.samples.back().step == 500,
                      fmt("%-5s%s n=8, %d steps: max rel. mass change %.2e (1e-12), vorticity %.2e (1e-10)",
                          to_string(family).c_str(), apvm ? " APVM " : "      ", r.record.samples.back().step, dm, dv));
        }
    }
    return o;
}

// ---- 7. bracket ----------------------------------------------------------------------

Outcome bracket_properties() {
    Outcome o;
    std::mt19937 rng(77);
    for (auto family : kFamilies) {
        const ShallowWaterModel model(structured(8), family, Params::constant(5.0, 5.0), {1e-14, 4000});
        const auto& sp = model.spaces();
        auto random_field = [&](const SpacePtr& s) { return Field(s, random_coeffs(s->dim(), rng)); };
        double anti = 0;
        for (int trial = 0; trial < 20; ++trial) {
            const Field fu = random_field(sp.velocity), fh = random_field(sp.depth);
            const Field gu = random_field(sp.velocity), gh = random_field(sp.depth);
            const Field q = random_field(sp.vorticity);
            const double fg = model.bracket(fu, fh, gu, gh, q), gf = model.bracket(gu, gh, fu, fh, q);
            anti = std::max(anti, std::abs(fg + gf) / std::max(std::abs(fg), std::abs(gf)));
        }
        const RandomModes modes(rng);
        const State s = model.initial_state(modes.velocity(), modes.depth());
        const Field q = model.diagnose_q(s);
        const auto [dcdu, dcdh] = model.enstrophy_derivatives(q);
        // The opposite sign of dC/dh, for comparison: not a Casimir.
        const Field dcdh_flipped(dcdh.space, -dcdh.coeffs);
        double casimir = 0, flipped = 0;
        for (int trial = 0; trial < 5; ++trial) {
            const Field gu = random_field(sp.velocity), gh = random_field(sp.depth);
            casimir = std::max(casimir, std::abs(model.bracket(dcdu, dcdh, gu, gh, q)));
            flipped = std::max(flipped, std::abs(model.bracket(dcdu, dcdh_flipped, gu, gh, q)));
        }
        o.require(anti <= 1e-12 && casimir <= 1e-10,
                  fmt("%-5s max |{F,G}+{G,F}|/|{F,G}| = %.2e (1e-12) over 20; max |{C,G}| = %.2e (1e-10) over 5",
                      to_string(family).c_str(), anti, casimir));
        o.note(fmt("%-5s with dC/dh = +P_V(q^2) instead of -P_V(q^2): max |{C,G}| = %.2e", to_string(family).c_str(), flipped));
    }
    return o;
}

// ---- 8. vortex pair --------------------------------------------------------------------

Outcome vortex_regression() {
    Outcome o;
    Config c;
    c.set("mesh", "msh=" + g_data_dir + "/periodic_16.msh");
    c.set("sample_every", "1");
    ExperimentConfig cfg = resolve_config("vortex", c);
    const auto start = std::chrono::steady_clock::now();
    const VortexResult r = exp_vortex(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const auto& samples = r.apvm.record.samples;
    const double loss = -r.enstrophy_change_apvm;
    o.require(loss >= 0.01, fmt("APVM relative enstrophy loss by t=%g: %.3e (>= 1e-2)", cfg.t_end, loss));
    o.require(std::abs(r.energy_change_apvm) <= 1e-6,
              fmt("APVM relative energy change: %.2e (<= 1e-6)", r.energy_change_apvm));

    // The plain run conserves enstrophy to timestepping error: halving dt
    // must shrink the change at least as fast as third order.
    ExperimentConfig half = cfg;
    half.dts = {0.5 * cfg.dts.front()};
    half.sample_every = 1000000;
    const ShallowWaterModel model(cfg.meshes.front().load(), cfg.family, Params::constant(cfg.f, cfg.g), cfg.cg);
    const InitialCondition ic = VortexPair::make(cfg.f, cfg.g).initial();
    RunOptions opts;
    opts.dt = half.dts.front();
    opts.t_end = cfg.t_end;
    opts.sample_every = half.sample_every;
    const RunRecord fine = run(model, model.initial_state(ic.u, ic.h), opts).record;
    const double dz_fine = (fine.samples.back().enstrophy - fine.samples.front().enstrophy) / fine.samples.front().enstrophy;
    const double ratio = std::abs(r.enstrophy_change_plain) / std::max(std::abs(dz_fine), 1e-300);
    // Below 1e-11 the change is accumulated rounding and no longer scales with dt.
    const bool at_floor = std::abs(r.enstrophy_change_plain) <= 1e-11;
    o.require(std::abs(r.enstrophy_change_plain) <= 1e-6 && (ratio >= 8.0 || at_floor),
              fmt("plain relative enstrophy change %.2e at dt=%g, %.2e at dt/2 (ratio %.1f >= 8 or |change| <= 1e-11)",
                  r.enstrophy_change_plain, cfg.dts.front(), dz_fine, ratio));

    // Total vorticity G = int q h and mass M are conserved exactly, and by
    // Cauchy-Schwarz Z = int q^2 h >= G^2 / M. No dissipation can remove more
    // than Z0 - G^2/M, which bounds the attainable relative loss.
    const Sample& s0 = samples.front();
    const double z_floor = s0.vorticity * s0.vorticity / s0.mass;
    const double removable = s0.enstrophy - z_floor;
    o.note(fmt("largest attainable relative loss (Z0 - G^2/M)/Z0 = %.3e; APVM removed %.3e of Z0 - G^2/M",
               removable / s0.enstrophy, (s0.enstrophy - samples.back().enstrophy) / removable));
    o.note(fmt("mesh %d cells, dt=%g, %.0f s; Z0 = %.6f", cfg.meshes.front().load()->num_cells(), cfg.dts.front(), secs,
               s0.enstrophy));
    o.note(fmt("imbalance: max |I_apvm - I_plain| = %.2e, variation within a run = %.2e", r.max_imbalance_difference,
               r.imbalance_variation));
    return o;
}

// ---- 9. dense oracles --------------------------------------------------------------------

// Dense global assembly through Field point evaluations of unit basis
// functions; shares only the reference elements and DOF maps with the model.
struct DenseOracle {
    const ShallowWaterModel& model;
    const Mesh& mesh;
    QuadratureRule rule = triangle_quadrature(12);

    explicit DenseOracle(const ShallowWaterModel& m) : model(m), mesh(m.mesh()) {}

    // Visit every quadrature point: callback(cell, ref point, weight * det).
    void each_point(const std::function<void(int, const Vec2&, double)>& fn) const {
        for (int c = 0; c < mesh.num_cells(); ++c)
            for (int k = 0; k < rule.size(); ++k) fn(c, rule.points[k], rule.weights[k] * mesh.geometry(c).det);
    }

    static std::vector<Field> basis(const SpacePtr& s) {
        std::vector<Field> out;
        for (int i = 0; i < s->dim(); ++i) {
            out.emplace_back(s);
            out.back().coeffs[i] = 1.0;
        }
        return out;
    }

    // Local basis indices per cell avoid evaluating every global function everywhere.
    template <class F>
    Eigen::MatrixXd matrix(const SpacePtr& row, const SpacePtr& col, F integrand) const {
        const auto rb = basis(row), cb = basis(col);
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(row->dim(), col->dim());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto rd = row->cell_dofs(c), cd = col->cell_dofs(c);
            for (int k = 0; k < rule.size(); ++k) {
                const Vec2& p = rule.points[k];
                const double w = rule.weights[k] * mesh.geometry(c).det;
                for (int i : std::set<int>(rd.begin(), rd.end()))
                    for (int j : std::set<int>(cd.begin(), cd.end())) m(i, j) += w * integrand(rb[i], cb[j], c, p);
            }
        }
        return m;
    }

    template <class F>
    Eigen::VectorXd vector(const SpacePtr& row, F integrand) const {
        const auto rb = basis(row);
        Eigen::VectorXd v = Eigen::VectorXd::Zero(row->dim());
        for (int c = 0; c < mesh.num_cells(); ++c) {
            const auto rd = row->cell_dofs(c);
            for (int k = 0; k < rule.size(); ++k) {
                const double w = rule.weights[k] * mesh.geometry(c).det;
                for (int i : std::set<int>(rd.begin(), rd.end())) v[i] += w * integrand(rb[i], c, rule.points[k]);
            }
        }
        return v;
    }

    static Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

    Field q(const State& s) const {
        const auto& sp = model.spaces();
        const double f0 = model.params().f(Vec2(0.5, 0.5));
        const Eigen::MatrixXd mh = matrix(sp.vorticity, sp.vorticity, [&](const Field& a, const Field& b, int c, const Vec2& p) {
            return s.h.value(c, p) * a.value(c, p) * b.value(c, p);
        });
        const Eigen::VectorXd rhs = vector(sp.vorticity, [&](const Field& a, int c, const Vec2& p) {
            return f0 * a.value(c, p) - perp(a.gradient(c, p)).dot(s.u.vector_value(c, p));
        });
        return Field(sp.vorticity, mh.ldlt().solve(rhs));
    }

    Eigen::MatrixXd velocity_mass() const {
        const auto& sp = model.spaces();
        return matrix(sp.velocity, sp.velocity, [](const Field& a, const Field& b, int c, const Vec2& p) {
            return a.vector_value(c, p).dot(b.vector_value(c, p));
        });
    }

    Field flux(const State& s) const {
        const auto& sp = model.spaces();
        const Eigen::VectorXd rhs = vector(sp.velocity, [&](const Field& w, int c, const Vec2& p) {
            return s.h.value(c, p) * s.u.vector_value(c, p).dot(w.vector_value(c, p));
        });
        return Field(sp.velocity, velocity_mass().ldlt().solve(rhs));
    }

    std::pair<Eigen::VectorXd, Eigen::VectorXd> tendency(const State& s) const {
        const auto& sp = model.spaces();
        const Params& prm = model.params();
        const Field qf = q(s), F = flux(s);
        auto qstar = [&](int c, const Vec2& p) {
            const double qv = qf.value(c, p);
            return prm.apvm ? qv - prm.tau * s.u.vector_value(c, p).dot(qf.gradient(c, p)) : qv;
        };
        const Eigen::VectorXd du_rhs = vector(sp.velocity, [&](const Field& w, int c, const Vec2& p) {
            const Vec2 u = s.u.vector_value(c, p);
            return -qstar(c, p) * perp(F.vector_value(c, p)).dot(w.vector_value(c, p)) +
                   w.divergence(c, p) * (prm.g * s.h.value(c, p) + 0.5 * u.squaredNorm());
        });
        const Eigen::MatrixXd mv = matrix(sp.depth, sp.depth, [](const Field& a, const Field& b, int c, const Vec2& p) {
            return a.value(c, p) * b.value(c, p);
        });
        const Eigen::VectorXd dh_rhs =
            vector(sp.depth, [&](const Field& phi, int c, const Vec2& p) { return -phi.value(c, p) * F.divergence(c, p); });
        return {velocity_mass().ldlt().solve(du_rhs), mv.ldlt().solve(dh_rhs)};
    }
};

double rel_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).lpNorm<Eigen::Infinity>() / std::max(b.lpNorm<Eigen::Infinity>(), 1e-300);
}

Outcome oracle_equivalence() {
    Outcome o;
    std::mt19937 rng(5);
    for (auto family : kFamilies) {
        for (bool apvm : {false, true}) {
            const ShallowWaterModel model(structured(3), family, Params::constant(5.0, 5.0, apvm, 1e-2), {1e-15, 4000});
            const RandomModes modes(rng);
            State s = model.initial_state(modes.velocity(), modes.depth());
            // Perturb every coefficient so no structure of the projection is assumed.
            s.u.coeffs += 0.05 * random_coeffs(s.u.coeffs.size(), rng);
            s.h.coeffs += 0.01 * random_coeffs(s.h.coeffs.size(), rng);
            const DenseOracle oracle(model);
            const double eq = rel_diff(model.diagnose_q(s).coeffs, oracle.q(s).coeffs);
            const double ef = rel_diff(model.project_flux(s).coeffs, oracle.flux(s).coeffs);
            const Tendency t = model.tendency(s);
            const auto [du, dh] = oracle.tendency(s);
            const double eu = rel_diff(t.du, du), eh = rel_diff(t.dh, dh);
            o.require(std::max({eq, ef, eu, eh}) <= 1e-10,
                      fmt("%-5s%s q %.1e, F %.1e, du %.1e, dh %.1e (max-norm relative, tol 1e-10)",
                          to_string(family).c_str(), apvm ? " APVM" : "     ", eq, ef, eu, eh));
        }
    }
    return o;
}

struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> only, expect_fail;
    std::string report_path;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if ((a == "--only" || a == "--expect-fail") && i + 1 < argc) {
            (a == "--only" ? only : expect_fail).insert(std::atoi(argv[++i]));
        } else if (a == "--data" && i + 1 < argc) {
            g_data_dir = argv[++i];
        } else if (a == "--report" && i + 1 < argc) {
            report_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: %s [--data DIR] [--only N]... [--expect-fail N]... [--report FILE]\n", argv[0]);
            return 2;
        }
    }

    const Criterion criteria[] = {
        {1, "exact sequence D C = 0", exact_sequence},
        {2, "weak curl commutes with L2 projection", commuting_projection},
        {3, "semi-discrete energy and enstrophy conservation", semi_discrete_conservation},
        {4, "balanced-state convergence", balance_convergence},
        {5, "conservation order in dt", conservation_order},
        {6, "mass and total vorticity over 500 steps", mass_and_vorticity},
        {7, "bracket antisymmetry and enstrophy Casimir", bracket_properties},
        {8, "vortex pair with and without APVM", vortex_regression},
        {9, "dense oracle equivalence", oracle_equivalence},
    };

    int failed = 0, unexpected = 0, evaluated = 0;
    std::string report;
    std::size_t printed = 0;
    for (const Criterion& c : criteria) {
        if (!only.empty() && !only.count(c.id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        ++evaluated;
        const bool expected = expect_fail.count(c.id) != 0;
        if (!out.pass) {
            ++failed;
            if (!expected) ++unexpected;
        }
        report += fmt("criterion %d %s%s: %s (%.1f s)\n", c.id, out.pass ? "PASS" : "FAIL",
                      !out.pass && expected ? " (expected)" : "", c.name, secs);
        report += "    " + out.detail + "\n";
        std::fputs(report.c_str() + printed, stdout);
        std::fflush(stdout);
        printed = report.size();
    }
    report += fmt("acceptance: %d of %d criteria passed", evaluated - failed, evaluated);
    if (failed > unexpected) report += fmt(", %d expected failure(s)", failed - unexpected);
    report += "\n";
    std::fputs(report.c_str() + printed, stdout);
    if (!report_path.empty()) {
        if (FILE* f = std::fopen(report_path.c_str(), "w")) {
            std::fputs(report.c_str(), f);
            std::fclose(f);
        } else {
            std::fprintf(stderr, "cannot write %s\n", report_path.c_str());
            return 1;
        }
    }
    return unexpected == 0 ? 0 : 1;
}
