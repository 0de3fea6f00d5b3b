#include "swfem/cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "swfem/error.hpp"
#include "swfem/fem/assembly.hpp"
#include "swfem/io/csv.hpp"
#include "swfem/io/vtk.hpp"

namespace swfem {

namespace {

constexpr double kPi = M_PI;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double parse_number(const std::string& key, const std::string& text) {
    Config c;
    c.set(key, text);
    return *c.get_double(key);
}

std::string format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format(v[k]);
    return s;
}

// L2 norm of a coefficient vector under a mass matrix.
double mass_norm(const SparseMatrix& m, const Eigen::VectorXd& x) { return std::sqrt(std::max(0.0, x.dot(m * x))); }

std::shared_ptr<const Mesh> first_mesh(const ExperimentConfig& cfg) {
    if (cfg.meshes.empty()) throw ConfigError("no mesh given");
    return cfg.meshes.front().load();
}

Params params_for(const ExperimentConfig& cfg, double dt) {
    return Params::constant(cfg.f, cfg.g, cfg.apvm, cfg.apvm ? cfg.tau_for(dt) : 0.0);
}

RunOptions run_options(double dt, const ExperimentConfig& cfg) {
    RunOptions o;
    o.dt = dt;
    o.t_end = cfg.t_end;
    o.sample_every = cfg.sample_every;
    return o;
}

void check_dts(const ExperimentConfig& cfg) {
    if (cfg.dts.empty()) throw ConfigError("no time step given");
    for (double dt : cfg.dts)
        if (!(dt > 0.0)) throw ConfigError("dt must be positive");
}

}  // namespace

// ---- configuration -------------------------------------------------------------

MeshSpec MeshSpec::parse(const std::string& text) {
    MeshSpec m;
    if (text.rfind("n=", 0) == 0) {
        Config c;
        c.set("mesh", text.substr(2));
        m.n = *c.get_int("mesh");
        if (m.n < 3) throw ConfigError("mesh: structured meshes need n >= 3");
    } else if (text.rfind("msh=", 0) == 0 && text.size() > 4) {
        m.msh = text.substr(4);
    } else {
        throw ConfigError("mesh: expected n=<int> or msh=<path>, got '" + text + "'");
    }
    return m;
}

std::shared_ptr<const Mesh> MeshSpec::load() const {
    return std::make_shared<const Mesh>(msh.empty() ? structured_mesh(n) : read_msh(msh));
}

std::string MeshSpec::str() const { return msh.empty() ? "n=" + std::to_string(n) : "msh=" + msh; }

Config ExperimentConfig::to_config() const {
    Config c;
    c.set("experiment", experiment);
    c.set("element", to_string(family));
    std::string meshes_text;
    for (std::size_t k = 0; k < meshes.size(); ++k) meshes_text += (k ? "," : "") + meshes[k].str();
    c.set("mesh", meshes_text);
    c.set("f", format(f));
    c.set("g", format(g));
    c.set("dt", join(dts));
    c.set("t_end", format(t_end));
    c.set("apvm", apvm ? "true" : "false");
    if (tau) c.set("tau", format(*tau));
    c.set("sample_every", std::to_string(sample_every));
    c.set("out", out_dir);
    c.set("init", init);
    c.set("snapshots", join(snapshot_times));
    c.set("cg_tolerance", format(cg.tolerance));
    c.set("cg_max_iterations", std::to_string(cg.max_iterations));
    c.set("vtk", write_vtk ? "true" : "false");
    return c;
}

ExperimentConfig resolve_config(const std::string& experiment, const Config& config) {
    static const std::set<std::string> known{"experiment", "element", "mesh", "f", "g", "dt", "t_end", "apvm",
                                             "tau", "sample_every", "out", "init", "snapshots", "cg_tolerance",
                                             "cg_max_iterations", "vtk"};
    for (const auto& [key, value] : config.values())
        if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");

    ExperimentConfig cfg;
    cfg.experiment = config.get("experiment").value_or(experiment);
    if (cfg.experiment == "balance") {
        cfg.meshes = {MeshSpec{8, ""}, MeshSpec{16, ""}, MeshSpec{32, ""}};
        cfg.f = cfg.g = 10.0;
        cfg.dts = {5e-4};
        cfg.t_end = 0.25;
        cfg.sample_every = 100;
    } else if (cfg.experiment == "conservation") {
        cfg.meshes = {MeshSpec{16, ""}};
        cfg.f = cfg.g = 5.0;
        cfg.dts = {2e-3, 1e-3, 5e-4, 2.5e-4};
        cfg.t_end = 0.25;
        cfg.sample_every = 1000000;
    } else if (cfg.experiment == "vortex") {
        cfg.meshes = {MeshSpec{19, ""}};
        cfg.f = cfg.g = 5.0;
        cfg.dts = {4e-3};
        cfg.t_end = 8.0;
        cfg.sample_every = 25;
        cfg.snapshot_times = {0.0, 2.0, 4.0, 6.0, 8.0};
    } else if (cfg.experiment == "run") {
        cfg.meshes = {MeshSpec{16, ""}};
        cfg.f = cfg.g = 5.0;
        cfg.dts = {1e-3};
        cfg.t_end = 0.1;
        cfg.sample_every = 10;
    } else {
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    }
    cfg.cg = CgOptions{};

    if (auto v = config.get("element")) {
        try {
            cfg.family = parse_triple_family(*v);
        } catch (const Error& e) {
            throw ConfigError(std::string("element: ") + e.what());
        }
    }
    if (auto v = config.get("mesh")) {
        cfg.meshes.clear();
        for (const auto& item : split_list(*v)) cfg.meshes.push_back(MeshSpec::parse(item));
        if (cfg.meshes.empty()) throw ConfigError("mesh: empty list");
    }
    if (auto v = config.get_double("f")) cfg.f = *v;
    if (auto v = config.get_double("g")) cfg.g = *v;
    if (auto v = config.get("dt")) {
        cfg.dts.clear();
        for (const auto& item : split_list(*v)) cfg.dts.push_back(parse_number("dt", item));
    }
    if (auto v = config.get_double("t_end")) cfg.t_end = *v;
    if (auto v = config.get_bool("apvm")) cfg.apvm = *v;
    if (auto v = config.get_double("tau")) cfg.tau = *v;
    if (auto v = config.get_int("sample_every")) cfg.sample_every = *v;
    if (auto v = config.get("out")) cfg.out_dir = *v;
    if (auto v = config.get("init")) cfg.init = *v;
    if (auto v = config.get("snapshots")) {
        cfg.snapshot_times.clear();
        for (const auto& item : split_list(*v)) cfg.snapshot_times.push_back(parse_number("snapshots", item));
    }
    if (auto v = config.get_double("cg_tolerance")) cfg.cg.tolerance = *v;
    if (auto v = config.get_int("cg_max_iterations")) cfg.cg.max_iterations = *v;
    if (auto v = config.get_bool("vtk")) cfg.write_vtk = *v;

    check_dts(cfg);
    if (!(cfg.g > 0.0)) throw ConfigError("g must be positive");
    if (!(cfg.t_end >= 0.0)) throw ConfigError("t_end must be non-negative");
    if (cfg.tau && !(*cfg.tau >= 0.0)) throw ConfigError("tau must be non-negative");
    if (cfg.sample_every < 1) throw ConfigError("sample_every must be at least 1");
    if (!(cfg.cg.tolerance > 0.0)) throw ConfigError("cg_tolerance must be positive");
    static const std::set<std::string> inits{"balance", "conservation", "vortex", "rest"};
    if (!inits.count(cfg.init)) throw ConfigError("init: unknown initial condition '" + cfg.init + "'");
    for (const auto& m : cfg.meshes)
        if (!m.msh.empty() && !std::filesystem::exists(m.msh)) throw ConfigError("mesh file not found: " + m.msh);
    return cfg;
}

// ---- initial conditions -----------------------------------------------------------

InitialCondition balanced_jet(double f, double g) {
    return {[](const Vec2& p) { return Vec2(std::sin(4 * kPi * p.y()), 0.0); },
            [f, g](const Vec2& p) { return 10.0 + (f / g) * std::cos(4 * kPi * p.y()) / (4 * kPi); }};
}

InitialCondition conservation_state(double f, double g) {
    return {[](const Vec2& p) { return Vec2(0.0, std::sin(2 * kPi * p.x())); },
            [f, g](const Vec2& p) { return 1.0 + (f / g) * std::sin(4 * kPi * p.y()) / (4 * kPi); }};
}

namespace {

const Vec2 kCentres[2] = {Vec2(0.4, 0.5), Vec2(0.6, 0.5)};

// Unit-amplitude streamfunction gradient: sum over centres and periodic
// copies of grad exp(-r^2 / (2 sigma^2)).
Vec2 unit_psi_gradient(const Vec2& x, double sigma) {
    Vec2 grad = Vec2::Zero();
    for (const Vec2& c : kCentres)
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy) {
                const Vec2 d = x - c - Vec2(sx, sy);
                grad += -d / (sigma * sigma) * std::exp(-d.squaredNorm() / (2 * sigma * sigma));
            }
    return grad;
}

}  // namespace

VortexPair VortexPair::make(double f, double g, double sigma, double max_speed) {
    VortexPair v;
    v.sigma = sigma;
    v.max_speed = max_speed;
    v.f = f;
    v.g = g;
    double peak = 0.0;
    constexpr int kSamples = 400;
    for (int i = 0; i < kSamples; ++i)
        for (int j = 0; j < kSamples; ++j) {
            const Vec2 x((i + 0.5) / kSamples, (j + 0.5) / kSamples);
            peak = std::max(peak, unit_psi_gradient(x, sigma).norm());
        }
    v.amplitude = max_speed / peak;
    return v;
}

double VortexPair::psi(const Vec2& x) const {
    double s = 0.0;
    for (const Vec2& c : kCentres)
        for (int sx = -1; sx <= 1; ++sx)
            for (int sy = -1; sy <= 1; ++sy) s += std::exp(-(x - c - Vec2(sx, sy)).squaredNorm() / (2 * sigma * sigma));
    return amplitude * s;
}

Vec2 VortexPair::velocity(const Vec2& x) const {
    const Vec2 grad = amplitude * unit_psi_gradient(x, sigma);
    return {-grad.y(), grad.x()};
}

InitialCondition VortexPair::initial() const {
    const VortexPair v = *this;
    return {[v](const Vec2& x) { return v.velocity(x); }, [v](const Vec2& x) { return 1.0 + (v.f / v.g) * v.psi(x); }};
}

// ---- experiments -----------------------------------------------------------------

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double lx = std::log(x[k]), ly = std::log(y[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double denom = n * sxx - sx * sx;
    return denom == 0.0 ? 0.0 : (n * sxy - sx * sy) / denom;
}

BalanceResult exp_balance(const ExperimentConfig& cfg) {
    check_dts(cfg);
    const double dt = cfg.dts.front();
    const InitialCondition ic = balanced_jet(cfg.f, cfg.g);
    BalanceResult result;
    for (const MeshSpec& spec : cfg.meshes) {
        const auto mesh = spec.load();
        const ShallowWaterModel model(mesh, cfg.family, params_for(cfg, dt), cfg.cg);
        const State initial = model.initial_state(ic.u, ic.h);
        const double norm_u = mass_norm(model.velocity_mass(), initial.u.coeffs);
        const double norm_h = mass_norm(model.depth_mass(), initial.h.coeffs);
        BalanceRow row;
        RunOptions opts = run_options(dt, cfg);
        opts.on_step = [&](const State& s, int) {
            row.max_err_u = std::max(row.max_err_u, mass_norm(model.velocity_mass(), s.u.coeffs - initial.u.coeffs) / norm_u);
            row.max_err_h = std::max(row.max_err_h, mass_norm(model.depth_mass(), s.h.coeffs - initial.h.coeffs) / norm_h);
        };
        const RunResult run_result = run(model, initial, opts);
        const State& fin = run_result.final_state;
        row.mesh = spec.str();
        row.cells = mesh->num_cells();
        row.dx = mesh->mesh_spacing();
        row.ndof = model.spaces().velocity->dim() + model.spaces().depth->dim();
        row.err_u = mass_norm(model.velocity_mass(), fin.u.coeffs - initial.u.coeffs) / norm_u;
        row.err_h = mass_norm(model.depth_mass(), fin.h.coeffs - initial.h.coeffs) / norm_h;
        row.steps = run_result.record.samples.back().step;
        result.rows.push_back(row);
    }
    std::vector<double> dx, inv_sqrt_dof, eu, eh, mu, mh;
    for (const auto& r : result.rows) {
        dx.push_back(r.dx);
        inv_sqrt_dof.push_back(1.0 / std::sqrt(double(r.ndof)));
        eu.push_back(r.err_u);
        eh.push_back(r.err_h);
        mu.push_back(r.max_err_u);
        mh.push_back(r.max_err_h);
    }
    auto positive = [](const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [](double e) { return e > 0; }); };
    if (positive(mu) && positive(mh)) {
        result.slope_u_max = loglog_slope(dx, mu);
        result.slope_h_max = loglog_slope(dx, mh);
    }
    if (positive(eu) && positive(eh)) {
        result.slope_u_dx = loglog_slope(dx, eu);
        result.slope_h_dx = loglog_slope(dx, eh);
        result.slope_u_dof = loglog_slope(inv_sqrt_dof, eu);
        result.slope_h_dof = loglog_slope(inv_sqrt_dof, eh);
    }
    return result;
}

ConservationResult exp_conservation(const ExperimentConfig& cfg) {
    check_dts(cfg);
    const auto mesh = first_mesh(cfg);
    const InitialCondition ic = conservation_state(cfg.f, cfg.g);
    ConservationResult result;
    for (double dt : cfg.dts) {
        const ShallowWaterModel model(mesh, cfg.family, params_for(cfg, dt), cfg.cg);
        const State initial = model.initial_state(ic.u, ic.h);
        const RunResult r = run(model, initial, run_options(dt, cfg));
        const Sample& first = r.record.samples.front();
        const Sample& last = r.record.samples.back();
        result.rows.push_back({dt, last.step, (last.energy - first.energy) / first.energy,
                               (last.enstrophy - first.enstrophy) / first.enstrophy,
                               model.params().tau});
    }
    std::vector<double> dts, de, dz;
    for (const auto& r : result.rows) {
        dts.push_back(r.dt);
        de.push_back(std::abs(r.energy_change));
        dz.push_back(std::abs(r.enstrophy_change));
    }
    if (std::all_of(de.begin(), de.end(), [](double v) { return v > 0; })) result.energy_slope = loglog_slope(dts, de);
    if (std::all_of(dz.begin(), dz.end(), [](double v) { return v > 0; })) result.enstrophy_slope = loglog_slope(dts, dz);
    return result;
}

VortexResult exp_vortex(const ExperimentConfig& cfg, const std::string& out_dir) {
    check_dts(cfg);
    const double dt = cfg.dts.front();
    const auto mesh = first_mesh(cfg);
    const InitialCondition ic = VortexPair::make(cfg.f, cfg.g).initial();
    VortexResult result;

    for (bool apvm : {false, true}) {
        const Params params = Params::constant(cfg.f, cfg.g, apvm, apvm ? cfg.tau_for(dt) : 0.0);
        const ShallowWaterModel model(mesh, cfg.family, params, cfg.cg);
        const State initial = model.initial_state(ic.u, ic.h);
        const std::string tag = apvm ? "apvm" : "plain";

        std::vector<double> pending = cfg.snapshot_times;
        std::sort(pending.begin(), pending.end());
        auto snapshot = [&](const State& s) {
            while (!pending.empty() && pending.front() <= s.t + 0.5 * dt) {
                if (!out_dir.empty() && cfg.write_vtk) {
                    char name[64];
                    std::snprintf(name, sizeof name, "/vortex_%s_t%06.2f.vtk", tag.c_str(), pending.front());
                    write_vtk(out_dir + name, *mesh,
                              {{"pv", model.diagnose_q(s)}, {"velocity", s.u}, {"depth", s.h}},
                              "vortex " + tag + " t=" + format(s.t));
                }
                pending.erase(pending.begin());
            }
        };
        snapshot(initial);
        RunOptions opts = run_options(dt, cfg);
        opts.on_step = [&](const State& s, int) { snapshot(s); };
        RunResult r = run(model, initial, opts);
        (apvm ? result.apvm : result.plain) = {std::move(r.record), std::move(r.final_state)};
    }

    auto rel_change = [](const std::vector<Sample>& s, double Sample::*field) {
        return (s.back().*field - s.front().*field) / s.front().*field;
    };
    const auto& sp = result.plain.record.samples;
    const auto& sa = result.apvm.record.samples;
    result.energy_change_plain = rel_change(sp, &Sample::energy);
    result.energy_change_apvm = rel_change(sa, &Sample::energy);
    result.enstrophy_change_plain = rel_change(sp, &Sample::enstrophy);
    result.enstrophy_change_apvm = rel_change(sa, &Sample::enstrophy);
    for (std::size_t k = 1; k < sa.size(); ++k) {
        if (sa[k - 1].time < 1.0) continue;
        result.apvm_max_enstrophy_increase =
            std::max(result.apvm_max_enstrophy_increase, (sa[k].enstrophy - sa[k - 1].enstrophy) / sa.front().enstrophy);
    }
    const std::size_t common = std::min(sp.size(), sa.size());
    double lo_p = INFINITY, hi_p = -INFINITY, lo_a = INFINITY, hi_a = -INFINITY;
    for (std::size_t k = 0; k < common; ++k) {
        result.max_energy_difference =
            std::max(result.max_energy_difference, std::abs(sa[k].energy - sp[k].energy) / sp.front().energy);
        result.max_imbalance_difference =
            std::max(result.max_imbalance_difference, std::abs(sa[k].imbalance - sp[k].imbalance));
        lo_p = std::min(lo_p, sp[k].imbalance);
        hi_p = std::max(hi_p, sp[k].imbalance);
        lo_a = std::min(lo_a, sa[k].imbalance);
        hi_a = std::max(hi_a, sa[k].imbalance);
    }
    result.imbalance_variation = std::min(hi_p - lo_p, hi_a - lo_a);
    return result;
}

// ---- driver ----------------------------------------------------------------------

namespace {

nlohmann::json manifest(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["experiment"] = cfg.experiment;
    j["element"] = to_string(cfg.family);
    const Config resolved = cfg.to_config();
    j["config"] = resolved.values();
    j["solver"] = {{"cg_tolerance", cfg.cg.tolerance}, {"cg_max_iterations", cfg.cg.max_iterations},
                   {"nonlinear_quadrature_degree", nonlinear_quadrature_degree(cfg.family)}};
    nlohmann::json meshes = nlohmann::json::array();
    for (const auto& spec : cfg.meshes) {
        const auto m = spec.load();
        meshes.push_back({{"spec", spec.str()},
                          {"vertices", m->num_vertices()},
                          {"edges", m->num_edges()},
                          {"cells", m->num_cells()}});
    }
    j["meshes"] = meshes;
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

State initial_for(const ExperimentConfig& cfg, const ShallowWaterModel& model) {
    InitialCondition ic;
    if (cfg.init == "balance") {
        ic = balanced_jet(cfg.f, cfg.g);
    } else if (cfg.init == "conservation") {
        ic = conservation_state(cfg.f, cfg.g);
    } else if (cfg.init == "vortex") {
        ic = VortexPair::make(cfg.f, cfg.g).initial();
    } else {
        ic = {[](const Vec2&) { return Vec2(0.0, 0.0); }, [](const Vec2&) { return 1.0; }};
    }
    return model.initial_state(ic.u, ic.h);
}

}  // namespace

std::string run_experiment(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string dir = cfg.out_dir;
    std::ostringstream summary;
    summary.precision(4);

    nlohmann::json j = manifest(cfg);
    const Config resolved = cfg.to_config();
    std::string ini;
    for (const auto& [k, v] : resolved.values()) ini += k + " = " + v + "\n";
    write_text(dir + "/config.ini", ini);

    if (cfg.experiment == "balance") {
        const BalanceResult r = exp_balance(cfg);
        CsvTable t{{"cells", "dx", "ndof", "err_u", "err_h", "max_err_u", "max_err_h", "steps"}, {}};
        for (const auto& row : r.rows) {
            t.rows.push_back({double(row.cells), row.dx, double(row.ndof), row.err_u, row.err_h, row.max_err_u,
                              row.max_err_h, double(row.steps)});
        }
        write_csv(t, dir + "/balance.csv");
        j["results"] = {{"slope_u_dx", r.slope_u_dx}, {"slope_h_dx", r.slope_h_dx},
                        {"slope_u_dof", r.slope_u_dof}, {"slope_h_dof", r.slope_h_dof},
                        {"slope_u_max", r.slope_u_max}, {"slope_h_max", r.slope_h_max}};
        summary << "balance " << to_string(cfg.family) << '\n';
        for (const auto& row : r.rows) {
            summary << "  " << row.mesh << " cells=" << row.cells << " err_u=" << row.err_u << " err_h=" << row.err_h << '\n';
        }
        summary << "  slopes vs dx: u " << r.slope_u_dx << ", h " << r.slope_h_dx << "; vs 1/sqrt(ndof): u "
                << r.slope_u_dof << ", h " << r.slope_h_dof << "; max over time vs dx: u " << r.slope_u_max << ", h "
                << r.slope_h_max << '\n';
    } else if (cfg.experiment == "conservation") {
        const ConservationResult r = exp_conservation(cfg);
        CsvTable t{{"dt", "steps", "energy_change", "enstrophy_change", "tau"}, {}};
        for (const auto& row : r.rows) t.rows.push_back({row.dt, double(row.steps), row.energy_change, row.enstrophy_change, row.tau});
        write_csv(t, dir + "/conservation.csv");
        j["results"] = {{"energy_slope", r.energy_slope}, {"enstrophy_slope", r.enstrophy_slope}};
        summary << "conservation " << to_string(cfg.family) << (cfg.apvm ? " apvm" : "") << '\n';
        for (const auto& row : r.rows) {
            summary << "  dt=" << row.dt << " dE/E=" << row.energy_change << " dZ/Z=" << row.enstrophy_change << '\n';
        }
        summary << "  slopes: energy " << r.energy_slope << ", enstrophy " << r.enstrophy_slope << '\n';
    } else if (cfg.experiment == "vortex") {
        const VortexResult r = exp_vortex(cfg, dir);
        write_csv(to_table(r.plain.record), dir + "/vortex_plain.csv");
        write_csv(to_table(r.apvm.record), dir + "/vortex_apvm.csv");
        j["results"] = {{"energy_change_plain", r.energy_change_plain},
                        {"energy_change_apvm", r.energy_change_apvm},
                        {"enstrophy_change_plain", r.enstrophy_change_plain},
                        {"enstrophy_change_apvm", r.enstrophy_change_apvm},
                        {"apvm_max_enstrophy_increase", r.apvm_max_enstrophy_increase},
                        {"max_energy_difference", r.max_energy_difference},
                        {"max_imbalance_difference", r.max_imbalance_difference},
                        {"imbalance_variation", r.imbalance_variation}};
        summary << "vortex " << to_string(cfg.family) << '\n'
                << "  plain: dE/E=" << r.energy_change_plain << " dZ/Z=" << r.enstrophy_change_plain << '\n'
                << "  apvm:  dE/E=" << r.energy_change_apvm << " dZ/Z=" << r.enstrophy_change_apvm << '\n'
                << "  imbalance: max difference " << r.max_imbalance_difference << ", variation "
                << r.imbalance_variation << '\n';
    } else {
        const double dt = cfg.dts.front();
        const auto mesh = first_mesh(cfg);
        const ShallowWaterModel model(mesh, cfg.family, params_for(cfg, dt), cfg.cg);
        const State initial = initial_for(cfg, model);
        const RunResult r = run(model, initial, run_options(dt, cfg));
        write_csv(to_table(r.record), dir + "/run.csv");
        if (cfg.write_vtk) {
            write_vtk(dir + "/initial.vtk", *mesh, {{"pv", model.diagnose_q(initial)}, {"velocity", initial.u}, {"depth", initial.h}});
            write_vtk(dir + "/final.vtk", *mesh,
                      {{"pv", model.diagnose_q(r.final_state)}, {"velocity", r.final_state.u}, {"depth", r.final_state.h}});
        }
        const Sample& a = r.record.samples.front();
        const Sample& b = r.record.samples.back();
        j["results"] = {{"energy_change", (b.energy - a.energy) / a.energy},
                        {"enstrophy_change", (b.enstrophy - a.enstrophy) / a.enstrophy},
                        {"steps", b.step}};
        summary << "run " << to_string(cfg.family) << " init=" << cfg.init << " steps=" << b.step
                << " dE/E=" << (b.energy - a.energy) / a.energy << " dZ/Z=" << (b.enstrophy - a.enstrophy) / a.enstrophy
                << '\n';
    }
    write_text(dir + "/manifest.json", j.dump(2) + "\n");
    return summary.str();
}

}  // namespace swfem
