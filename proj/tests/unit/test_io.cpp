#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "doctest.h"
#include "swfem/cli/experiments.hpp"
#include "swfem/io/csv.hpp"
#include "swfem/io/vtk.hpp"

using namespace swfem;

namespace {

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "swfem_test_io";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

// Lines following the first line that starts with `header`.
std::vector<std::string> section(const std::string& text, const std::string& header, int count) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(header, 0) == 0) break;
    std::vector<std::string> out;
    while (static_cast<int>(out.size()) < count && std::getline(in, line)) out.push_back(line);
    return out;
}

}  // namespace

TEST_CASE("run records survive a CSV round trip bit for bit") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    RunRecord rec;
    for (int k = 0; k < 20; ++k) {
        rec.samples.push_back({k, d(rng) * 1e-7, d(rng), std::exp(d(rng) / 20), d(rng) * 1e-300, d(rng) / 3.0,
                               std::nextafter(1.0, 2.0) * d(rng), k * 3});
    }
    rec.samples.push_back({99, 0.1, -0.0, std::numeric_limits<double>::denorm_min(), 1e308, 1.0 / 3.0, 0.0, 0});
    const std::string path = temp_path("round_trip.csv");
    write_csv(to_table(rec), path);
    const RunRecord back = to_run_record(read_csv(path));
    REQUIRE(back.samples.size() == rec.samples.size());
    for (std::size_t k = 0; k < rec.samples.size(); ++k) {
        const Sample &a = rec.samples[k], &b = back.samples[k];
        CHECK(a.step == b.step);
        CHECK(a.time == b.time);
        CHECK(a.energy == b.energy);
        CHECK(a.enstrophy == b.enstrophy);
        CHECK(a.vorticity == b.vorticity);
        CHECK(a.mass == b.mass);
        CHECK(a.imbalance == b.imbalance);
        CHECK(a.cg_iters_max == b.cg_iters_max);
    }
}

TEST_CASE("an empty record gives a header-only file") {
    const std::string path = temp_path("empty.csv");
    write_csv(to_table(RunRecord{}), path);
    CHECK(slurp(path) == "step,time,energy,enstrophy,vorticity,mass,imbalance,cg_iters_max\n");
    CHECK(to_run_record(read_csv(path)).samples.empty());
}

TEST_CASE("malformed CSV input is rejected") {
    const std::string path = temp_path("bad.csv");
    write_file(path, "a,b\n1,2\n3\n");
    CHECK_THROWS_AS(read_csv(path), IoError);
    write_file(path, "a,b\n1,x\n");
    CHECK_THROWS_AS(read_csv(path), IoError);
    write_file(path, "a,b\n1,2\n");
    CHECK_THROWS_AS(to_run_record(read_csv(path)), IoError);
    CHECK_THROWS_AS(read_csv(temp_path("does_not_exist.csv")), IoError);
    CHECK_THROWS_AS(write_csv(CsvTable{{"a"}, {{1.0, 2.0}}}, path), IoError);
}

TEST_CASE("VTK output of a constant DG0 field") {
    const auto mesh = std::make_shared<const Mesh>(structured_mesh(3));
    const CompatibleSpaces spaces = make_triple(mesh, TripleFamily::RT0);
    Field h(spaces.depth);
    h.coeffs.setConstant(2.5);
    Field u(spaces.velocity);
    const std::string path = temp_path("const.vtk");
    write_vtk(path, *mesh, {{"depth", h}, {"velocity", u}});
    const std::string text = slurp(path);
    const int cells = mesh->num_cells();
    CHECK(text.rfind("# vtk DataFile Version 3.0\n", 0) == 0);
    CHECK(text.find("POINTS " + std::to_string(6 * cells) + " double") != std::string::npos);
    CHECK(text.find("CELLS " + std::to_string(4 * cells) + " " + std::to_string(16 * cells)) != std::string::npos);

    const auto point_values = section(text, "SCALARS depth", 1 + 6 * cells);
    for (int k = 1; k <= 6 * cells; ++k) CHECK(point_values[k] == "2.5");
    const auto cell_values = section(text.substr(text.find("CELL_DATA")), "SCALARS depth", 1 + 4 * cells);
    REQUIRE(cell_values.size() == static_cast<std::size_t>(1 + 4 * cells));
    for (int k = 1; k <= 4 * cells; ++k) CHECK(cell_values[k] == "2.5");
    for (const auto& v : section(text, "VECTORS velocity", 6 * cells)) CHECK(v == "0 0 0");

    // Every point lies in the unit square up to one cell width.
    for (const auto& line : section(text, "POINTS", 6 * cells)) {
        std::istringstream in(line);
        double x, y, z;
        in >> x >> y >> z;
        CHECK(x >= -0.5);
        CHECK(x <= 1.5);
        CHECK(z == 0.0);
    }
}

TEST_CASE("VTK rejects fields from another mesh and unwritable paths") {
    const auto a = std::make_shared<const Mesh>(structured_mesh(3));
    const auto b = std::make_shared<const Mesh>(structured_mesh(3));
    const Field h(make_triple(b, TripleFamily::RT0).depth);
    CHECK_THROWS_AS(write_vtk(temp_path("x.vtk"), *a, {{"h", h}}), IoError);
    CHECK_THROWS_AS(write_vtk("/nonexistent_dir/x.vtk", *b, {{"h", h}}), IoError);
}

TEST_CASE("config files parse sections, comments and typed values") {
    const Config c = Config::parse(
        "# comment\n"
        "element = bdm2\n"
        "  dt=1e-3 \n"
        "; another comment\n"
        "apvm = yes\n"
        "[cg]\n"
        "tolerance = 1e-10\n"
        "iterations = 40\n");
    CHECK(c.get("element") == "bdm2");
    CHECK(c.get_double("dt") == 1e-3);
    CHECK(c.get_bool("apvm") == true);
    CHECK(c.get_double("cg.tolerance") == 1e-10);
    CHECK(c.get_int("cg.iterations") == 40);
    CHECK_FALSE(c.get("missing").has_value());
    CHECK_FALSE(c.has("tolerance"));
}

TEST_CASE("config errors name the offending line or key") {
    auto message = [](const std::string& text) {
        try {
            Config::parse(text);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("a = 1\na = 2\n").find("line 2") != std::string::npos);
    CHECK(message("a = 1\nno equals sign\n").find("line 2") != std::string::npos);
    CHECK(message("[open\n").find("line 1") != std::string::npos);
    CHECK(message("= 3\n").find("line 1") != std::string::npos);

    Config c;
    c.set("x", "1.5.2");
    c.set("n", "3.5");
    c.set("b", "maybe");
    CHECK_THROWS_AS(c.get_double("x"), ConfigError);
    CHECK_THROWS_AS(c.get_int("n"), ConfigError);
    CHECK_THROWS_AS(c.get_bool("b"), ConfigError);
    CHECK_THROWS_AS(Config::load(temp_path("missing.ini")), IoError);
}

TEST_CASE("mesh specs parse structured sizes and mesh files") {
    CHECK(MeshSpec::parse("n=16").n == 16);
    CHECK(MeshSpec::parse("msh=a/b.msh").msh == "a/b.msh");
    CHECK(MeshSpec::parse("n=7").str() == "n=7");
    CHECK_THROWS_AS(MeshSpec::parse("n=2"), ConfigError);
    CHECK_THROWS_AS(MeshSpec::parse("n=abc"), ConfigError);
    CHECK_THROWS_AS(MeshSpec::parse("16"), ConfigError);
    CHECK_THROWS_AS(MeshSpec::parse("msh="), ConfigError);
}

TEST_CASE("experiment configs take defaults, overrides and round trip") {
    const ExperimentConfig balance = resolve_config("balance", Config{});
    CHECK(balance.meshes.size() == 3);
    CHECK(balance.f == 10.0);
    CHECK(balance.dts == std::vector<double>{5e-4});
    const ExperimentConfig cons = resolve_config("conservation", Config{});
    CHECK(cons.dts.size() == 4);
    CHECK(cons.tau_for(1e-3) == 5e-4);

    Config c = Config::parse("element = rt0\nmesh = n=5, n=6\ndt = 1e-3,2e-3\ntau = 0.01\napvm = true\n");
    const ExperimentConfig over = resolve_config("conservation", c);
    CHECK(over.family == TripleFamily::RT0);
    CHECK(over.meshes.size() == 2);
    CHECK(over.meshes[1].n == 6);
    CHECK(over.dts == std::vector<double>{1e-3, 2e-3});
    CHECK(over.tau_for(1e-3) == 0.01);

    const ExperimentConfig again = resolve_config("run", over.to_config());
    CHECK(again.experiment == "conservation");
    CHECK(again.to_config().values() == over.to_config().values());

    CHECK_THROWS_AS(resolve_config("nonsense", Config{}), ConfigError);
    CHECK_THROWS_AS(resolve_config("run", Config::parse("colour = red\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config("run", Config::parse("element = p7\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config("run", Config::parse("dt = -1\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config("run", Config::parse("init = storm\n")), ConfigError);
    CHECK_THROWS_AS(resolve_config("run", Config::parse("mesh = msh=/no/such/file.msh\n")), ConfigError);
}

TEST_CASE("the vortex pair is scaled to the requested peak speed and balanced") {
    const VortexPair v = VortexPair::make(5.0, 5.0);
    double peak = 0.0;
    for (int i = 0; i < 200; ++i)
        for (int j = 0; j < 200; ++j) peak = std::max(peak, v.velocity(Vec2((i + 0.25) / 200, (j + 0.5) / 200)).norm());
    CHECK(peak == doctest::Approx(0.05).epsilon(0.01));
    CHECK(peak <= 0.05 * (1 + 1e-9) + 1e-4);

    // u = perp-grad psi, checked by central differences; psi is periodic.
    const double e = 1e-5;
    for (const Vec2 x : {Vec2(0.41, 0.52), Vec2(0.55, 0.47), Vec2(0.02, 0.97)}) {
        const Vec2 u = v.velocity(x);
        CHECK(u.x() == doctest::Approx(-(v.psi(x + Vec2(0, e)) - v.psi(x - Vec2(0, e))) / (2 * e)).epsilon(1e-6));
        CHECK(u.y() == doctest::Approx((v.psi(x + Vec2(e, 0)) - v.psi(x - Vec2(e, 0))) / (2 * e)).epsilon(1e-6));
    }
    CHECK(v.psi(Vec2(0.0, 0.3)) == doctest::Approx(v.psi(Vec2(1.0, 0.3))).epsilon(1e-6));
    const InitialCondition ic = v.initial();
    CHECK(ic.h(Vec2(0.3, 0.3)) == doctest::Approx(1.0 + v.psi(Vec2(0.3, 0.3))));
}

TEST_CASE("loglog slope recovers a power law") {
    CHECK(loglog_slope({1, 2, 4}, {3, 12, 48}) == doctest::Approx(2.0));
    CHECK(loglog_slope({0.1, 0.05}, {1e-3, 1.25e-4}) == doctest::Approx(3.0));
    CHECK(loglog_slope({1}, {1}) == 0.0);
}
