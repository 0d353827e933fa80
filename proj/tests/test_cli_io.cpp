#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wavekin/config.hpp"
#include "wavekin/io.hpp"
#include "wavekin/studies.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace wavekin;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir(const std::string& stem) {
        path = fs::temp_directory_path() / ("wavekin_test_" + stem);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

RunConfig tiny_run_config() {
    RunConfig c = preset("two-body");
    c.grid_n = 48;
    c.box_halfwidth = 4.5;
    c.dt = 0.0625;
    c.T = 0.5;
    c.diagnostics_stride = 2;
    return c;
}

} // namespace

TEST_CASE("ensemble round trips: CSV and binary twin") {
    TempDir td("ens");
    ParticleEnsemble e;
    e.add({0.1, -0.2, 0.3}, {0.5, 0.0, -0.25}, 0.25);
    e.add({-1.0 / 3.0, 2.0, 0.0}, {1e-17, -3.5, 0.125}, 0.75);
    write_ensemble_csv(td.path / "e.csv", e);
    const auto back = read_ensemble_csv(td.path / "e.csv");
    REQUIRE(back.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back.q[i].x == e.q[i].x);
        CHECK(back.p[i].z == e.p[i].z);
        CHECK(back.w[i] == e.w[i]);
    }
    write_ensemble_binary((td.path / "e").string(), e);
    const auto back2 = read_ensemble_binary((td.path / "e").string());
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(back2.q[i].y == e.q[i].y);
        CHECK(back2.p[i].x == e.p[i].x);
    }
}

TEST_CASE("field snapshot round trip preserves bits and metadata") {
    TempDir td("field");
    WaveField f(16, 2.0);
    f.time = 0.75;
    f.analytic_tail = true;
    f.tail_mass = 1.0;
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
        f.psi.data()[i] = std::sin(0.1 * static_cast<double>(i));
        f.pi.data()[i] = std::cos(0.2 * static_cast<double>(i));
    }
    write_field_binary((td.path / "f").string(), f);
    const WaveField g = read_field_binary((td.path / "f").string());
    CHECK(g.n() == 16);
    CHECK(g.time == 0.75);
    CHECK(g.analytic_tail);
    for (std::size_t i = 0; i < f.psi.size(); ++i) {
        CHECK(g.psi.data()[i] == f.psi.data()[i]);
        CHECK(g.pi.data()[i] == f.pi.data()[i]);
    }
}

TEST_CASE("config validation failures carry precise messages") {
    RunConfig c = preset("two-body");
    c.dt = 1.0;
    CHECK_THROWS_WITH_AS(c.validate(),
                         doctest::Contains("violates the CFL bound"), ConfigError);
    c = preset("two-body");
    c.box_halfwidth = 3.0;
    c.dt = 0.02; // keep CFL valid so the box guard is what fires
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("domain-of-dependence"),
                         ConfigError);
    c = preset("two-body");
    c.n_particles = 0;
    c.ensemble_kind = "sampler";
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = preset("clt-default");
    c.clt_replicas = 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS((void)preset("no-such-preset"), ConfigError);
}

TEST_CASE("config file loading and overrides") {
    TempDir td("cfg");
    {
        std::ofstream os(td.path / "c.json");
        os << R"({"preset": "two-body", "grid": {"n": 48}, "integrator": {"dt": 0.05}})";
    }
    RunConfig c = load_config((td.path / "c.json").string());
    CHECK(c.grid_n == 48);
    CHECK(c.dt == 0.05);
    CHECK(c.ensemble_kind == "two-body"); // from the preset
    apply_override(c, "kernel.epsilon=0.5");
    CHECK(c.epsilon == 0.5);
    apply_override(c, "ensemble.sampler.kind=\"ball\"");
    CHECK(c.sampler.kind == "ball");
    CHECK_THROWS_AS(apply_override(c, "nonsense"), ConfigError);
    CHECK_THROWS_AS(apply_override(c, "bogus.key=1"), ConfigError);
    {
        std::ofstream os(td.path / "bad.json");
        os << R"({"unknown_section": {}})";
    }
    CHECK_THROWS_AS((void)load_config((td.path / "bad.json").string()), ConfigError);
    // round trip through the manifest echo
    const RunConfig c2 = parse_config_json(dump_config(c));
    CHECK(c2.epsilon == c.epsilon);
    CHECK(c2.sampler.kind == c.sampler.kind);
}

TEST_CASE("simulate runs are deterministic and validate cleanly") {
    TempDir td("det");
    const RunConfig c = tiny_run_config();
    run_simulation(c, (td.path / "a").string());
    run_simulation(c, (td.path / "b").string());
    CHECK(slurp(td.path / "a" / "diagnostics.csv") == slurp(td.path / "b" / "diagnostics.csv"));
    CHECK(slurp(td.path / "a" / "ensemble_final.csv") ==
          slurp(td.path / "b" / "ensemble_final.csv"));

    const auto rep = validate_run((td.path / "a").string());
    CHECK(rep.ok());
    // manifest records version and seed
    const std::string manifest = slurp(td.path / "a" / "manifest.json");
    CHECK(manifest.find("version") != std::string::npos);
    CHECK(manifest.find("seed") != std::string::npos);
}

TEST_CASE("validate flags corrupted data and missing files") {
    TempDir td("corrupt");
    const RunConfig c = tiny_run_config();
    run_simulation(c, (td.path / "r").string());

    SUBCASE("hand-corrupted momentum column") {
        // inject a superluminal-looking diagnostics row by scaling max_speed
        auto text = slurp(td.path / "r" / "diagnostics.csv");
        // column 15 is max_speed; replace the last row's value crudely
        const auto pos = text.rfind('\n', text.size() - 2);
        std::string last = text.substr(pos + 1);
        std::vector<std::string> cols;
        std::istringstream ls(last);
        std::string tok;
        while (std::getline(ls, tok, ',')) cols.push_back(tok);
        cols[14] = "1.5"; // max_speed > 1
        std::string rebuilt = text.substr(0, pos + 1);
        for (std::size_t i = 0; i < cols.size(); ++i)
            rebuilt += (i ? "," : "") + cols[i];
        rebuilt += "\n";
        std::ofstream(td.path / "r" / "diagnostics.csv") << rebuilt;
        const auto rep = validate_run((td.path / "r").string());
        CHECK_FALSE(rep.ok());
    }

    SUBCASE("missing manifest") {
        fs::remove(td.path / "r" / "manifest.json");
        const auto rep = validate_run((td.path / "r").string());
        CHECK(rep.io_error);
    }
}

TEST_CASE("presets all validate") {
    for (const auto& name : preset_names()) {
        const RunConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
    }
}

TEST_CASE("diagnostics round trip") {
    TempDir td("diag");
    std::vector<DiagnosticsRecord> recs(2);
    recs[0].time = 0.0;
    recs[0].energy = 0.125;
    recs[0].momentum = {1e-17, -2.5, 0.5};
    recs[1].time = 0.5;
    recs[1].energy = 0.1250000001;
    write_diagnostics_csv(td.path / "d.csv", recs);
    const auto back = read_diagnostics_csv(td.path / "d.csv");
    REQUIRE(back.size() == 2);
    CHECK(back[0].momentum.y == -2.5);
    CHECK(back[1].energy == 0.1250000001);
}
