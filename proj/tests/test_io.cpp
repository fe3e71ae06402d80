#include <unistd.h>

#include <catch2/catch_amalgamated.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "qring/config.hpp"
#include "qring/output.hpp"
#include "qring/sweep.hpp"

using namespace qring;
namespace fs = std::filesystem;

namespace {
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("qring_io_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

SweepResult tiny_sweep(Solver solver = Solver::Analytic) {
    DeviceParams dev;
    SweepSpec spec = default_sweep_spec(dev, 0.05);
    spec.omega_d_points = 4;
    spec.phi_points = 5;
    spec.solver = solver;
    spec.threads = 1;
    return run_sweep(spec);
}
}  // namespace

TEST_CASE("significant-digit formatting") {
    CHECK(format_sig(0.0) == "0");
    CHECK(format_sig(1.0) == "1");
    CHECK(format_sig(6.5) == "6.5");
    CHECK(format_sig(1.0 / 3.0) == "0.33333333333333331");
    // round trip at 17 significant digits is exact
    for (double v : {6.5051875, 6.50518750000123456e-5, -1.234e-17, 2.0 / 3.0})
        CHECK(std::stod(format_sig(v)) == v);
}

TEST_CASE("CSV header and row order follow the column contract") {
    const SweepResult sweep = tiny_sweep();
    const std::string csv = sweep_to_csv(sweep);
    std::istringstream in(csv);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line ==
          "omega_d,phi,current_natural,current_per_sec,n_ground,n_k0,n_k1,n_k2,trace_err,"
          "residual,solver_status");
    size_t rows = 0;
    size_t idx = 0;
    while (std::getline(in, line)) {
        ++rows;
        // phi outer, omega_d inner
        const auto f = line.substr(0, line.find(','));
        const size_t wi = idx % sweep.omega_d.size();
        CHECK(std::stod(f) == sweep.omega_d[wi]);
        ++idx;
    }
    CHECK(rows == 20);
}

TEST_CASE("CSV round trip preserves axes and payload") {
    TempDir tmp;
    const SweepResult sweep = tiny_sweep();
    write_file(tmp.file("s.csv"), sweep_to_csv(sweep));
    const SweepResult back = read_sweep_csv(tmp.file("s.csv"));
    REQUIRE(back.omega_d == sweep.omega_d);
    REQUIRE(back.phi == sweep.phi);
    REQUIRE(back.cells.size() == sweep.cells.size());
    for (size_t i = 0; i < sweep.cells.size(); ++i) {
        CHECK(back.cells[i].current_natural == sweep.cells[i].current_natural);
        CHECK(back.cells[i].n_ground == sweep.cells[i].n_ground);
        CHECK(back.cells[i].status == sweep.cells[i].status);
    }
}

TEST_CASE("JSON round trip preserves metadata") {
    TempDir tmp;
    const SweepResult sweep = tiny_sweep(Solver::Rates);
    write_file(tmp.file("s.json"), sweep_to_json(sweep));
    const SweepResult back = read_sweep_json(tmp.file("s.json"));
    CHECK(back.meta.solver == Solver::Rates);
    CHECK(back.meta.device.j0 == sweep.meta.device.j0);
    CHECK(back.meta.eps_d == sweep.meta.eps_d);
    REQUIRE(back.omega_d == sweep.omega_d);
    for (size_t i = 0; i < sweep.cells.size(); ++i)
        CHECK(back.cells[i].current_natural == sweep.cells[i].current_natural);
}

TEST_CASE("serialization is deterministic") {
    const SweepResult a = tiny_sweep();
    const SweepResult b = tiny_sweep();
    CHECK(sweep_to_csv(a) == sweep_to_csv(b));
    CHECK(sweep_to_json(a) == sweep_to_json(b));
}

TEST_CASE("malformed sweep files are rejected") {
    TempDir tmp;
    write_file(tmp.file("empty.csv"), "");
    CHECK_THROWS_AS(read_sweep_csv(tmp.file("empty.csv")), ConfigError);

    write_file(tmp.file("header_only.csv"), csv_header(3) + "\n");
    CHECK_THROWS_AS(read_sweep_csv(tmp.file("header_only.csv")), ConfigError);

    write_file(tmp.file("bad_header.csv"), "a,b,c\n1,2,3\n");
    CHECK_THROWS_AS(read_sweep_csv(tmp.file("bad_header.csv")), ConfigError);

    write_file(tmp.file("short_row.csv"), csv_header(3) + "\n1,2,3\n");
    CHECK_THROWS_AS(read_sweep_csv(tmp.file("short_row.csv")), ConfigError);

    CHECK_THROWS_AS(read_sweep_csv(tmp.file("missing.csv")), ConfigError);
}

TEST_CASE("default config matches the built-in parameter set") {
    const RunConfig cfg = parse_config(nlohmann::json::object());
    CHECK(cfg.device.n_sites == 3);
    CHECK(cfg.device.omega_q == 7.0);
    CHECK(cfg.eps_d == 0.05);
    CHECK(cfg.omega_d_points == 101);
    CHECK(cfg.phi_points == 121);
    CHECK(cfg.solver == Solver::Rates);
    CHECK(cfg.output.format == "csv");
    CHECK(cfg.output.precision == 17);
    // effective drive defaults to the Raman resonance center
    const DriveParams drv = effective_drive(cfg);
    CHECK_THAT(drv.omega_d, Catch::Matchers::WithinAbs(6.5051875, 1e-9));
}

TEST_CASE("unknown config keys are rejected by name") {
    using nlohmann::json;
    try {
        parse_config(json::parse(R"({"foo": 1})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("foo") != std::string::npos);
    }
    try {
        parse_config(json::parse(R"({"device": {"n_sites": 3, "bogus_rate": 1.0}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("device.bogus_rate") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(json::parse(R"({"sweep": {"solver": "magic"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"drive": {"eps_d": -0.5}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"device": {"g": "strong"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"output": {"format": "xml"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"output": {"precision": 40}})")), ConfigError);
}

TEST_CASE("config overrides flow into the sweep spec") {
    using nlohmann::json;
    const RunConfig cfg = parse_config(json::parse(
        R"({"device": {"j0": 2e-3}, "drive": {"eps_d": 0.02, "phi": 7.0},
            "sweep": {"omega_d_points": 11, "phi_points": 13, "solver": "nullspace", "threads": 3}})"));
    CHECK(cfg.device.j0 == 2e-3);
    CHECK(cfg.phi < kTwoPi);  // normalized
    const SweepSpec spec = sweep_spec_from_config(cfg);
    CHECK(spec.omega_d_points == 11);
    CHECK(spec.phi_points == 13);
    CHECK(spec.solver == Solver::Nullspace);
    CHECK(spec.threads == 3);
    CHECK(spec.eps_d == 0.02);
    // window derived from the overridden device
    CHECK_THAT(spec.omega_d_hi - spec.omega_d_lo, Catch::Matchers::WithinRel(8.0 * 2e-3, 1e-12));
}

TEST_CASE("explicit sweep window wins over the derived one") {
    using nlohmann::json;
    const RunConfig cfg = parse_config(
        json::parse(R"({"sweep": {"omega_d_lo": 6.4, "omega_d_hi": 6.6}})"));
    const SweepSpec spec = sweep_spec_from_config(cfg);
    CHECK(spec.omega_d_lo == 6.4);
    CHECK(spec.omega_d_hi == 6.6);
}

TEST_CASE("plot script embeds the model constants and references only the CSV") {
    TempDir tmp;
    const SweepResult sweep = tiny_sweep();
    write_file(tmp.file("s.csv"), sweep_to_csv(sweep));
    DeviceParams dev;
    const std::string script = generate_plot_script(tmp.file("s.csv"), dev, 0.05);

    CHECK(script.find(tmp.file("s.csv")) != std::string::npos);
    CHECK(script.find("N = 3") != std::string::npos);
    CHECK(script.find("WBAR = 6.5051875") != std::string::npos);
    // 2N zero-current guides and N resonance curves
    size_t guides = 0, curves = 0, pos = 0;
    while ((pos = script.find("axhline", pos)) != std::string::npos) {
        ++guides;
        pos += 7;
    }
    pos = 0;
    while ((pos = script.find("# resonance curve", pos)) != std::string::npos) {
        ++curves;
        pos += 10;
    }
    CHECK(guides == 6);
    CHECK(curves == 3);
}
