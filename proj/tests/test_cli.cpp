#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bloch2d/config.hpp"
#include "bloch2d/io.hpp"
#include "bloch2d/lattice.hpp"
#include "bloch2d/svg.hpp"

using namespace bloch2d;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    static int counter = 0;
    fs::path d = fs::temp_directory_path() /
                 ("bloch2d_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(++counter));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

#ifdef BLOCH2D_CLI_PATH
int run_cli(const std::string& args) {
    const std::string cmd = std::string(BLOCH2D_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}
#endif

}  // namespace

TEST_CASE("minimal config applies defaults") {
    const RunConfig cfg = parse_config("potential.V0 = -1.5\n");
    validate_config(cfg);
    REQUIRE(cfg.V0.has_value());
    CHECK(*cfg.V0 == -1.5);
    CHECK(cfg.Nc == 7);
    CHECK(cfg.M == 32);
    CHECK(cfg.L == 121);
    CHECK(cfg.sigma == 20.0);
    CHECK(cfg.k0.k1 == 0.05);
    CHECK(cfg.k0.k2 == 0.03);
    CHECK(cfg.t_end_J1 == 200.0);
    CHECK(cfg.stride_J1 == 0.5);
    CHECK_FALSE(cfg.qr.has_value());
}

TEST_CASE("case (i) config lines") {
    const RunConfig cfg = parse_config(
        "potential.V0 = -1.5\n"
        "force.F = 0.5 -0.5\n"
        "force.qr = 1 -1\n");
    validate_config(cfg);
    CHECK(cfg.F_over_J1.x == 0.5);
    CHECK(cfg.F_over_J1.y == -0.5);
    REQUIRE(cfg.qr.has_value());
    CHECK(cfg.qr->first == 1);
    CHECK(cfg.qr->second == -1);
}

TEST_CASE("config rejects bad input with names and line numbers") {
    try {
        parse_config("potential.V0 = -1.5\npacket.sigma = -3\n");
        const RunConfig cfg = parse_config("potential.V0 = -1.5\npacket.sigma = -3\n");
        validate_config(cfg);
        FAIL("expected a range error");
    } catch (const ConfigError& e) {
        CHECK(e.field == "packet.sigma");
    }

    try {
        parse_config("potentia1.V0 = -1.5\n");
        FAIL("expected unknown-key rejection");
    } catch (const ConfigError& e) {
        CHECK(e.line == 1);
        CHECK(e.field == "potentia1.V0");
    }

    CHECK_THROWS_AS(parse_config("force.F = 0.5\n"), ConfigError);        // needs two
    CHECK_THROWS_AS(parse_config("potential.V0 none\n"), ConfigError);    // no '='
    CHECK_THROWS_AS(validate_config(parse_config("")), ConfigError);      // no source
    CHECK_THROWS_AS(
        validate_config(parse_config("potential.V0 = -1\nhoppings.file = x\n")),
        ConfigError);                                                     // two sources
}

TEST_CASE("comments and blank lines are skipped") {
    const RunConfig cfg = parse_config(
        "# a comment\n"
        "\n"
        "  potential.V0 = -1.0  \n"
        "outputs.plot = false\n");
    CHECK(*cfg.V0 == -1.0);
    CHECK_FALSE(cfg.plot);
}

TEST_CASE("hopping table round trip") {
    const HoppingSet J = triangular_three_shell(0.0765, -0.0149, -0.0078);
    std::ostringstream out;
    write_hoppings(out, J, {{"V0", "-1.5"}, {"Nc", "7"}});
    std::istringstream in(out.str());
    const HoppingSet back = read_hoppings(in);
    REQUIRE(back.size() == J.size());
    for (const auto& [m, Jm] : J.entries()) CHECK(back.at(m) == Jm);
}

TEST_CASE("hopping table parse errors carry line numbers") {
    std::istringstream bad("m1 m2 J\n1 0 0.5 junk\n");
    CHECK_THROWS_WITH(read_hoppings(bad), Catch::Matchers::ContainsSubstring("line 2"));
    std::istringstream asym("1 0 0.5\n-1 0 0.4\n");
    CHECK_THROWS_AS(read_hoppings(asym), std::invalid_argument);
}

TEST_CASE("fnv1a64 known vectors") {
    CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a64_hex("hello") == "a430d84680aabd0b");
}

TEST_CASE("svg plot is a pure function of its rows") {
    SvgSeries s{"series", "#ff0000", "4,2", {{0.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}}};
    std::ostringstream a, b;
    write_svg_plot(a, {s}, "title", "x", "y");
    write_svg_plot(b, {s}, "title", "x", "y");
    CHECK(a.str() == b.str());
    CHECK(a.str().find("<svg") != std::string::npos);
    CHECK(a.str().find("<polyline") != std::string::npos);
    CHECK(a.str().find("</svg>") != std::string::npos);
}

#ifdef BLOCH2D_CLI_PATH

TEST_CASE("cli: hoppings emits a deterministic table and drift reads it back") {
    const fs::path dir = temp_dir();
    const std::string table = (dir / "hoppings.txt").string();

    REQUIRE(run_cli("hoppings --V0 -1.5 --Nc 4 --M 16 -o " + table) == 0);
    REQUIRE(fs::exists(table));
    REQUIRE(fs::exists(dir / "hoppings_logJ.txt"));
    const std::string first = read_file(table);

    REQUIRE(run_cli("hoppings --V0 -1.5 --Nc 4 --M 16 -o " + table) == 0);
    CHECK(read_file(table) == first);  // byte-identical rerun

    const HoppingSet J = read_hoppings_file(table);
    CHECK(J.contains({1, 1}));
    CHECK(J.size() == 18);

    REQUIRE(run_cli("drift --hoppings " + table + " --F 0.5 -0.5 --qr 1 -1") == 0);
}

TEST_CASE("cli: config errors exit with code 2") {
    const fs::path dir = temp_dir();
    const std::string cfg = (dir / "bad.cfg").string();
    std::ofstream(cfg) << "packet.sigma = -3\npotential.V0 = -1.5\n";
    CHECK(run_cli("evolve --config " + cfg) == 2);

    CHECK(run_cli("hoppings --V0 0.0 -o " + (dir / "h.txt").string()) == 2);
    CHECK(run_cli("evolve --config " + (dir / "missing.cfg").string()) == 2);
    CHECK(run_cli("drift --hoppings " + (dir / "missing_table.txt").string()) == 2);
    CHECK(run_cli("evolve --badflag") == 2);
}

TEST_CASE("cli: evolve and compare produce consistent CSVs") {
    const fs::path dir = temp_dir();
    const std::string cfg_path = (dir / "run.cfg").string();
    {
        std::ofstream cfg(cfg_path);
        cfg << "potential.V0 = -1.5\n"
               "potential.Nc = 4\n"
               "potential.M = 16\n"
               "packet.L = 61\n"
               "packet.sigma = 6\n"
               "force.F = 0.5 -0.5\n"
               "force.qr = 1 -1\n"
               "evolution.t_end = 4\n"
               "evolution.stride = 0.5\n"
               "outputs.directory = " << dir.string() << "\n";
    }
    REQUIRE(run_cli("evolve --config " + cfg_path) == 0);
    const std::string evolve_csv = read_file((dir / "evolve.csv").string());
    CHECK(evolve_csv.find("t_Er t_J1 com1 com2 norm energy boundary_mass") !=
          std::string::npos);
    CHECK(evolve_csv.find("# hoppings_fnv1a64 =") != std::string::npos);

    REQUIRE(run_cli("compare --config " + cfg_path) == 0);
    CHECK(fs::exists(dir / "compare.csv"));
    CHECK(fs::exists(dir / "compare.svg"));
    const std::string cmp = read_file((dir / "compare.csv").string());
    CHECK(cmp.find("t_Er t_J1 com1 com2 semi1 semi2 drift1 drift2") != std::string::npos);

    // rerun into a second directory: identical bytes end to end
    const fs::path dir2 = temp_dir();
    const std::string cfg2 = (dir2 / "run.cfg").string();
    {
        std::ofstream cfg(cfg2);
        cfg << "potential.V0 = -1.5\n"
               "potential.Nc = 4\n"
               "potential.M = 16\n"
               "packet.L = 61\n"
               "packet.sigma = 6\n"
               "force.F = 0.5 -0.5\n"
               "force.qr = 1 -1\n"
               "evolution.t_end = 4\n"
               "evolution.stride = 0.5\n"
               "outputs.directory = " << dir2.string() << "\n";
    }
    REQUIRE(run_cli("compare --config " + cfg2) == 0);
    CHECK(read_file((dir2 / "compare.csv").string()).substr(200) ==
          cmp.substr(200));  // skip the header block that names the directory
}

TEST_CASE("cli: bands and semiclassical emit their documented headers") {
    const fs::path dir = temp_dir();
    REQUIRE(run_cli("bands --V0 -1.5 --Nc 4 --M 8 -o " + (dir / "bands.csv").string()) == 0);
    const std::string bands = read_file((dir / "bands.csv").string());
    CHECK(bands.find("theta1 theta2 E") != std::string::npos);

    REQUIRE(run_cli("semiclassical --V0 -1.5 --Nc 4 --M 16 --F 0.5 -0.5 --qr 1 -1 "
                    "--t-end 4 -o " + (dir / "semi.csv").string()) == 0);
    const std::string semi = read_file((dir / "semi.csv").string());
    CHECK(semi.find("t x y") != std::string::npos);
}

TEST_CASE("cli: BLOCH2D_OUTDIR overrides the output directory") {
    const fs::path dir = temp_dir();
    const fs::path env_dir = temp_dir();
    const std::string cfg_path = (dir / "run.cfg").string();
    std::ofstream(cfg_path) << "potential.V0 = -1.5\npotential.Nc = 4\npotential.M = 8\n"
                            << "outputs.directory = " << dir.string() << "\n";
    const std::string cmd = "BLOCH2D_OUTDIR=" + env_dir.string() + " " +
                            BLOCH2D_CLI_PATH + " bands --config " + cfg_path +
                            " >/dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(env_dir / "bands.csv"));
    CHECK_FALSE(fs::exists(dir / "bands.csv"));
}

#endif  // BLOCH2D_CLI_PATH
