// bloch2d command-line front end: bands -> hoppings -> drift prediction ->
// evolution -> comparison, with CSV outputs and SVG trajectory plots.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "bloch2d/bloch2d.hpp"

namespace fs = std::filesystem;
using namespace bloch2d;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct ResolvedModel {
    HoppingSet J;
    double J0 = 0.0;
    std::string table_text;  // serialized table, hashed into provenance
    std::vector<std::pair<std::string, std::string>> provenance;
};

std::string fmt_pair(double a, double b) {
    return "(" + format_full(a) + ", " + format_full(b) + ")";
}

RunConfig load_config(const std::string& path) {
    if (!fs::exists(path))
        throw ConfigError(0, "", "config file does not exist: " + path);
    return parse_config(read_file(path));
}

std::string out_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("BLOCH2D_OUTDIR")) return env;
    return cfg.out_directory;
}

fs::path resolve_output(const RunConfig& cfg, const std::string& override_path,
                        const std::string& default_name) {
    fs::path p = override_path.empty() ? fs::path(out_dir(cfg)) / default_name
                                       : fs::path(override_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

/// Model from the config: band-solver pipeline for a potential, or a table
/// read from disk.
ResolvedModel resolve_model(const RunConfig& cfg) {
    validate_config(cfg);
    ResolvedModel model;
    if (cfg.V0) {
        const OpticalPotentialSpec spec(*cfg.V0);
        const PlaneWaveBasis basis(cfg.Nc);
        const BandSample band = lowest_band(spec, basis, cfg.M);
        ExtractedHoppings ex = extract_hoppings(band, triangular_shells());
        model.J = std::move(ex.hoppings);
        model.J0 = ex.J0;
        model.provenance = {{"V0", format_full(*cfg.V0)},
                            {"Nc", std::to_string(cfg.Nc)},
                            {"M", std::to_string(cfg.M)},
                            {"J0", format_full(ex.J0)},
                            {"max_imag_residue", format_full(ex.max_imag_residue)}};
        model.table_text = hoppings_to_string(model.J, model.provenance);
    } else {
        if (!fs::exists(*cfg.hoppings_file))
            throw ConfigError(0, "hoppings.file",
                              "file does not exist: " + *cfg.hoppings_file);
        model.table_text = read_file(*cfg.hoppings_file);
        std::istringstream ss(model.table_text);
        model.J = read_hoppings(ss);
        model.provenance = {{"hoppings_file", *cfg.hoppings_file}};
    }
    model.provenance.emplace_back("hoppings_fnv1a64", fnv1a64_hex(model.table_text));
    return model;
}

/// Force in E_r units with its (q,r) declaration: taken from the config, or
/// rationalized with the configured q_max (residual reported on stderr).
ForceSpec resolve_force(const RunConfig& cfg, const HoppingSet& J) {
    const double J1 = j1_scale(J);
    const double F1 = cfg.F_over_J1.x * J1;
    const double F2 = cfg.F_over_J1.y * J1;
    if (F1 == 0.0 && F2 == 0.0) return ForceSpec::incommensurate(F1, F2);
    if (cfg.qr) return ForceSpec::commensurate(F1, F2, cfg.qr->first, cfg.qr->second);
    ForceSpec f = rationalize_force({F1, F2}, cfg.qmax);
    std::cerr << "note: force direction rationalized to (q,r) = ("
              << f.qr->first << ", " << f.qr->second
              << ") with residual " << f.qr_residual << "\n";
    return f;
}

void write_provenance(std::ostream& out, const std::string& command,
                      const RunConfig& cfg, const ResolvedModel& model,
                      bool with_run_params) {
    out << "# bloch2d " << command << "\n";
    for (const auto& [k, v] : model.provenance) out << "# " << k << " = " << v << "\n";
    if (with_run_params) {
        out << "# packet.L = " << cfg.L << "\n";
        out << "# packet.sigma = " << format_full(cfg.sigma) << "\n";
        out << "# packet.k0 = " << format_full(cfg.k0.k1) << " " << format_full(cfg.k0.k2) << "\n";
        out << "# force.F/J1 = " << format_full(cfg.F_over_J1.x) << " "
            << format_full(cfg.F_over_J1.y) << "\n";
        if (cfg.qr)
            out << "# force.qr = " << cfg.qr->first << " " << cfg.qr->second << "\n";
        out << "# evolution.dt = " << format_full(cfg.dt) << "\n";
        out << "# evolution.t_end = " << format_full(cfg.t_end_J1) << "\n";
        out << "# evolution.stride = " << format_full(cfg.stride_J1) << "\n";
        out << "# evolution.boundary_band = " << cfg.boundary_band << "\n";
        out << "# evolution.boundary_tol = " << format_full(cfg.boundary_tol) << "\n";
    }
}

int cmd_bands(const RunConfig& cfg, const std::string& output) {
    validate_config(cfg);
    if (!cfg.V0) throw ConfigError(0, "potential.V0", "bands needs a potential source");
    const OpticalPotentialSpec spec(*cfg.V0);
    const BandSample band = lowest_band(spec, PlaneWaveBasis(cfg.Nc), cfg.M);
    const fs::path path = resolve_output(cfg, output, "bands.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# bloch2d bands\n# V0 = " << format_full(*cfg.V0) << "\n# Nc = " << cfg.Nc
        << "\n# M = " << cfg.M << "\n";
    out << "theta1 theta2 E\n";
    for (int j1 = 0; j1 < band.M; ++j1)
        for (int j2 = 0; j2 < band.M; ++j2)
            out << format_full(static_cast<double>(j1) / band.M) << " "
                << format_full(static_cast<double>(j2) / band.M) << " "
                << format_full(band.at(j1, j2)) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

int cmd_hoppings(const RunConfig& cfg, const std::string& output) {
    validate_config(cfg);
    if (!cfg.V0) throw ConfigError(0, "potential.V0", "hoppings needs a potential source");
    if (*cfg.V0 == 0.0)
        throw ConfigError(0, "potential.V0",
                          "V0 = 0 rejected: the free case has no meaningful "
                          "tight-binding truncation");
    const ResolvedModel model = resolve_model(cfg);

    const fs::path path = resolve_output(cfg, output, "hoppings.txt");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << model.table_text;

    // ln|J| over a wider window than the kept shells, for Fig.-style plots
    const OpticalPotentialSpec spec(*cfg.V0);
    const BandSample band = lowest_band(spec, PlaneWaveBasis(cfg.Nc), cfg.M);
    const int window = std::min(5, (cfg.M - 1) / 2);
    const RawHoppingTransform raw = hopping_transform(band, window);
    const fs::path logpath = path.parent_path() / "hoppings_logJ.txt";
    std::ofstream lg(logpath);
    if (!lg) throw std::runtime_error("cannot write " + logpath.string());
    lg << "# bloch2d hoppings: ln|J_m| grid\n";
    for (const auto& [k, v] : model.provenance) lg << "# " << k << " = " << v << "\n";
    lg << "m1 m2 ln_abs_J\n";
    for (const auto& [m, Jm] : raw.J)
        lg << m.m1 << " " << m.m2 << " " << format_full(std::log(std::abs(Jm))) << "\n";
    std::cout << "wrote " << path.string() << " and " << logpath.string() << "\n";
    return 0;
}

int cmd_drift(const RunConfig& cfg) {
    const ResolvedModel model = resolve_model(cfg);
    const double J1 = j1_scale(model.J);
    const ForceSpec F = resolve_force(cfg, model.J);
    const DriftResult drift = drift_vector(model.J, cfg.k0, F);
    std::cout << "k0 = " << fmt_pair(cfg.k0.k1, cfg.k0.k2) << "\n";
    std::cout << "F/J1 = " << fmt_pair(cfg.F_over_J1.x, cfg.F_over_J1.y)
              << ", F/E_r = " << fmt_pair(F.F1, F.F2) << "\n";
    std::cout << "(q, r) = (" << F.qr->first << ", " << F.qr->second << ")";
    if (F.qr_residual != 0.0) std::cout << "  [residual " << F.qr_residual << "]";
    std::cout << "\n";
    std::cout << "T = " << format_full(drift.period) << " (1/E_r) = "
              << format_full(drift.period * J1) << " (1/J1)\n";
    std::cout << "D_T = " << fmt_pair(drift.displacement.x, drift.displacement.y)
              << " sites per period\n";
    std::cout << "velocity = " << fmt_pair(drift.velocity.x, drift.velocity.y)
              << " sites*E_r\n";
    std::cout << "contributing offsets:";
    for (const Offset& m : drift.contributing)
        std::cout << " (" << m.m1 << "," << m.m2 << ")";
    if (drift.contributing.empty()) std::cout << " none within this hopping set";
    std::cout << "\n";
    return 0;
}

int cmd_semiclassical(const RunConfig& cfg, const std::string& output) {
    const ResolvedModel model = resolve_model(cfg);
    const double J1 = j1_scale(model.J);
    const ForceSpec F = resolve_force(cfg, model.J);
    const double t_end = cfg.t_end_J1 / J1;
    const double dt_sample = cfg.stride_J1 / J1;
    const auto samples = semiclassical_trajectory(model.J, cfg.k0, F, t_end, dt_sample);
    const fs::path path = resolve_output(cfg, output, "semiclassical.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_provenance(out, "semiclassical", cfg, model, true);
    out << "# t in 1/E_r; multiply by J1 = " << format_full(J1) << " for 1/J1\n";
    out << "t x y\n";
    for (const auto& s : samples)
        out << format_full(s.t) << " " << format_full(s.r.x) << " "
            << format_full(s.r.y) << "\n";
    std::cout << "wrote " << path.string() << "\n";
    return 0;
}

struct EvolutionSetup {
    ForceSpec F;
    EvolutionConfig ecfg;
    double J1 = 0.0;
};

EvolutionSetup make_evolution_setup(const RunConfig& cfg, const HoppingSet& J) {
    EvolutionSetup s;
    s.J1 = j1_scale(J);
    s.F = resolve_force(cfg, J);
    s.ecfg.t_end = cfg.t_end_J1 / s.J1;
    s.ecfg.dt = cfg.dt > 0.0 ? cfg.dt : stability_time_step(J, s.F, cfg.L);
    const double stride_Er = cfg.stride_J1 / s.J1;
    s.ecfg.sample_stride = std::max(1, static_cast<int>(std::lround(stride_Er / s.ecfg.dt)));
    s.ecfg.boundary_band = cfg.boundary_band;
    s.ecfg.boundary_tol = cfg.boundary_tol;
    return s;
}

int cmd_evolve(const RunConfig& cfg, const std::string& output) {
    const ResolvedModel model = resolve_model(cfg);
    const EvolutionSetup setup = make_evolution_setup(cfg, model.J);
    const WavePacketGrid psi0 = gaussian_packet(cfg.L, cfg.sigma, cfg.k0);
    const EvolutionResult res = rk4_evolve(psi0, model.J, setup.F, setup.ecfg);

    const fs::path path = resolve_output(cfg, output, "evolve.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_provenance(out, "evolve", cfg, model, true);
    out << "# dt_used = " << format_full(setup.ecfg.dt) << "\n";
    out << "t_Er t_J1 com1 com2 norm energy boundary_mass\n";
    for (const auto& row : res.rows)
        out << format_full(row.t) << " " << format_full(row.t * setup.J1) << " "
            << format_full(row.com1) << " " << format_full(row.com2) << " "
            << format_full(row.norm) << " " << format_full(row.energy) << " "
            << format_full(row.boundary_mass) << "\n";
    if (res.abort != AbortReason::none)
        out << "# aborted: " << to_string(res.abort)
            << " (last valid t = " << format_full(res.last_valid_time) << " /E_r)\n";
    std::cout << "wrote " << path.string() << "\n";
    if (res.abort != AbortReason::none) {
        std::cerr << "evolution aborted: " << to_string(res.abort) << "\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_compare(const RunConfig& cfg, const std::string& output) {
    const ResolvedModel model = resolve_model(cfg);
    const EvolutionSetup setup = make_evolution_setup(cfg, model.J);
    const DriftResult drift = drift_vector(model.J, cfg.k0, setup.F);
    const WavePacketGrid psi0 = gaussian_packet(cfg.L, cfg.sigma, cfg.k0);
    const EvolutionResult res = rk4_evolve(psi0, model.J, setup.F, setup.ecfg);

    const fs::path path = resolve_output(cfg, output, "compare.csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_provenance(out, "compare", cfg, model, true);
    out << "# drift: T = " << format_full(drift.period) << " (1/E_r), D_T = "
        << format_full(drift.displacement.x) << " " << format_full(drift.displacement.y)
        << "\n";
    out << "t_Er t_J1 com1 com2 semi1 semi2 drift1 drift2\n";
    SvgSeries exact{"exact (RK4)", "#1f77b4", "", {}};
    SvgSeries semi{"semiclassical", "#d62728", "6,4", {}};
    SvgSeries line{"drift line", "#2ca02c", "2,3", {}};
    for (const auto& row : res.rows) {
        const Vec2 sc = closed_form_displacement(model.J, cfg.k0, setup.F, row.t);
        const Vec2 dl = row.t * drift.velocity;
        out << format_full(row.t) << " " << format_full(row.t * setup.J1) << " "
            << format_full(row.com1) << " " << format_full(row.com2) << " "
            << format_full(sc.x) << " " << format_full(sc.y) << " "
            << format_full(dl.x) << " " << format_full(dl.y) << "\n";
        exact.points.push_back({row.com1, row.com2});
        semi.points.push_back(sc);
        line.points.push_back(dl);
    }
    if (res.abort != AbortReason::none)
        out << "# aborted: " << to_string(res.abort)
            << " (last valid t = " << format_full(res.last_valid_time) << " /E_r)\n";
    std::cout << "wrote " << path.string() << "\n";

    if (cfg.plot) {
        const fs::path svgpath = path.extension() == ".csv"
                                     ? fs::path(path).replace_extension(".svg")
                                     : path.parent_path() / "compare.svg";
        std::ofstream svg(svgpath);
        if (!svg) throw std::runtime_error("cannot write " + svgpath.string());
        write_svg_plot(svg, {exact, semi, line}, "center-of-mass trajectory",
                       "m1 (sites)", "m2 (sites)", /*equal_aspect=*/true);
        std::cout << "wrote " << svgpath.string() << "\n";
    }
    if (res.abort != AbortReason::none) {
        std::cerr << "evolution aborted: " << to_string(res.abort) << "\n";
        return kExitNumerical;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directed coherent transport from 2D Bloch oscillations: "
                 "band solver, drift prediction, exact evolution"};
    app.require_subcommand(1);

    std::string config_path, output;
    double V0 = 0.0;
    int Nc = 0, M = 0, L = 0;
    double sigma = 0.0, dt = 0.0, t_end = 0.0, stride = 0.0;
    std::string hoppings_path;
    std::vector<double> k0_in, F_in;
    std::vector<int> qr_in;

    auto add_model_opts = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration file (section.key = value)");
        cmd->add_option("--V0", V0, "potential minimum in E_r (<= 0)");
        cmd->add_option("--Nc", Nc, "plane-wave cutoff (default 7)");
        cmd->add_option("--M", M, "band-sample grid size (default 32)");
        cmd->add_option("--hoppings", hoppings_path, "hopping table file (instead of a potential)");
        cmd->add_option("-o,--output", output, "output file path");
    };
    auto add_packet_force_opts = [&](CLI::App* cmd) {
        cmd->add_option("--L", L, "grid side, odd (default 121)");
        cmd->add_option("--sigma", sigma, "Gaussian width in sites (default 20)");
        cmd->add_option("--k0", k0_in, "initial wave vector k0 (two reals)")->expected(2);
        cmd->add_option("--F", F_in, "force in units of J1 (two reals)")->expected(2);
        cmd->add_option("--qr", qr_in, "commensurate direction q r (two ints)")->expected(2);
        cmd->add_option("--dt", dt, "time step override in 1/E_r");
        cmd->add_option("--t-end", t_end, "evolution span in 1/J1 (default 200)");
        cmd->add_option("--stride", stride, "observable sampling interval in 1/J1 (default 0.5)");
    };

    CLI::App* bands = app.add_subcommand("bands", "lowest Bloch band on the reduced grid");
    add_model_opts(bands);
    CLI::App* hoppings = app.add_subcommand("hoppings", "extract tight-binding hoppings");
    add_model_opts(hoppings);
    CLI::App* drift = app.add_subcommand("drift", "closed-form drift per Bloch period");
    add_model_opts(drift);
    add_packet_force_opts(drift);
    CLI::App* semi = app.add_subcommand("semiclassical", "closed-form trajectory CSV");
    add_model_opts(semi);
    add_packet_force_opts(semi);
    CLI::App* evolve = app.add_subcommand("evolve", "RK4 quantum evolution CSV");
    add_model_opts(evolve);
    add_packet_force_opts(evolve);
    CLI::App* compare = app.add_subcommand("compare",
                                           "exact vs semiclassical vs drift line (CSV + SVG)");
    add_model_opts(compare);
    add_packet_force_opts(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) cfg = load_config(config_path);
        CLI::App* cmd = app.get_subcommands().front();
        auto given = [&](const char* name) {
            const CLI::Option* opt = cmd->get_option_no_throw(name);
            return opt && opt->count() > 0;
        };
        if (given("--V0")) { cfg.V0 = V0; cfg.hoppings_file.reset(); }
        if (given("--Nc")) cfg.Nc = Nc;
        if (given("--M")) cfg.M = M;
        if (given("--hoppings")) { cfg.hoppings_file = hoppings_path; cfg.V0.reset(); }
        if (given("--L")) cfg.L = L;
        if (given("--sigma")) cfg.sigma = sigma;
        if (given("--k0")) cfg.k0 = {k0_in[0], k0_in[1]};
        if (given("--F")) cfg.F_over_J1 = {F_in[0], F_in[1]};
        if (given("--qr")) cfg.qr = {qr_in[0], qr_in[1]};
        if (given("--dt")) cfg.dt = dt;
        if (given("--t-end")) cfg.t_end_J1 = t_end;
        if (given("--stride")) cfg.stride_J1 = stride;

        if (cmd == bands) return cmd_bands(cfg, output);
        if (cmd == hoppings) return cmd_hoppings(cfg, output);
        if (cmd == drift) return cmd_drift(cfg);
        if (cmd == semi) return cmd_semiclassical(cfg, output);
        if (cmd == evolve) return cmd_evolve(cfg, output);
        if (cmd == compare) return cmd_compare(cfg, output);
        return kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IncommensurateForceError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const BoundaryMassError& e) {
        std::cerr << "numerical validity: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
