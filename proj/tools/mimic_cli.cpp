#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mimic/csv_log.hpp"
#include "mimic/experiment.hpp"
#include "mimic/scenarios.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

struct GlobalFlags {
    std::string output_dir;
    double horizon = -1.0;
    double control_dt = -1.0;
    bool lag = false;
    bool quiet = false;
};

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

void print_report(const mimic::RunReport& report, bool quiet) {
    if (quiet) return;
    std::cout << "mse_x " << fmt6(report.mse_xyz[0]) << "\n"
              << "mse_y " << fmt6(report.mse_xyz[1]) << "\n"
              << "mse_z " << fmt6(report.mse_xyz[2]) << "\n"
              << "peak_position_error " << fmt6(report.peak_position_error) << "\n"
              << "mean_optimizer_iterations " << fmt6(report.mean_optimizer_iterations) << "\n"
              << "wall_time " << fmt6(report.wall_time) << "\n";
    for (const auto& iv : report.saturation_intervals)
        std::cout << "saturation_c" << iv.channel << " " << fmt6(iv.start) << " "
                  << fmt6(iv.end) << "\n";
}

// Accepts either the full trajectory CSV (controls columns required) or the
// bare `t,c0,c1,c2,c3` controls format.
struct OpenLoopInput {
    mimic::VehicleState initial;
    mimic::ControlSchedule schedule;
};

OpenLoopInput load_open_loop_input(const std::string& path, mimic::ControlKind kind) {
    std::ifstream probe(path);
    if (!probe) throw mimic::ParseError("cannot open: " + path);
    std::string header;
    std::getline(probe, header);
    probe.close();

    OpenLoopInput input;
    if (header.rfind("t,c0", 0) == 0) {
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);  // header
        int lineno = 1;
        std::vector<double> times;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto f = mimic::csv_detail::split(line, ',');
            if (f.size() != 5)
                throw mimic::ParseError("controls csv: line " + std::to_string(lineno) +
                                        ": expected 5 fields");
            times.push_back(mimic::csv_detail::parse_field(f[0], lineno));
            mimic::ControlVector c;
            c.kind = kind;
            for (int k = 0; k < 4; ++k)
                c.channels[k] = mimic::csv_detail::parse_field(f[1 + k], lineno);
            input.schedule.controls.push_back(c);
        }
        if (times.size() < 2)
            throw mimic::ParseError("controls csv: need at least 2 rows");
        input.schedule.dt = times[1] - times[0];
        input.schedule.start_time = times[0];
        return input;
    }

    const mimic::Trajectory traj = mimic::load_log(path, kind);
    if (traj.controls.empty())
        throw mimic::ParseError("open-loop input needs control columns: " + path);
    input.initial = traj.states.front();
    input.schedule.dt = traj.dt;
    input.schedule.start_time = traj.start_time;
    input.schedule.controls = traj.controls;
    return input;
}

void write_sim_output(const mimic::Trajectory& traj, const GlobalFlags& flags,
                      mimic::ControlKind kind) {
    namespace fs = std::filesystem;
    const std::string dir = flags.output_dir.empty()
                                ? mimic::ExperimentSpec::default_output_dir()
                                : flags.output_dir;
    fs::create_directories(dir);
    const std::string path = (fs::path(dir) / "sim.csv").string();
    mimic::save_log(traj, path, kind);
    if (!flags.quiet) std::cout << "wrote " << path << "\n";
}

int cmd_run(const std::string& spec_path, const GlobalFlags& flags) {
    mimic::Config cfg = mimic::Config::from_file(spec_path);
    mimic::ExperimentSpec spec = mimic::ExperimentSpec::from_config(cfg);
    if (!flags.output_dir.empty()) spec.output_dir = flags.output_dir;
    if (flags.horizon > 0.0) spec.mpc.horizon = flags.horizon;
    if (flags.control_dt > 0.0) spec.mpc.control_dt = flags.control_dt;
    if (flags.lag) spec.lag_enabled = true;
    spec.mpc.validate();

    const mimic::ExperimentResult result = mimic::run_experiment(spec);
    print_report(result.report, flags.quiet);
    return 0;
}

int cmd_compare(const std::string& a, const std::string& b, const GlobalFlags& flags) {
    const mimic::RunReport report = mimic::compare_logs(a, b);
    print_report(report, flags.quiet);
    return 0;
}

int cmd_sim_mr(const std::string& config_path, const std::string& controls_path,
               const GlobalFlags& flags) {
    const mimic::MultiRotorParams params =
        mimic::MultiRotorParams::from_config(mimic::Config::from_file(config_path));
    OpenLoopInput input = load_open_loop_input(controls_path, mimic::ControlKind::MultiRotor);

    mimic::Trajectory traj;
    traj.dt = input.schedule.dt;
    traj.start_time = input.schedule.start_time;
    traj.states.push_back(input.initial);
    traj.controls = input.schedule.controls;
    mimic::VehicleState s = input.initial;
    mimic::MotorState motors;
    for (const auto& c : input.schedule.controls) {
        motors = flags.lag ? mimic::apply_lag(motors, c, traj.dt, params.lag_time_constant)
                           : mimic::MotorState{c.channels};
        s = mimic::step(s, motors, params, traj.dt);
        traj.states.push_back(s);
    }
    write_sim_output(traj, flags, mimic::ControlKind::MultiRotor);
    return 0;
}

int cmd_sim_fw(const std::string& config_path, const std::string& controls_path,
               const GlobalFlags& flags) {
    const mimic::FixedWingParams params =
        mimic::FixedWingParams::from_config(mimic::Config::from_file(config_path));
    OpenLoopInput input = load_open_loop_input(controls_path, mimic::ControlKind::FixedWing);
    if (input.initial.velocity.norm() < 1.0) {
        const mimic::TrimSolution trim = mimic::solve_trim(params);
        input.initial = mimic::trimmed_state(params, trim);
    }
    const mimic::Trajectory traj = mimic::simulate_fw(params, input.initial, input.schedule);
    write_sim_output(traj, flags, mimic::ControlKind::FixedWing);
    return 0;
}

int cmd_gen_log(const std::string& kind, const std::string& out_path) {
    mimic::Trajectory traj;
    if (kind == "climbing-turn") {
        traj = mimic::make_climbing_turn_log();
    } else if (kind == "aggressive-climb") {
        traj = mimic::make_aggressive_climb_log();
    } else {
        throw mimic::ParseError("gen-log: unknown kind '" + kind +
                                "' (climbing-turn | aggressive-climb)");
    }
    mimic::save_log(traj, out_path, mimic::ControlKind::FixedWing);
    return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"mimic: fixed-wing trajectory mimicry on a multi-rotor platform"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--output-dir", flags.output_dir, "Directory for output artifacts");
    app.add_option("--horizon", flags.horizon, "Override MPC horizon (s)");
    app.add_option("--control-dt", flags.control_dt, "Override MPC control period (s)");
    app.add_flag("--lag", flags.lag, "Enable the plant motor lag filter");
    app.add_flag("--quiet", flags.quiet, "Suppress report output");

    std::string spec_path, path_a, path_b, config_path, controls_path;
    std::string gen_kind, gen_out;

    auto* run = app.add_subcommand("run", "Run an experiment spec");
    run->add_option("spec", spec_path, "Experiment spec file")->required();

    auto* compare = app.add_subcommand("compare", "Compare two trajectory CSV logs");
    compare->add_option("a", path_a)->required();
    compare->add_option("b", path_b)->required();

    auto* sim_mr = app.add_subcommand("sim-mr", "Open-loop multi-rotor simulation");
    sim_mr->add_option("config", config_path)->required();
    sim_mr->add_option("controls", controls_path)->required();

    auto* sim_fw = app.add_subcommand("sim-fw", "Open-loop fixed-wing simulation");
    sim_fw->add_option("config", config_path)->required();
    sim_fw->add_option("controls", controls_path)->required();

    auto* gen_log = app.add_subcommand("gen-log", "Generate a synthetic target log");
    gen_log->add_option("kind", gen_kind, "climbing-turn | aggressive-climb")->required();
    gen_log->add_option("out", gen_out, "Output CSV path")->required();

    auto* version = app.add_subcommand("version", "Print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (version->parsed()) {
            std::cout << kVersion << "\n";
            return 0;
        }
        if (run->parsed()) return cmd_run(spec_path, flags);
        if (compare->parsed()) return cmd_compare(path_a, path_b, flags);
        if (sim_mr->parsed()) return cmd_sim_mr(config_path, controls_path, flags);
        if (sim_fw->parsed()) return cmd_sim_fw(config_path, controls_path, flags);
        if (gen_log->parsed()) return cmd_gen_log(gen_kind, gen_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

#ifndef MIMIC_CLI_NO_MAIN
int main(int argc, char** argv) { return cli_main(argc, argv); }
#endif
