#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mimic/csv_log.hpp"
#include "mimic/mpc.hpp"

namespace mimic {

enum class Scenario { Hover, PitchDisturbance, RollDisturbance, LogReplay, Custom };

struct ExperimentSpec {
    std::string name = "experiment";
    Scenario scenario = Scenario::Hover;
    std::string log_path;          // LogReplay: recorded target CSV; Custom: schedule CSV
    double duration = 5.0;         // s
    double disturbance_start = 2.0;  // s
    bool lag_enabled = false;
    std::string output_dir = ".";
    MultiRotorParams platform;
    FixedWingParams target_params;
    MpcConfig mpc;

    void validate() const {
        if (duration <= 0.0) throw ParseError("ExperimentSpec: duration must be positive");
        if (disturbance_start >= duration)
            throw ParseError("ExperimentSpec: disturbance_start must precede duration");
        mpc.validate();
    }

    static Scenario parse_scenario(const std::string& s) {
        if (s == "hover") return Scenario::Hover;
        if (s == "pitch_disturbance") return Scenario::PitchDisturbance;
        if (s == "roll_disturbance") return Scenario::RollDisturbance;
        if (s == "log_replay") return Scenario::LogReplay;
        if (s == "custom") return Scenario::Custom;
        throw ParseError("ExperimentSpec: unknown scenario '" + s + "'");
    }

    static ExperimentSpec from_config(const Config& cfg) {
        ExperimentSpec spec;
        spec.name = cfg.get_string("name", spec.name);
        spec.scenario = parse_scenario(cfg.get_string("scenario", "hover"));
        spec.log_path = cfg.get_string("log_path", "");
        spec.duration = cfg.get_double("duration", spec.duration);
        spec.disturbance_start = cfg.get_double("disturbance_start", spec.disturbance_start);
        spec.lag_enabled = cfg.get_bool("lag_enabled", spec.lag_enabled);
        spec.output_dir = cfg.get_string("output_dir", default_output_dir());
        spec.platform = MultiRotorParams::from_config(cfg);
        spec.target_params = FixedWingParams::from_config(cfg);
        spec.mpc = MpcConfig::from_config(cfg);
        if ((spec.scenario == Scenario::LogReplay || spec.scenario == Scenario::Custom) &&
            spec.log_path.empty())
            throw ParseError("ExperimentSpec: scenario requires log_path");
        spec.validate();
        return spec;
    }

    static std::string default_output_dir() {
        const char* env = std::getenv("MIMIC_OUTPUT_DIR");
        return env ? env : ".";
    }
};

struct SaturationInterval {
    int channel;
    double start;
    double end;
};

struct RunReport {
    Vec3 mse_xyz = Vec3::Zero();
    double peak_position_error = 0.0;
    std::vector<SaturationInterval> saturation_intervals;
    double mean_optimizer_iterations = 0.0;
    double wall_time = 0.0;
};

inline RunReport compare_logs(const Trajectory& a, const Trajectory& b) {
    RunReport report;
    report.mse_xyz = mse_per_axis(a, b);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        const double e = (a.states[i].position - b.states[i].position).norm();
        report.peak_position_error = std::max(report.peak_position_error, e);
    }
    return report;
}

inline RunReport compare_logs(const std::string& path_a, const std::string& path_b) {
    return compare_logs(load_log(path_a), load_log(path_b));
}

namespace experiment_detail {

// Stationary hover target at the origin.
inline TargetSource hover_target(double duration, double dt) {
    Trajectory traj;
    traj.dt = dt;
    const auto n = static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)) + 1;
    traj.states.assign(n, VehicleState{});
    return TargetSource::recorded_log(std::move(traj));
}

inline TargetSource disturbance_target(const FixedWingParams& params, DisturbanceKind kind,
                                       double disturbance_start, double duration, double dt) {
    const TrimSolution trim = solve_trim(params);
    ControlSchedule schedule = ControlSchedule::constant(trim.controls(), duration, dt);
    schedule = disturbance_sequence(schedule, kind, disturbance_start, dt);
    return TargetSource::model(params, trimmed_state(params, trim), schedule, 12);
}

inline TargetSource build_target(const ExperimentSpec& spec) {
    const double horizon_pad = spec.duration + spec.mpc.horizon + spec.mpc.control_dt;
    switch (spec.scenario) {
        case Scenario::Hover:
            return hover_target(horizon_pad, spec.mpc.control_dt);
        case Scenario::PitchDisturbance:
            return disturbance_target(spec.target_params, DisturbanceKind::Pitch,
                                      spec.disturbance_start, horizon_pad, spec.mpc.control_dt);
        case Scenario::RollDisturbance:
            return disturbance_target(spec.target_params, DisturbanceKind::Roll,
                                      spec.disturbance_start, horizon_pad, spec.mpc.control_dt);
        case Scenario::LogReplay:
            return target_from_log(spec.log_path);
        case Scenario::Custom: {
            const Trajectory sched_traj = load_log(spec.log_path, ControlKind::FixedWing);
            if (sched_traj.controls.empty())
                throw ParseError("custom scenario: schedule CSV has no control columns");
            ControlSchedule schedule;
            schedule.dt = sched_traj.dt;
            schedule.start_time = sched_traj.start_time;
            schedule.controls = sched_traj.controls;
            return TargetSource::model(spec.target_params, sched_traj.states.front(),
                                       schedule, 12);
        }
    }
    throw ParseError("unknown scenario");
}

// Platform starts co-located with the target, level, matching its world velocity.
inline VehicleState initial_platform_state(const TargetSource& target) {
    const VehicleState t0 = target.state_at(target.start_time());
    VehicleState s;
    s.position = t0.position;
    s.velocity = body_to_world(t0.attitude) * t0.velocity;  // level attitude: body == world
    return s;
}

inline std::vector<SaturationInterval> saturation_intervals_from_controls(
    const std::vector<ControlVector>& controls, double dt, double lower, double upper) {
    std::vector<SaturationInterval> intervals;
    for (int ch = 0; ch < 4; ++ch) {
        bool open = false;
        double start = 0.0;
        for (std::size_t i = 0; i <= controls.size(); ++i) {
            const bool sat =
                i < controls.size() &&
                (controls[i].channels[ch] - lower <= kSaturationTolerance ||
                 upper - controls[i].channels[ch] <= kSaturationTolerance);
            if (sat && !open) {
                open = true;
                start = dt * static_cast<double>(i);
            } else if (!sat && open) {
                open = false;
                intervals.push_back({ch, start, dt * static_cast<double>(i)});
            }
        }
    }
    return intervals;
}

inline void write_controls_csv(const std::vector<ControlVector>& controls, double dt,
                               const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "t,c0,c1,c2,c3\n";
    for (std::size_t i = 0; i < controls.size(); ++i) {
        out << csv_detail::format_number(dt * static_cast<double>(i));
        for (int k = 0; k < 4; ++k)
            out << ',' << csv_detail::format_number(controls[i].channels[k]);
        out << "\n";
    }
}

// report.csv is deterministic; wall time is reported in RunReport only.
inline void write_report_csv(const RunReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open for writing: " + path);
    out << "key,value\n";
    out << "mse_x," << csv_detail::format_number(report.mse_xyz[0]) << "\n";
    out << "mse_y," << csv_detail::format_number(report.mse_xyz[1]) << "\n";
    out << "mse_z," << csv_detail::format_number(report.mse_xyz[2]) << "\n";
    out << "peak_position_error," << csv_detail::format_number(report.peak_position_error)
        << "\n";
    out << "mean_optimizer_iterations,"
        << csv_detail::format_number(report.mean_optimizer_iterations) << "\n";
    for (const auto& iv : report.saturation_intervals)
        out << "saturation_c" << iv.channel << ","
            << csv_detail::format_number(iv.start) << ':'
            << csv_detail::format_number(iv.end) << "\n";
}

}  // namespace experiment_detail

struct ExperimentResult {
    RunReport report;
    Trajectory target;    // sampled at control_dt over the run
    Trajectory platform;  // likewise
    std::vector<ControlVector> controls;
};

// Lock-step closed loop: the controller plans at control_dt, the plant
// integrates at the physics substep, with the lag filter applied to the
// plant only.
inline ExperimentResult run_closed_loop(const ExperimentSpec& spec, const TargetSource& target) {
    const auto t_begin = std::chrono::steady_clock::now();
    const double dt = spec.mpc.control_dt;
    const int n_steps = static_cast<int>(std::llround(spec.duration / dt));
    const double h = spec.mpc.physics_dt();

    MimicController controller(spec.platform, spec.mpc);
    VehicleState platform = experiment_detail::initial_platform_state(target);
    MotorState motors;  // lag filter state of the plant

    ExperimentResult result;
    result.target.dt = dt;
    result.target.start_time = target.start_time();
    result.platform.dt = dt;
    result.platform.start_time = target.start_time();
    result.target.states.push_back(target.state_at(target.start_time()));
    result.platform.states.push_back(platform);

    long total_iterations = 0;
    for (int i = 0; i < n_steps; ++i) {
        const double now = target.start_time() + dt * i;
        const auto [u, plan_result] = controller.control_step(platform, target, now, motors);
        total_iterations += plan_result.optimizer_iterations;
        result.controls.push_back(u);

        for (int k = 0; k < spec.mpc.physics_substeps; ++k) {
            motors = spec.lag_enabled
                         ? apply_lag(motors, u, h, spec.platform.lag_time_constant)
                         : MotorState{u.channels};
            platform = step(platform, motors, spec.platform, h);
        }
        result.target.states.push_back(target.state_at(now + dt));
        result.platform.states.push_back(platform);
    }
    result.platform.controls = result.controls;

    result.report = compare_logs(result.target, result.platform);
    result.report.mean_optimizer_iterations =
        n_steps > 0 ? static_cast<double>(total_iterations) / n_steps : 0.0;
    result.report.saturation_intervals = experiment_detail::saturation_intervals_from_controls(
        result.controls, dt, spec.mpc.control_lower, spec.mpc.control_upper);
    result.report.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_begin).count();
    return result;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, bool write_artifacts = true) {
    spec.validate();
    const TargetSource target = experiment_detail::build_target(spec);
    ExperimentResult result = run_closed_loop(spec, target);

    if (write_artifacts) {
        namespace fs = std::filesystem;
        fs::create_directories(spec.output_dir);
        const fs::path dir(spec.output_dir);
        save_log(result.target, (dir / "target.csv").string());
        save_log(result.platform, (dir / "platform.csv").string());
        experiment_detail::write_controls_csv(result.controls, spec.mpc.control_dt,
                                              (dir / "controls.csv").string());
        experiment_detail::write_report_csv(result.report, (dir / "report.csv").string());
    }
    return result;
}

}  // namespace mimic
