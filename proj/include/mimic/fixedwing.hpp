#pragma once

#include <cmath>
#include <memory>

#include "mimic/config.hpp"
#include "mimic/csv_log.hpp"
#include "mimic/types.hpp"

namespace mimic {

struct ModelDomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Simplified fixed-wing surrogate sized to an x8-like flying wing.
// Sign conventions: positive elevator pitches nose down, positive aileron
// rolls right, so "up elevator" and "left aileron" are negative deflections.
struct FixedWingParams {
    double mass = 3.5;                        // kg
    Vec3 inertia_diag = Vec3(0.35, 0.25, 0.50);  // kg m^2
    double reference_area = 0.75;             // m^2
    double reference_chord = 0.35;            // m
    double reference_span = 2.1;              // m
    double trim_airspeed = 18.0;              // m/s
    double air_density = 1.225;               // kg/m^3

    // force coefficients
    double cl0 = 0.05;
    double cl_alpha = 5.0;                    // per rad
    double cd0 = 0.02;
    double induced_drag_factor = 0.06;        // CD = cd0 + k CL^2
    double cy_beta = -0.5;                    // per rad

    // moment coefficients
    double cm0 = 0.0;
    double cm_alpha = -0.8;
    double cm_q = -6.0;
    double cl_beta = -0.06;
    double cl_p = -0.45;
    double cn_beta = 0.02;                    // weak, no vertical tail
    double cn_r = -0.06;

    // per unit deflection: [aileron roll, elevator pitch, throttle thrust, rudder yaw]
    Vec4 control_effectiveness = Vec4(0.18, -0.35, 1.0, 0.005);
    double max_thrust = 18.0;                 // N
    double gravity = 9.81;                    // m/s^2

    void validate() const {
        if (mass <= 0.0 || reference_area <= 0.0 || trim_airspeed <= 0.0)
            throw ParseError("FixedWingParams: mass, reference_area, trim_airspeed must be positive");
    }

    static FixedWingParams from_config(const Config& cfg) {
        FixedWingParams p;
        p.mass = cfg.get_double("mass", p.mass);
        p.inertia_diag = cfg.get_vec3("inertia_diag", p.inertia_diag);
        p.reference_area = cfg.get_double("reference_area", p.reference_area);
        p.reference_chord = cfg.get_double("reference_chord", p.reference_chord);
        p.reference_span = cfg.get_double("reference_span", p.reference_span);
        p.trim_airspeed = cfg.get_double("trim_airspeed", p.trim_airspeed);
        p.air_density = cfg.get_double("air_density", p.air_density);
        p.cl0 = cfg.get_double("cl0", p.cl0);
        p.cl_alpha = cfg.get_double("cl_alpha", p.cl_alpha);
        p.cd0 = cfg.get_double("cd0", p.cd0);
        p.induced_drag_factor = cfg.get_double("induced_drag_factor", p.induced_drag_factor);
        p.cy_beta = cfg.get_double("cy_beta", p.cy_beta);
        p.cm0 = cfg.get_double("cm0", p.cm0);
        p.cm_alpha = cfg.get_double("cm_alpha", p.cm_alpha);
        p.cm_q = cfg.get_double("cm_q", p.cm_q);
        p.cl_beta = cfg.get_double("cl_beta", p.cl_beta);
        p.cl_p = cfg.get_double("cl_p", p.cl_p);
        p.cn_beta = cfg.get_double("cn_beta", p.cn_beta);
        p.cn_r = cfg.get_double("cn_r", p.cn_r);
        p.control_effectiveness = cfg.get_vec4("control_effectiveness", p.control_effectiveness);
        p.max_thrust = cfg.get_double("max_thrust", p.max_thrust);
        p.gravity = cfg.get_double("gravity", p.gravity);
        p.validate();
        return p;
    }
};

namespace fw_detail {

inline std::pair<Vec3, Vec3> fw_forces_and_moments(const VehicleState& state,
                                                   const ControlVector& control,
                                                   const FixedWingParams& p) {
    const Vec3& v = state.velocity;
    const double airspeed = v.norm();
    if (airspeed < 1.0)
        throw ModelDomainError("fixed-wing model invalid below 1 m/s airspeed");

    const double alpha = std::atan2(v[2], v[0]);
    const double beta = std::asin(std::clamp(v[1] / airspeed, -1.0, 1.0));
    const double qbar = 0.5 * p.air_density * airspeed * airspeed;
    const double qs = qbar * p.reference_area;

    const double ail = control.channels[0];
    const double elev = control.channels[1];
    const double tla = control.channels[2];
    const double rud = control.channels[3];

    const double cl = p.cl0 + p.cl_alpha * alpha;
    const double cd = p.cd0 + p.induced_drag_factor * cl * cl;
    const double lift = qs * cl;
    const double drag = qs * cd;
    const double side = qs * p.cy_beta * beta;
    const double thrust = tla * p.control_effectiveness[2] * p.max_thrust;

    // stability axes to body axes
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    Vec3 force;
    force[0] = -drag * ca + lift * sa + thrust;
    force[1] = side;
    force[2] = -drag * sa - lift * ca;
    force += body_to_world(state.attitude).transpose() * Vec3(0.0, 0.0, p.mass * p.gravity);

    const double b = p.reference_span;
    const double c = p.reference_chord;
    const Vec3& w = state.angular_rates;
    Vec3 moment;
    moment[0] = qs * b * (p.cl_beta * beta + p.cl_p * w[0] * b / (2.0 * airspeed) +
                          p.control_effectiveness[0] * ail);
    moment[1] = qs * c * (p.cm0 + p.cm_alpha * alpha + p.cm_q * w[1] * c / (2.0 * airspeed) +
                          p.control_effectiveness[1] * elev);
    moment[2] = qs * b * (p.cn_beta * beta + p.cn_r * w[2] * b / (2.0 * airspeed) +
                          p.control_effectiveness[3] * rud);
    return {force, moment};
}

}  // namespace fw_detail

// Same two-step Euler integrator as the multi-rotor.
inline VehicleState step_fw(const VehicleState& state, const ControlVector& control,
                            const FixedWingParams& params, double dt) {
    if (control.kind != ControlKind::FixedWing)
        throw KindError("step_fw: control must be FixedWing kind");
    if (dt <= 0.0) throw NumericError("step_fw: dt must be positive");
    if (std::abs(state.attitude[1]) > kPi / 2.0 - kPitchSingularityBand)
        throw SingularityError("step_fw: pitch within singularity band");

    const auto [force, moment] = fw_detail::fw_forces_and_moments(state, control, params);
    const Vec3& omega = state.angular_rates;
    const Vec3 inertia = params.inertia_diag;

    const Vec3 lin_acc = force / params.mass - omega.cross(state.velocity);
    const Vec3 ang_acc =
        (moment - omega.cross(inertia.cwiseProduct(omega))).cwiseQuotient(inertia);

    VehicleState next;
    next.velocity = state.velocity + lin_acc * dt;
    next.angular_rates = omega + ang_acc * dt;
    next.position = state.position + body_to_world(state.attitude) * next.velocity * dt;
    const Vec3 euler_rates = euler_rate_matrix(state.attitude) * next.angular_rates;
    next.attitude = wrap_attitude(state.attitude + euler_rates * dt).angles;

    if (!next.finite()) throw NumericError("step_fw: non-finite state");
    return next;
}

struct TrimSolution {
    double pitch = 0.0;
    double elevator = 0.0;
    double throttle = 0.0;
    double residual = 0.0;

    ControlVector controls() const {
        return ControlVector::fixedwing(Vec4(0.0, elevator, throttle, 0.0));
    }
};

// Level-flight state at the given trim: world velocity horizontal along x.
inline VehicleState trimmed_state(const FixedWingParams& params, const TrimSolution& trim) {
    VehicleState s;
    s.attitude = Vec3(0.0, trim.pitch, 0.0);
    const double v = params.trim_airspeed;
    s.velocity = Vec3(v * std::cos(trim.pitch), 0.0, v * std::sin(trim.pitch));
    return s;
}

// Damped Newton on (pitch, elevator, throttle) driving the forward/vertical
// force residuals and pitch moment to zero for level flight at trim_airspeed.
inline TrimSolution solve_trim(const FixedWingParams& params, double tol = 1e-8,
                               int max_iterations = 100) {
    auto residual = [&](const Vec3& x) -> Vec3 {
        TrimSolution t{x[0], x[1], x[2], 0.0};
        const VehicleState s = trimmed_state(params, t);
        const auto [force, moment] = fw_detail::fw_forces_and_moments(s, t.controls(), params);
        return Vec3(force[0] / params.mass, force[2] / params.mass,
                    moment[1] / params.inertia_diag[1]);
    };

    Vec3 x(0.02, 0.0, 0.5);
    Vec3 r = residual(x);
    for (int it = 0; it < max_iterations && r.norm() > tol; ++it) {
        Mat3 jac;
        const double h = 1e-7;
        for (int k = 0; k < 3; ++k) {
            Vec3 xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            jac.col(k) = (residual(xp) - residual(xm)) / (2.0 * h);
        }
        Vec3 delta = jac.fullPivLu().solve(-r);
        double scale = 1.0;
        // backtrack until the residual decreases
        for (int ls = 0; ls < 30; ++ls) {
            const Vec3 trial = x + scale * delta;
            const Vec3 rt = residual(trial);
            if (rt.norm() < r.norm()) {
                x = trial;
                r = rt;
                break;
            }
            scale *= 0.5;
        }
    }
    if (r.norm() > tol)
        throw NumericError("solve_trim: did not converge, residual " + std::to_string(r.norm()));
    return {x[0], x[1], x[2], r.norm()};
}

// Uniformly sampled open-loop control schedule.
struct ControlSchedule {
    double dt = 0.1;
    double start_time = 0.0;
    std::vector<ControlVector> controls;

    double duration() const { return dt * static_cast<double>(controls.size()); }
    double end_time() const { return start_time + duration(); }

    const ControlVector& at_time(double t) const {
        if (controls.empty()) throw RangeError("ControlSchedule: empty");
        const auto idx = static_cast<std::ptrdiff_t>(std::floor((t - start_time) / dt + 1e-9));
        const auto clamped = std::clamp<std::ptrdiff_t>(idx, 0,
            static_cast<std::ptrdiff_t>(controls.size()) - 1);
        return controls[static_cast<std::size_t>(clamped)];
    }

    static ControlSchedule constant(const ControlVector& c, double duration, double dt) {
        ControlSchedule s;
        s.dt = dt;
        s.controls.assign(static_cast<std::size_t>(std::ceil(duration / dt - 1e-9)), c);
        return s;
    }
};

enum class DisturbanceKind { Pitch, Roll };

inline constexpr double kDisturbanceDeflection = 0.5;  // 50% of full deflection
inline constexpr double kDisturbanceDuration = 0.2;    // s

// Override the elevator (Pitch) or aileron (Roll) channel to -0.5 (up
// elevator / left aileron) for ceil(0.2/dt) samples starting at `start`.
inline ControlSchedule disturbance_sequence(const ControlSchedule& base, DisturbanceKind kind,
                                            double start, double dt) {
    if (std::abs(dt - base.dt) > 1e-12)
        throw RangeError("disturbance_sequence: dt mismatch with schedule");
    if (start < base.start_time || start >= base.end_time())
        throw RangeError("disturbance_sequence: start outside schedule");
    ControlSchedule out = base;
    const auto first = static_cast<std::size_t>(std::floor((start - base.start_time) / dt + 1e-9));
    const auto count = static_cast<std::size_t>(std::ceil(kDisturbanceDuration / dt - 1e-9));
    const int channel = kind == DisturbanceKind::Pitch ? 1 : 0;
    for (std::size_t i = first; i < first + count && i < out.controls.size(); ++i)
        out.controls[i].channels[channel] = -kDisturbanceDeflection;
    return out;
}

// Integrate the surrogate over a schedule; states sampled at the schedule dt.
inline Trajectory simulate_fw(const FixedWingParams& params, const VehicleState& initial,
                              const ControlSchedule& schedule, int substeps = 1) {
    if (substeps < 1) throw NumericError("simulate_fw: substeps must be >= 1");
    Trajectory traj;
    traj.dt = schedule.dt;
    traj.start_time = schedule.start_time;
    traj.states.push_back(initial);
    traj.controls = schedule.controls;
    VehicleState s = initial;
    const double h = schedule.dt / substeps;
    for (const auto& c : schedule.controls) {
        for (int k = 0; k < substeps; ++k) s = step_fw(s, c, params, h);
        traj.states.push_back(s);
    }
    return traj;
}

// Target-side trajectory provider: either a simulated surrogate run or a
// recorded log. Rollouts slice (and linearly interpolate) the backing
// trajectory; windows past the end hold the last state when enabled.
class TargetSource {
public:
    static TargetSource model(const FixedWingParams& params, const VehicleState& initial,
                              const ControlSchedule& schedule, int substeps = 1,
                              bool hold_last = true) {
        TargetSource src;
        src.trajectory_ = simulate_fw(params, initial, schedule, substeps);
        src.hold_last_ = hold_last;
        return src;
    }

    static TargetSource recorded_log(Trajectory traj, bool hold_last = true) {
        if (traj.states.empty())
            throw DimensionError("TargetSource: recorded log has no states");
        traj.validate();
        TargetSource src;
        src.trajectory_ = std::move(traj);
        src.hold_last_ = hold_last;
        return src;
    }

    const Trajectory& backing_trajectory() const { return trajectory_; }
    double start_time() const { return trajectory_.start_time; }
    double end_time() const { return trajectory_.end_time(); }

    VehicleState state_at(double t) const {
        const Trajectory& tr = trajectory_;
        if (t < tr.start_time - 1e-9 || (!hold_last_ && t > tr.end_time() + 1e-9))
            throw RangeError("TargetSource: time " + std::to_string(t) + " outside log");
        const double u = (t - tr.start_time) / tr.dt;
        const auto last = static_cast<double>(tr.states.size() - 1);
        if (u <= 0.0) return tr.states.front();
        if (u >= last) return tr.states.back();
        const auto i = static_cast<std::size_t>(std::floor(u));
        const double frac = u - static_cast<double>(i);
        return interpolate(tr.states[i], tr.states[i + 1], frac);
    }

    Trajectory rollout(double from_time, double horizon, double dt) const {
        if (horizon <= 0.0 || dt <= 0.0)
            throw RangeError("TargetSource::rollout: horizon and dt must be positive");
        const auto n = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9)) + 1;
        Trajectory out;
        out.dt = dt;
        out.start_time = from_time;
        out.states.reserve(n);
        for (std::size_t i = 0; i < n; ++i)
            out.states.push_back(state_at(from_time + dt * static_cast<double>(i)));
        return out;
    }

private:
    static VehicleState interpolate(const VehicleState& a, const VehicleState& b, double f) {
        VehicleState s;
        s.position = (1.0 - f) * a.position + f * b.position;
        s.velocity = (1.0 - f) * a.velocity + f * b.velocity;
        s.angular_rates = (1.0 - f) * a.angular_rates + f * b.angular_rates;
        for (int k = 0; k < 3; ++k) {
            // shortest-path blend so wrapped angles interpolate sanely
            const double d = wrap_angle(b.attitude[k] - a.attitude[k]);
            s.attitude[k] = a.attitude[k] + f * d;
        }
        s.attitude = wrap_attitude(s.attitude).angles;
        return s;
    }

    Trajectory trajectory_;
    bool hold_last_ = true;
};

// Convenience wrapper matching the log-replay entry point.
inline TargetSource target_from_log(const std::string& path, bool hold_last = true) {
    return TargetSource::recorded_log(load_log(path, ControlKind::FixedWing), hold_last);
}

}  // namespace mimic
