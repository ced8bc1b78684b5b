#pragma once

#include <array>
#include <utility>

#include "mimic/config.hpp"
#include "mimic/types.hpp"

namespace mimic {

// Quad in X configuration, body axes x forward, y right, z down.
// Motor layout (top view), thrust along body -z:
//   0: front-right  (+x, +y)  CCW
//   1: rear-left    (-x, -y)  CCW
//   2: front-left   (+x, -y)  CW
//   3: rear-right   (-x, +y)  CW
struct MultiRotorParams {
    double mass = 1.5;                       // kg
    Vec3 inertia_diag = Vec3(0.02, 0.02, 0.04);  // kg m^2
    double arm_length = 0.25;                // m
    double max_thrust_per_motor = 0.5 * 1.5 * 9.81;  // N, sized for T/W = 2
    double torque_coefficient = 0.016;       // N m yaw reaction per N thrust
    Vec3 linear_drag_coeffs = Vec3(0.1, 0.1, 0.1);    // N s/m
    Vec3 angular_drag_coeffs = Vec3(0.01, 0.01, 0.01); // N m s/rad
    double gravity = 9.81;                   // m/s^2
    double lag_time_constant = 0.0;          // s, 0 disables motor lag

    double thrust_to_weight() const {
        return 4.0 * max_thrust_per_motor / (mass * gravity);
    }

    void validate() const {
        if (mass <= 0.0 || arm_length <= 0.0 || max_thrust_per_motor <= 0.0)
            throw ParseError("MultiRotorParams: mass, arm_length, max_thrust_per_motor must be positive");
        if ((linear_drag_coeffs.array() < 0.0).any() || (angular_drag_coeffs.array() < 0.0).any())
            throw ParseError("MultiRotorParams: drag coefficients must be non-negative");
    }

    static MultiRotorParams from_config(const Config& cfg) {
        MultiRotorParams p;
        p.mass = cfg.get_double("mass", p.mass);
        p.inertia_diag = cfg.get_vec3("inertia_diag", p.inertia_diag);
        p.arm_length = cfg.get_double("arm_length", p.arm_length);
        p.gravity = cfg.get_double("gravity", p.gravity);
        p.max_thrust_per_motor =
            cfg.get_double("max_thrust_per_motor", 0.5 * p.mass * p.gravity);
        p.torque_coefficient = cfg.get_double("torque_coefficient", p.torque_coefficient);
        p.linear_drag_coeffs = cfg.get_vec3("linear_drag_coeffs", p.linear_drag_coeffs);
        p.angular_drag_coeffs = cfg.get_vec3("angular_drag_coeffs", p.angular_drag_coeffs);
        p.lag_time_constant = cfg.get_double("lag_time_constant", p.lag_time_constant);
        p.validate();
        return p;
    }
};

// Lag-filtered motor commands, each in [0, 1].
struct MotorState {
    Vec4 effective_commands = Vec4::Zero();
};

// First-order motor lag: y_t = (1-a) y_{t-1} + a u_t with a = dt/(dt + T_lag).
inline MotorState apply_lag(const MotorState& prev, const ControlVector& raw,
                            double dt, double t_lag) {
    if (raw.kind != ControlKind::MultiRotor)
        throw KindError("apply_lag: control must be MultiRotor kind");
    if (dt <= 0.0) throw NumericError("apply_lag: dt must be positive");
    if (t_lag < 0.0) throw NumericError("apply_lag: T_lag must be non-negative");
    if (t_lag == 0.0) return {raw.channels};
    const double a = dt / (dt + t_lag);
    return {(1.0 - a) * prev.effective_commands + a * raw.channels};
}

namespace mr_detail {
// Signed (x, y) motor positions in units of arm_length/sqrt(2), and spin sign
// for the yaw reaction torque.
struct MotorGeom { double x, y, spin; };
inline constexpr std::array<MotorGeom, 4> kMotors = {{
    {+1.0, +1.0, +1.0},
    {-1.0, -1.0, +1.0},
    {+1.0, -1.0, -1.0},
    {-1.0, +1.0, -1.0},
}};
}  // namespace mr_detail

// Net body-frame force and torque from motors, drag and gravity.
inline std::pair<Vec3, Vec3> forces_and_torques(const VehicleState& state,
                                                const MotorState& motors,
                                                const MultiRotorParams& params) {
    const double arm = params.arm_length / std::sqrt(2.0);
    Vec3 force = Vec3::Zero();
    Vec3 torque = Vec3::Zero();
    for (int i = 0; i < 4; ++i) {
        const double thrust = motors.effective_commands[i] * params.max_thrust_per_motor;
        force[2] -= thrust;
        const auto& g = mr_detail::kMotors[static_cast<std::size_t>(i)];
        // r x F with r = (gx*arm, gy*arm, 0), F = (0, 0, -thrust)
        torque[0] += -g.y * arm * thrust;
        torque[1] += g.x * arm * thrust;
        torque[2] += g.spin * params.torque_coefficient * thrust;
    }
    force -= params.linear_drag_coeffs.cwiseProduct(state.velocity);
    torque -= params.angular_drag_coeffs.cwiseProduct(state.angular_rates);
    // gravity rotated into the body frame
    force += body_to_world(state.attitude).transpose() *
             Vec3(0.0, 0.0, params.mass * params.gravity);
    return {force, torque};
}

// Two-step Euler: integrate accelerations into velocities/rates, then the
// updated velocities into position and attitude.
inline VehicleState step(const VehicleState& state, const MotorState& motors,
                         const MultiRotorParams& params, double dt) {
    if (dt <= 0.0) throw NumericError("step: dt must be positive");
    if (std::abs(state.attitude[1]) > kPi / 2.0 - kPitchSingularityBand)
        throw SingularityError("step: pitch within singularity band");

    const auto [force, torque] = forces_and_torques(state, motors, params);
    const Vec3& omega = state.angular_rates;
    const Vec3 inertia = params.inertia_diag;

    const Vec3 lin_acc = force / params.mass - omega.cross(state.velocity);
    const Vec3 ang_acc =
        (torque - omega.cross(inertia.cwiseProduct(omega))).cwiseQuotient(inertia);

    VehicleState next;
    next.velocity = state.velocity + lin_acc * dt;
    next.angular_rates = omega + ang_acc * dt;
    next.position = state.position + body_to_world(state.attitude) * next.velocity * dt;
    const Vec3 euler_rates = euler_rate_matrix(state.attitude) * next.angular_rates;
    next.attitude = wrap_attitude(state.attitude + euler_rates * dt).angles;

    if (!next.finite()) throw NumericError("step: non-finite state");
    return next;
}

}  // namespace mimic
