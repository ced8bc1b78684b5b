#pragma once

#include "mimic/types.hpp"

namespace mimic {

// Kinematically generated target logs. These stand in for recorded flight
// data: positions are smooth, velocities consistent, attitudes coordinated.

namespace scenario_detail {

inline double smoothstep(double t, double t0, double t1) {
    if (t <= t0) return 0.0;
    if (t >= t1) return 1.0;
    const double u = (t - t0) / (t1 - t0);
    return u * u * (3.0 - 2.0 * u);
}

inline VehicleState kinematic_state(const Vec3& position, const Vec3& world_velocity,
                                    const Vec3& attitude, const Vec3& euler_rates) {
    VehicleState s;
    s.position = position;
    s.attitude = wrap_attitude(attitude).angles;
    s.velocity = body_to_world(s.attitude).transpose() * world_velocity;
    // rates from Euler-angle rates through the inverse kinematic map
    s.angular_rates = euler_rate_matrix(s.attitude).inverse() * euler_rates;
    return s;
}

}  // namespace scenario_detail

// 60 s fixed-wing style log: straight level run, a sustained climbing turn,
// then a level-out. Echoes a gas-sensing climbing-turn flight segment.
inline Trajectory make_climbing_turn_log(double duration = 60.0, double dt = 0.1,
                                         double airspeed = 18.0, double turn_radius = 120.0,
                                         double climb_rate = 2.0, double gravity = 9.81) {
    using scenario_detail::smoothstep;
    const double turn_start = 10.0, turn_end = duration - 10.0;
    const double omega_turn = airspeed / turn_radius;

    Trajectory traj;
    traj.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;

    double heading = 0.0;
    Vec3 position = Vec3::Zero();
    double prev_omega = 0.0, prev_vz = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = dt * static_cast<double>(i);
        const double blend_in = smoothstep(t, turn_start, turn_start + 2.0);
        const double blend_out = 1.0 - smoothstep(t, turn_end - 2.0, turn_end);
        const double activity = std::min(blend_in, blend_out);
        const double omega = omega_turn * activity;
        const double vz = climb_rate * activity;  // up, world z decreases

        const Vec3 world_velocity(airspeed * std::cos(heading),
                                  airspeed * std::sin(heading), -vz);
        const double bank = std::atan(airspeed * omega / gravity);
        const double pitch = std::asin(std::clamp(vz / airspeed, -1.0, 1.0));
        const double roll_rate = i == 0 ? 0.0
            : (std::atan(airspeed * omega / gravity) -
               std::atan(airspeed * prev_omega / gravity)) / dt;
        const double pitch_rate = i == 0 ? 0.0 : (vz - prev_vz) / (airspeed * dt);
        traj.states.push_back(scenario_detail::kinematic_state(
            position, world_velocity, Vec3(bank, pitch, heading),
            Vec3(roll_rate, pitch_rate, omega)));

        position += world_velocity * dt;
        heading = wrap_angle(heading + omega * dt);
        prev_omega = omega;
        prev_vz = vz;
    }
    return traj;
}

// Aggressive climbing-turn target: a hover, then a vertical acceleration
// pulse beyond the platform's thrust authority while turning, then a hover
// at the new altitude. Used to exercise control saturation and recovery.
inline Trajectory make_aggressive_climb_log(double duration = 12.0, double dt = 0.1,
                                            double pulse_start = 3.0, double pulse_length = 0.7,
                                            double vertical_accel_g = 3.0,
                                            double gravity = 9.81) {
    Trajectory traj;
    traj.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround(duration / dt)) + 1;

    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        VehicleState s;
        s.position = position;
        s.velocity = velocity;  // level attitude: body frame == world frame
        traj.states.push_back(s);

        const double t = dt * static_cast<double>(i);
        Vec3 accel = Vec3::Zero();
        if (t >= pulse_start && t < pulse_start + pulse_length) {
            accel[2] = -vertical_accel_g * gravity;  // up
            accel[0] = 0.3 * gravity * std::cos(0.8 * (t - pulse_start));
            accel[1] = 0.3 * gravity * std::sin(0.8 * (t - pulse_start));
        } else if (t >= pulse_start + pulse_length && t < pulse_start + 2.0 * pulse_length) {
            accel[2] = vertical_accel_g * gravity;  // arrest the climb
            accel[0] = -0.3 * gravity;
        }
        velocity += accel * dt;
        position += velocity * dt;
    }
    return traj;
}

}  // namespace mimic
