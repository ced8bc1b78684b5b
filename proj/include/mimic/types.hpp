#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mimic {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Pitch values beyond +/-(pi/2 - kPitchSingularityBand) are rejected by the
// Euler-rate kinematics.
inline constexpr double kPitchSingularityBand = 0.01;

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct KindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Wrap an angle into [-pi, pi).
inline double wrap_angle(double a) {
    double w = std::fmod(a + kPi, 2.0 * kPi);
    if (w < 0.0) w += 2.0 * kPi;
    return w - kPi;
}

struct AttitudeWrapResult {
    Vec3 angles;
    bool pitch_clamped = false;
};

// Roll/yaw wrapped into [-pi, pi); pitch clamped into [-pi/2, pi/2] with a
// flag when clamping occurred.
inline AttitudeWrapResult wrap_attitude(const Vec3& raw) {
    if (!raw.allFinite()) throw NumericError("wrap_attitude: non-finite input");
    AttitudeWrapResult r;
    r.angles[0] = wrap_angle(raw[0]);
    r.angles[2] = wrap_angle(raw[2]);
    double pitch = raw[1];
    if (pitch > kPi / 2.0) {
        pitch = kPi / 2.0;
        r.pitch_clamped = true;
    } else if (pitch < -kPi / 2.0) {
        pitch = -kPi / 2.0;
        r.pitch_clamped = true;
    }
    r.angles[1] = pitch;
    return r;
}

// 12-state rigid body: world NED position, body-frame linear velocity,
// Euler attitude (roll, pitch, yaw), body-frame angular rates.
struct VehicleState {
    Vec3 position = Vec3::Zero();        // m, world frame (N, E, D)
    Vec3 velocity = Vec3::Zero();        // m/s, body frame (u, v, w)
    Vec3 attitude = Vec3::Zero();        // rad (roll, pitch, yaw)
    Vec3 angular_rates = Vec3::Zero();   // rad/s, body frame (p, q, r)

    bool finite() const {
        return position.allFinite() && velocity.allFinite() &&
               attitude.allFinite() && angular_rates.allFinite();
    }

    Eigen::Matrix<double, 12, 1> as_vector() const {
        Eigen::Matrix<double, 12, 1> v;
        v << position, velocity, attitude, angular_rates;
        return v;
    }

    static VehicleState from_vector(const Eigen::Matrix<double, 12, 1>& v) {
        VehicleState s;
        s.position = v.segment<3>(0);
        s.velocity = v.segment<3>(3);
        s.attitude = v.segment<3>(6);
        s.angular_rates = v.segment<3>(9);
        return s;
    }
};

// Body-to-world rotation for Z-Y-X Euler angles.
inline Mat3 body_to_world(const Vec3& attitude) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]), sth = std::sin(attitude[1]);
    const double cpsi = std::cos(attitude[2]), spsi = std::sin(attitude[2]);
    Mat3 r;
    r << cth * cpsi, sphi * sth * cpsi - cphi * spsi, cphi * sth * cpsi + sphi * spsi,
         cth * spsi, sphi * sth * spsi + cphi * cpsi, cphi * sth * spsi - sphi * cpsi,
         -sth,       sphi * cth,                      cphi * cth;
    return r;
}

// Maps body rates (p, q, r) to Euler angle rates. Singular at pitch +/- pi/2.
inline Mat3 euler_rate_matrix(const Vec3& attitude) {
    const double cphi = std::cos(attitude[0]), sphi = std::sin(attitude[0]);
    const double cth = std::cos(attitude[1]);
    if (std::abs(attitude[1]) > kPi / 2.0 - kPitchSingularityBand)
        throw SingularityError("euler_rate_matrix: pitch within singularity band");
    const double tth = std::tan(attitude[1]);
    Mat3 e;
    e << 1.0, sphi * tth, cphi * tth,
         0.0, cphi,       -sphi,
         0.0, sphi / cth, cphi / cth;
    return e;
}

enum class ControlKind { MultiRotor, FixedWing };

// Normalized 4-channel command. MultiRotor: per-motor thrust fractions in
// [0,1]. FixedWing: [ail, elev, tla, rud], surfaces in [-1,1], tla in [0,1].
struct ControlVector {
    Vec4 channels = Vec4::Zero();
    ControlKind kind = ControlKind::MultiRotor;

    static ControlVector multirotor(const Vec4& c) { return {c, ControlKind::MultiRotor}; }
    static ControlVector fixedwing(const Vec4& c) { return {c, ControlKind::FixedWing}; }

    bool within_bounds(double tol = 0.0) const {
        if (kind == ControlKind::MultiRotor) {
            return (channels.array() >= -tol).all() && (channels.array() <= 1.0 + tol).all();
        }
        return channels[0] >= -1.0 - tol && channels[0] <= 1.0 + tol &&
               channels[1] >= -1.0 - tol && channels[1] <= 1.0 + tol &&
               channels[2] >= -tol && channels[2] <= 1.0 + tol &&
               channels[3] >= -1.0 - tol && channels[3] <= 1.0 + tol;
    }
};

// Uniformly sampled sequence of states and/or controls.
struct Trajectory {
    double dt = 0.0;
    double start_time = 0.0;
    std::vector<VehicleState> states;
    std::vector<ControlVector> controls;

    std::size_t size() const { return states.size(); }
    double time_at(std::size_t i) const { return start_time + dt * static_cast<double>(i); }
    double end_time() const {
        return states.empty() ? start_time : time_at(states.size() - 1);
    }

    void validate() const {
        if (dt <= 0.0) throw DimensionError("Trajectory: dt must be positive");
        if (!states.empty() && !controls.empty()) {
            const auto ns = states.size(), nc = controls.size();
            if (nc != ns && nc + 1 != ns)
                throw DimensionError("Trajectory: controls length must be len(states) or len(states)-1");
        }
    }
};

// Per-state quadratic penalty plus a shared control-channel penalty.
struct CostWeights {
    Eigen::Matrix<double, 12, 1> state_weights;
    double control_weight = 0.5;

    CostWeights() {
        state_weights.setZero();
        state_weights[0] = state_weights[1] = state_weights[2] = 1.0;
    }

    bool valid() const {
        return (state_weights.array() >= 0.0).all() && control_weight >= 0.0;
    }
};

namespace detail {
inline void check_comparable(const Trajectory& a, const Trajectory& b) {
    if (a.states.empty() || a.states.size() != b.states.size())
        throw DimensionError("trajectory comparison: length mismatch or empty");
    if (std::abs(a.dt - b.dt) > 1e-12)
        throw DimensionError("trajectory comparison: dt mismatch");
}
}  // namespace detail

// Mean squared position error per world axis, in m^2.
inline Vec3 mse_per_axis(const Trajectory& a, const Trajectory& b) {
    detail::check_comparable(a, b);
    Vec3 acc = Vec3::Zero();
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        const Vec3 d = a.states[i].position - b.states[i].position;
        acc += d.cwiseProduct(d);
    }
    return acc / static_cast<double>(a.states.size());
}

// Trajectory loss: sum over samples of the weighted squared state error.
inline double loss_S_tau(const Trajectory& a, const Trajectory& b, const CostWeights& w) {
    detail::check_comparable(a, b);
    double total = 0.0;
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        const Eigen::Matrix<double, 12, 1> d =
            a.states[i].as_vector() - b.states[i].as_vector();
        total += (w.state_weights.array() * d.array().square()).sum();
    }
    return total;
}

}  // namespace mimic
