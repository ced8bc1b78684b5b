#pragma once

#include <cstdint>
#include <optional>

#include "mimic/fixedwing.hpp"
#include "mimic/multirotor.hpp"
#include "mimic/optimizer.hpp"
#include "mimic/types.hpp"

namespace mimic {

struct MpcConfig {
    double horizon = 1.0;        // s
    double control_dt = 0.1;     // s, N = horizon / control_dt decision steps
    int physics_substeps = 12;   // physics dt = control_dt / substeps
    CostWeights weights;
    double control_lower = 0.0;
    double control_upper = 1.0;
    OptimizerConfig optimizer;
    // the prediction model omits the plant's motor lag unless enabled
    bool model_includes_lag = false;

    int steps() const {
        const double n = horizon / control_dt;
        const int ni = static_cast<int>(std::llround(n));
        if (ni < 1 || std::abs(n - ni) > 1e-9)
            throw DimensionError("MpcConfig: horizon must be an integer multiple of control_dt");
        return ni;
    }

    double physics_dt() const { return control_dt / physics_substeps; }

    BoxBounds bounds() const {
        return BoxBounds::uniform(static_cast<Eigen::Index>(steps()) * 4,
                                  control_lower, control_upper);
    }

    void validate() const {
        (void)steps();
        if (physics_substeps < 1)
            throw DimensionError("MpcConfig: physics_substeps must be >= 1");
        if (!weights.valid())
            throw DimensionError("MpcConfig: weights must be non-negative");
        optimizer.validate();
    }

    static MpcConfig from_config(const Config& cfg) {
        MpcConfig c;
        c.horizon = cfg.get_double("horizon", c.horizon);
        c.control_dt = cfg.get_double("control_dt", c.control_dt);
        c.physics_substeps = cfg.get_int("physics_substeps", c.physics_substeps);
        c.weights.control_weight = cfg.get_double("control_weight", c.weights.control_weight);
        if (cfg.has("state_weights")) {
            std::istringstream in(cfg.require_string("state_weights"));
            for (int k = 0; k < 12; ++k)
                if (!(in >> c.weights.state_weights[k]))
                    throw ParseError("MpcConfig: state_weights needs 12 values");
        }
        c.control_lower = cfg.get_double("control_lower", c.control_lower);
        c.control_upper = cfg.get_double("control_upper", c.control_upper);
        c.optimizer = OptimizerConfig::from_config(cfg);
        c.model_includes_lag = cfg.get_bool("model_includes_lag", c.model_includes_lag);
        c.validate();
        return c;
    }
};

struct PlanResult {
    std::vector<ControlVector> control_sequence;   // N entries
    Trajectory predicted_platform;                 // N+1 states at control_dt
    double cost = 0.0;
    int optimizer_iterations = 0;
    bool converged = false;
    std::vector<std::uint8_t> saturated_channels;  // bit i set: channel i at a bound
};

inline constexpr double kSaturationTolerance = 1e-9;

namespace mpc_detail {

inline std::vector<ControlVector> unflatten(const VecX& u_flat, int steps) {
    std::vector<ControlVector> seq;
    seq.reserve(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t)
        seq.push_back(ControlVector::multirotor(u_flat.segment<4>(4 * t)));
    return seq;
}

inline VecX flatten(const std::vector<ControlVector>& seq) {
    VecX u(static_cast<Eigen::Index>(seq.size()) * 4);
    for (std::size_t t = 0; t < seq.size(); ++t)
        u.segment<4>(4 * static_cast<Eigen::Index>(t)) = seq[t].channels;
    return u;
}

// Zero-order-hold rollout of the prediction model; N+1 states at control_dt.
inline Trajectory predict(const VecX& u_flat, const VehicleState& start,
                          const MultiRotorParams& params, const MpcConfig& cfg,
                          const MotorState& motors0) {
    const int n = cfg.steps();
    const double h = cfg.physics_dt();
    Trajectory traj;
    traj.dt = cfg.control_dt;
    traj.states.reserve(static_cast<std::size_t>(n) + 1);
    traj.states.push_back(start);
    VehicleState s = start;
    MotorState motors = motors0;
    for (int t = 0; t < n; ++t) {
        const ControlVector u = ControlVector::multirotor(u_flat.segment<4>(4 * t));
        for (int k = 0; k < cfg.physics_substeps; ++k) {
            motors = cfg.model_includes_lag
                         ? apply_lag(motors, u, h, params.lag_time_constant)
                         : MotorState{u.channels};
            s = step(s, motors, params, h);
        }
        traj.states.push_back(s);
        traj.controls.push_back(u);
    }
    return traj;
}

}  // namespace mpc_detail

// Horizon cost: per-control-step weighted squared state error against the
// target trajectory plus the quadratic control penalty.
inline double horizon_cost(const VecX& u_flat, const VehicleState& platform_state,
                           const Trajectory& target_traj, const MultiRotorParams& params,
                           const MpcConfig& cfg, const MotorState& motors0 = {}) {
    const int n = cfg.steps();
    if (u_flat.size() != 4 * n)
        throw DimensionError("horizon_cost: control vector has wrong size");
    if (static_cast<int>(target_traj.states.size()) < n + 1)
        throw DimensionError("horizon_cost: target trajectory shorter than horizon");

    const Trajectory pred =
        mpc_detail::predict(u_flat, platform_state, params, cfg, motors0);
    double cost = 0.0;
    for (int t = 1; t <= n; ++t) {
        const Eigen::Matrix<double, 12, 1> d =
            pred.states[static_cast<std::size_t>(t)].as_vector() -
            target_traj.states[static_cast<std::size_t>(t)].as_vector();
        cost += (cfg.weights.state_weights.array() * d.array().square()).sum();
    }
    cost += cfg.weights.control_weight * u_flat.squaredNorm();
    return cost;
}

// Shift the previous solution one control step, duplicating the final step.
inline std::vector<ControlVector> shift_warm_start(const std::vector<ControlVector>& prev) {
    if (prev.empty()) return prev;
    std::vector<ControlVector> shifted(prev.begin() + 1, prev.end());
    shifted.push_back(prev.back());
    return shifted;
}

inline PlanResult plan(const VehicleState& platform_state, const Trajectory& target_traj,
                       const std::vector<ControlVector>& warm_start,
                       const MultiRotorParams& params, const MpcConfig& cfg,
                       const MotorState& motors0 = {}) {
    const int n = cfg.steps();
    VecX u0 = VecX::Zero(4 * n);  // cold start: all zeros
    if (!warm_start.empty()) {
        if (static_cast<int>(warm_start.size()) != n)
            throw DimensionError("plan: warm start length mismatch");
        u0 = mpc_detail::flatten(warm_start);
    }

    const BoxBounds bounds = cfg.bounds();
    auto objective = [&](const VecX& u) -> double {
        try {
            return horizon_cost(u, platform_state, target_traj, params, cfg, motors0);
        } catch (const SingularityError&) {
            return std::numeric_limits<double>::infinity();
        } catch (const NumericError&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    // a shifted warm start can roll out through the attitude singularity;
    // fall back to the cold start before degrading
    if (!warm_start.empty() && !std::isfinite(objective(u0))) u0.setZero();

    // the controller degrades gracefully on numeric failure: best-so-far
    // sequence with converged=false rather than aborting
    MinimizeResult opt;
    try {
        opt = minimize(objective, u0, bounds, cfg.optimizer);
    } catch (const NumericError&) {
        opt.x_star = bounds.project(u0);
        opt.j_star = std::numeric_limits<double>::infinity();
        opt.converged = false;
        opt.numeric_failure = true;
    }

    PlanResult result;
    result.control_sequence = mpc_detail::unflatten(opt.x_star, n);
    result.cost = opt.j_star;
    result.optimizer_iterations = opt.iterations;
    result.converged = opt.converged && !opt.numeric_failure;
    try {
        result.predicted_platform =
            mpc_detail::predict(opt.x_star, platform_state, params, cfg, motors0);
    } catch (const SingularityError&) {
        result.predicted_platform.dt = cfg.control_dt;
        result.predicted_platform.states.assign(1, platform_state);
    }
    result.saturated_channels.resize(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < n; ++t) {
        for (int i = 0; i < 4; ++i) {
            const double v = opt.x_star[4 * t + i];
            if (v - cfg.control_lower <= kSaturationTolerance ||
                cfg.control_upper - v <= kSaturationTolerance)
                result.saturated_channels[static_cast<std::size_t>(t)] |=
                    static_cast<std::uint8_t>(1u << i);
        }
    }
    return result;
}

// Receding-horizon controller: plans against the target source at each call,
// applies the first control, and keeps the shifted solution as the next
// warm start. One instance per control loop.
class MimicController {
public:
    MimicController(MultiRotorParams params, MpcConfig cfg)
        : params_(std::move(params)), cfg_(std::move(cfg)) {
        cfg_.validate();
    }

    const MpcConfig& config() const { return cfg_; }
    const MultiRotorParams& params() const { return params_; }

    void reset() { warm_start_.clear(); }

    std::pair<ControlVector, PlanResult> control_step(const VehicleState& platform_state,
                                                      const TargetSource& target, double now,
                                                      const MotorState& motors0 = {}) {
        const Trajectory target_traj =
            target.rollout(now, cfg_.horizon, cfg_.control_dt);
        PlanResult result =
            plan(platform_state, target_traj, warm_start_, params_, cfg_, motors0);
        warm_start_ = shift_warm_start(result.control_sequence);
        return {result.control_sequence.front(), std::move(result)};
    }

private:
    MultiRotorParams params_;
    MpcConfig cfg_;
    std::vector<ControlVector> warm_start_;
};

}  // namespace mimic
