#pragma once

#include <algorithm>
#include <deque>
#include <functional>

#include "mimic/config.hpp"
#include "mimic/types.hpp"

namespace mimic {

using VecX = Eigen::VectorXd;
using Objective = std::function<double(const VecX&)>;

struct BoxBounds {
    VecX lower;
    VecX upper;

    static BoxBounds uniform(Eigen::Index n, double lo, double hi) {
        BoxBounds b;
        b.lower = VecX::Constant(n, lo);
        b.upper = VecX::Constant(n, hi);
        return b;
    }

    void validate() const {
        if (lower.size() != upper.size())
            throw DimensionError("BoxBounds: lower/upper size mismatch");
        if (!lower.allFinite() || !upper.allFinite())
            throw NumericError("BoxBounds: bounds must be finite");
        if ((lower.array() > upper.array()).any())
            throw DimensionError("BoxBounds: lower must not exceed upper");
    }

    VecX project(const VecX& x) const {
        return x.cwiseMax(lower).cwiseMin(upper);
    }
};

struct OptimizerConfig {
    int max_iterations = 100;
    double cost_tolerance = 1e-6;
    double step_tolerance = 1e-8;
    double fd_step = 1e-6;
    double line_search_shrink = 0.5;
    int line_search_max = 20;
    int lbfgs_memory = 8;

    void validate() const {
        if (max_iterations <= 0 || cost_tolerance <= 0.0 || step_tolerance <= 0.0 ||
            fd_step <= 0.0 || line_search_max <= 0)
            throw ParseError("OptimizerConfig: tolerances and limits must be positive");
        if (line_search_shrink <= 0.0 || line_search_shrink >= 1.0)
            throw ParseError("OptimizerConfig: line_search_shrink must lie in (0, 1)");
    }

    static OptimizerConfig from_config(const Config& cfg) {
        OptimizerConfig c;
        c.max_iterations = cfg.get_int("max_iterations", c.max_iterations);
        c.cost_tolerance = cfg.get_double("cost_tolerance", c.cost_tolerance);
        c.step_tolerance = cfg.get_double("step_tolerance", c.step_tolerance);
        c.fd_step = cfg.get_double("fd_step", c.fd_step);
        c.line_search_shrink = cfg.get_double("line_search_shrink", c.line_search_shrink);
        c.line_search_max = cfg.get_int("line_search_max", c.line_search_max);
        c.lbfgs_memory = cfg.get_int("lbfgs_memory", c.lbfgs_memory);
        c.validate();
        return c;
    }
};

struct MinimizeResult {
    VecX x_star;
    double j_star = 0.0;
    int iterations = 0;
    bool converged = false;
    bool numeric_failure = false;
};

// Central finite differences, one-sided at active bounds.
inline VecX finite_diff_gradient(const Objective& objective, const VecX& x, double fd_step,
                                 const BoxBounds& bounds) {
    const auto n = x.size();
    VecX grad(n);
    double f_center = std::numeric_limits<double>::quiet_NaN();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double hi = std::min(fd_step, bounds.upper[i] - x[i]);
        const double lo = std::min(fd_step, x[i] - bounds.lower[i]);
        double g;
        if (hi > 0.0 && lo > 0.0) {
            const double h = std::min(hi, lo);
            VecX xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            g = (objective(xp) - objective(xm)) / (2.0 * h);
        } else {
            // pinned at a bound, fall back to one-sided
            if (std::isnan(f_center)) f_center = objective(x);
            const double h = hi > 0.0 ? fd_step : -fd_step;
            VecX xs = x;
            xs[i] += h;
            g = (objective(xs) - f_center) / h;
        }
        if (!std::isfinite(g))
            throw NumericError("finite_diff_gradient: non-finite objective sample");
        grad[i] = g;
    }
    return grad;
}

namespace opt_detail {

// Two-loop L-BFGS recursion over the stored (s, y) pairs.
inline VecX lbfgs_direction(const VecX& grad, const std::deque<std::pair<VecX, VecX>>& memory) {
    VecX q = grad;
    std::vector<double> alpha(memory.size());
    std::vector<double> rho(memory.size());
    for (std::size_t i = memory.size(); i-- > 0;) {
        const auto& [s, y] = memory[i];
        rho[i] = 1.0 / y.dot(s);
        alpha[i] = rho[i] * s.dot(q);
        q -= alpha[i] * y;
    }
    if (!memory.empty()) {
        const auto& [s, y] = memory.back();
        q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < memory.size(); ++i) {
        const auto& [s, y] = memory[i];
        const double beta = rho[i] * y.dot(q);
        q += (alpha[i] - beta) * memory[i].first;
    }
    return -q;
}

}  // namespace opt_detail

// Called with each accepted iterate and its cost.
using IterationObserver = std::function<void(int, const VecX&, double)>;

// Projected quasi-Newton descent with backtracking line search. Non-finite
// objective values during the search reject the trial step. Deterministic.
inline MinimizeResult minimize(const Objective& objective, const VecX& x0,
                               const BoxBounds& bounds, const OptimizerConfig& config,
                               const IterationObserver& on_iterate = {}) {
    bounds.validate();
    config.validate();
    if (x0.size() != bounds.lower.size())
        throw DimensionError("minimize: x0 dimension does not match bounds");

    auto safe_eval = [&](const VecX& x) -> double {
        const double f = objective(x);
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    };

    VecX x = bounds.project(x0);
    double fx = objective(x);
    if (!std::isfinite(fx))
        throw NumericError("minimize: objective non-finite at start point");

    MinimizeResult result;
    result.x_star = x;
    result.j_star = fx;

    // coordinates pinned at a bound with the gradient pushing outward are
    // frozen out of the quasi-Newton subspace
    auto active_set = [&](const VecX& xx, const VecX& g) {
        Eigen::Array<bool, Eigen::Dynamic, 1> active(xx.size());
        for (Eigen::Index i = 0; i < xx.size(); ++i)
            active[i] = (xx[i] - bounds.lower[i] <= 1e-12 && g[i] > 0.0) ||
                        (bounds.upper[i] - xx[i] <= 1e-12 && g[i] < 0.0);
        return active;
    };
    auto reduce = [](const VecX& g, const Eigen::Array<bool, Eigen::Dynamic, 1>& active) {
        VecX r = g;
        for (Eigen::Index i = 0; i < g.size(); ++i)
            if (active[i]) r[i] = 0.0;
        return r;
    };

    std::deque<std::pair<VecX, VecX>> memory;
    VecX grad;
    Eigen::Array<bool, Eigen::Dynamic, 1> active;
    int iters_used = 0;

    auto refresh_gradient = [&]() -> bool {
        try {
            grad = finite_diff_gradient(objective, x, config.fd_step, bounds);
        } catch (const NumericError&) {
            result.numeric_failure = true;
            return false;
        }
        active = active_set(x, grad);
        return true;
    };

    // Quasi-Newton descent until the cost stalls, the step vanishes, or the
    // iteration budget runs out.
    auto descent_phase = [&]() {
        int small_decrease_streak = 0;
        while (iters_used < config.max_iterations) {
            result.iterations = ++iters_used;

            const VecX grad_red = reduce(grad, active);
            VecX direction = memory.empty() ? VecX(-grad_red)
                                            : opt_detail::lbfgs_direction(grad_red, memory);
            direction = reduce(direction, active);
            if (direction.dot(grad) >= 0.0) direction = -grad_red;  // not a descent direction

            // backtracking over the projected arc
            double step = 1.0;
            VecX x_new;
            double f_new = std::numeric_limits<double>::infinity();
            bool accepted = false;
            for (int ls = 0; ls < config.line_search_max; ++ls) {
                x_new = bounds.project(x + step * direction);
                f_new = safe_eval(x_new);
                const double pred = grad.dot(x_new - x);
                if (f_new < fx + 1e-4 * pred || (pred >= 0.0 && f_new < fx)) {
                    accepted = true;
                    break;
                }
                step *= config.line_search_shrink;
            }
            if (!accepted) {
                // try a plain projected-gradient step before giving up
                direction = -grad;
                step = 1.0 / std::max(1.0, grad.norm());
                for (int ls = 0; ls < config.line_search_max; ++ls) {
                    x_new = bounds.project(x + step * direction);
                    f_new = safe_eval(x_new);
                    if (f_new < fx) {
                        accepted = true;
                        break;
                    }
                    step *= config.line_search_shrink;
                }
            }
            if (!accepted) {
                result.converged = true;  // no descent available
                return;
            }

            const VecX s = x_new - x;
            const double df = fx - f_new;
            x = x_new;
            fx = f_new;
            result.x_star = x;
            result.j_star = fx;
            if (on_iterate) on_iterate(iters_used - 1, x, fx);

            // quasi-Newton steps keep improving after the first small decrease,
            // so require the cost stall to persist before stopping on it
            small_decrease_streak = df < config.cost_tolerance ? small_decrease_streak + 1 : 0;
            if (small_decrease_streak >= 3 || s.norm() < config.step_tolerance) {
                result.converged = true;
                return;
            }

            const VecX grad_prev = grad;
            const auto active_prev = active;
            if (!refresh_gradient()) return;
            if ((active != active_prev).any()) {
                memory.clear();  // curvature pairs from a different face are stale
            } else {
                const VecX y = reduce(grad, active) - reduce(grad_prev, active_prev);
                const VecX s_red = reduce(s, active);
                if (y.dot(s_red) > 1e-12 * y.norm() * s_red.norm()) {
                    memory.emplace_back(s_red, y);
                    if (static_cast<int>(memory.size()) > config.lbfgs_memory)
                        memory.pop_front();
                }
            }
        }
    };

    // Coordinate-wise quadratic polish: fit a parabola along each coordinate
    // and jump to its box-clipped vertex when that lowers the cost. Tightens
    // the scale-blind cost-stall stop; exact for separable quadratics.
    auto polish_phase = [&]() {
        const double hp = 1e-4;
        for (int sweep = 0; sweep < 8; ++sweep) {
            bool moved = false;
            const double f_sweep_start = fx;
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                if (bounds.upper[i] - bounds.lower[i] < 2.0 * hp) continue;
                const double t1 =
                    std::clamp(x[i], bounds.lower[i] + hp, bounds.upper[i] - hp);
                VecX xs = x;
                xs[i] = t1 - hp;
                const double fm = safe_eval(xs);
                xs[i] = t1 + hp;
                const double fp = safe_eval(xs);
                xs[i] = t1;
                const double f1 = t1 == x[i] ? fx : safe_eval(xs);
                const double curv = (fp - 2.0 * f1 + fm) / (hp * hp);
                const double slope = (fp - fm) / (2.0 * hp);
                if (!(curv > 0.0) || !std::isfinite(slope)) continue;
                xs[i] = std::clamp(t1 - slope / curv, bounds.lower[i], bounds.upper[i]);
                const double f_cand = safe_eval(xs);
                if (f_cand < fx) {
                    if (std::abs(xs[i] - x[i]) > config.step_tolerance) moved = true;
                    x[i] = xs[i];
                    fx = f_cand;
                }
            }
            if (!moved || (sweep > 0 && f_sweep_start - fx < 1e-3 * config.cost_tolerance))
                break;
        }
        result.x_star = x;
        result.j_star = fx;
    };

    if (!refresh_gradient()) return result;
    descent_phase();

    // Alternate polish and descent while the polish keeps finding improvement
    // the stalled quasi-Newton loop missed.
    for (int round = 0; round < 3 && !result.numeric_failure; ++round) {
        const double f_before = fx;
        polish_phase();
        if (f_before - fx <= config.cost_tolerance || iters_used >= config.max_iterations)
            break;
        memory.clear();
        if (!refresh_gradient()) break;
        descent_phase();
    }
    return result;
}

}  // namespace mimic
