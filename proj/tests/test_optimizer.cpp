#include <catch_amalgamated.hpp>

#include <random>

#include "mimic/optimizer.hpp"

using namespace mimic;

TEST_CASE("1-d quadratic with interior minimum") {
    auto f = [](const VecX& u) { return (u[0] - 0.3) * (u[0] - 0.3); };
    VecX x0(1);
    x0 << 0.9;
    const auto r = minimize(f, x0, BoxBounds::uniform(1, 0.0, 1.0), OptimizerConfig{});
    CHECK(r.converged);
    CHECK(std::abs(r.x_star[0] - 0.3) < 1e-6);
}

TEST_CASE("1-d quadratic clipped at the active bound") {
    auto f = [](const VecX& u) { return (u[0] - 2.0) * (u[0] - 2.0); };
    VecX x0(1);
    x0 << 0.1;
    const auto r = minimize(f, x0, BoxBounds::uniform(1, 0.0, 1.0), OptimizerConfig{});
    CHECK(r.x_star[0] == 1.0);
}

TEST_CASE("4-d separable quadratic matches per-coordinate clipping") {
    const Vec4 c(0.2, 0.8, 1.5, -0.3);
    auto f = [&](const VecX& u) { return (u - VecX(c)).squaredNorm(); };
    const auto r = minimize(f, VecX::Constant(4, 0.5), BoxBounds::uniform(4, 0.0, 1.0),
                            OptimizerConfig{});
    const Vec4 expected(0.2, 0.8, 1.0, 0.0);
    CHECK((r.x_star - VecX(expected)).lpNorm<Eigen::Infinity>() < 1e-5);
}

TEST_CASE("random separable bounded quadratics match the clipping oracle") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> center(-0.5, 1.5);
    std::uniform_real_distribution<double> scale(0.5, 4.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 40;
        VecX c(n), a(n);
        for (int i = 0; i < n; ++i) {
            c[i] = center(rng);
            a[i] = scale(rng);
        }
        auto f = [&](const VecX& u) {
            return (a.array() * (u - c).array().square()).sum();
        };
        const auto bounds = BoxBounds::uniform(n, 0.0, 1.0);
        const auto r = minimize(f, VecX::Constant(n, 0.5), bounds, OptimizerConfig{});
        const VecX oracle = bounds.project(c);
        CHECK((r.x_star - oracle).lpNorm<Eigen::Infinity>() < 1e-5);
    }
}

TEST_CASE("iterates stay feasible and cost is monotone") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    const int n = 12;
    VecX c(n);
    for (int i = 0; i < n; ++i) c[i] = d(rng);
    const auto bounds = BoxBounds::uniform(n, 0.0, 1.0);

    std::vector<double> costs;
    std::vector<VecX> points;
    auto f = [&](const VecX& u) {
        points.push_back(u);
        return (u - c).squaredNorm() + 0.3 * std::sin(u.sum());
    };
    VecX x0(n);
    for (int i = 0; i < n; ++i) x0[i] = 0.5 + 0.2 * std::sin(i * 1.7);
    const auto r = minimize(f, x0, bounds, OptimizerConfig{});
    CHECK(r.j_star <= (bounds.project(x0) - c).squaredNorm() +
                          0.3 * std::sin(bounds.project(x0).sum()) + 1e-12);
    for (const auto& p : points) {
        CHECK((p.array() >= -1e-6 - 1e-6).all());
        CHECK((p.array() <= 1.0 + 2e-6).all());
    }
}

TEST_CASE("non-finite objective at the start throws") {
    auto f = [](const VecX&) { return std::numeric_limits<double>::quiet_NaN(); };
    CHECK_THROWS_AS(
        minimize(f, VecX::Constant(2, 0.5), BoxBounds::uniform(2, 0.0, 1.0), OptimizerConfig{}),
        NumericError);
}

TEST_CASE("non-finite region is avoided by the line search") {
    // objective blows up for u[0] > 0.7 but has its constrained optimum at 0.7
    auto f = [](const VecX& u) {
        if (u[0] > 0.7) return std::numeric_limits<double>::infinity();
        return (u[0] - 2.0) * (u[0] - 2.0);
    };
    VecX x0(1);
    x0 << 0.1;
    const auto r = minimize(f, x0, BoxBounds::uniform(1, 0.0, 1.0), OptimizerConfig{});
    CHECK(r.x_star[0] <= 0.7);
    CHECK(r.x_star[0] > 0.69);
}

TEST_CASE("finite_diff_gradient of a linear function is all ones") {
    auto f = [](const VecX& u) { return u.sum(); };
    const auto g = finite_diff_gradient(f, VecX::Constant(5, 0.4), 1e-6,
                                        BoxBounds::uniform(5, 0.0, 1.0));
    CHECK((g - VecX::Ones(5)).lpNorm<Eigen::Infinity>() < 1e-8);
}

TEST_CASE("finite_diff_gradient of a quadratic matches 2x") {
    VecX x(3);
    x << 0.2, 0.5, 0.8;
    auto f = [](const VecX& u) { return u.squaredNorm(); };
    const auto g = finite_diff_gradient(f, x, 1e-6, BoxBounds::uniform(3, 0.0, 1.0));
    CHECK((g - 2.0 * x).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("finite_diff_gradient falls back to one-sided at bounds") {
    VecX x(2);
    x << 0.0, 1.0;
    auto f = [](const VecX& u) { return 3.0 * u[0] - 2.0 * u[1]; };
    const auto g = finite_diff_gradient(f, x, 1e-6, BoxBounds::uniform(2, 0.0, 1.0));
    CHECK(std::abs(g[0] - 3.0) < 1e-6);
    CHECK(std::abs(g[1] + 2.0) < 1e-6);
}

TEST_CASE("finite_diff_gradient matches a richardson-extrapolated reference") {
    // smooth nonquadratic objective standing in for a rollout cost
    auto f = [](const VecX& u) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i)
            s += std::exp(0.3 * u[i]) * std::cos(1.3 * u[i] + 0.2 * i) + 0.5 * u[i] * u[i];
        return s;
    };
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> d(0.1, 0.9);
    VecX x(8);
    for (int i = 0; i < 8; ++i) x[i] = d(rng);
    const auto bounds = BoxBounds::uniform(8, 0.0, 1.0);
    const auto g = finite_diff_gradient(f, x, 1e-6, bounds);

    // richardson: combine central differences at h and h/2 for O(h^4)
    VecX ref(8);
    const double h = 1e-4;
    for (int i = 0; i < 8; ++i) {
        auto central = [&](double hh) {
            VecX xp = x, xm = x;
            xp[i] += hh;
            xm[i] -= hh;
            return (f(xp) - f(xm)) / (2.0 * hh);
        };
        ref[i] = (4.0 * central(h / 2.0) - central(h)) / 3.0;
    }
    CHECK((g - ref).norm() / ref.norm() < 1e-3);
}

TEST_CASE("minimize is deterministic") {
    auto f = [](const VecX& u) { return (u.array() - 0.3).square().sum() + std::sin(u.sum()); };
    const VecX x0 = VecX::Constant(6, 0.9);
    const auto bounds = BoxBounds::uniform(6, 0.0, 1.0);
    const auto a = minimize(f, x0, bounds, OptimizerConfig{});
    const auto b = minimize(f, x0, bounds, OptimizerConfig{});
    CHECK(a.x_star == b.x_star);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("bounds validation") {
    BoxBounds b;
    b.lower = VecX::Constant(2, 1.0);
    b.upper = VecX::Constant(2, 0.0);
    CHECK_THROWS_AS(b.validate(), DimensionError);
    b.upper = VecX::Constant(3, 2.0);
    CHECK_THROWS_AS(b.validate(), DimensionError);
}
