#include <catch_amalgamated.hpp>

#include <random>

#include "mimic/types.hpp"

using namespace mimic;

namespace {

Trajectory straight_line(std::size_t n, const Vec3& start, const Vec3& step_vec, double dt = 0.1) {
    Trajectory t;
    t.dt = dt;
    for (std::size_t i = 0; i < n; ++i) {
        VehicleState s;
        s.position = start + static_cast<double>(i) * step_vec;
        t.states.push_back(s);
    }
    return t;
}

Trajectory random_trajectory(std::mt19937& rng, std::size_t n, double dt = 0.1) {
    std::uniform_real_distribution<double> pos(-50.0, 50.0);
    std::uniform_real_distribution<double> vel(-20.0, 20.0);
    std::uniform_real_distribution<double> ang(-1.4, 1.4);
    Trajectory t;
    t.dt = dt;
    for (std::size_t i = 0; i < n; ++i) {
        VehicleState s;
        s.position = Vec3(pos(rng), pos(rng), pos(rng));
        s.velocity = Vec3(vel(rng), vel(rng), vel(rng));
        s.attitude = Vec3(ang(rng), ang(rng) * 0.9, ang(rng));
        s.angular_rates = Vec3(vel(rng), vel(rng), vel(rng)) * 0.1;
        t.states.push_back(s);
    }
    return t;
}

}  // namespace

TEST_CASE("mse_per_axis on identical trajectories is zero") {
    auto a = straight_line(10, Vec3::Zero(), Vec3(1, 0, 0));
    CHECK(mse_per_axis(a, a).isZero(0.0));
}

TEST_CASE("mse_per_axis with constant 2 m x offset") {
    auto a = straight_line(8, Vec3::Zero(), Vec3(1, 2, 3));
    auto b = a;
    for (auto& s : b.states) s.position[0] += 2.0;
    const Vec3 mse = mse_per_axis(a, b);
    CHECK(mse[0] == Catch::Approx(4.0));
    CHECK(mse[1] == 0.0);
    CHECK(mse[2] == 0.0);
}

TEST_CASE("mse_per_axis three-sample hand oracle") {
    // x-errors {1, 2, 3}: mse = (1 + 4 + 9) / 3 = 14/3
    auto a = straight_line(3, Vec3::Zero(), Vec3::Zero());
    auto b = a;
    b.states[0].position[0] = 1.0;
    b.states[1].position[0] = 2.0;
    b.states[2].position[0] = 3.0;
    CHECK(mse_per_axis(a, b)[0] == Catch::Approx(14.0 / 3.0));
}

TEST_CASE("mse_per_axis rejects mismatched inputs") {
    auto a = straight_line(3, Vec3::Zero(), Vec3::Zero());
    auto b = straight_line(4, Vec3::Zero(), Vec3::Zero());
    CHECK_THROWS_AS(mse_per_axis(a, b), DimensionError);
    auto c = straight_line(3, Vec3::Zero(), Vec3::Zero(), 0.2);
    CHECK_THROWS_AS(mse_per_axis(a, c), DimensionError);
    Trajectory empty;
    empty.dt = 0.1;
    CHECK_THROWS_AS(mse_per_axis(empty, empty), DimensionError);
}

TEST_CASE("mse_per_axis is symmetric") {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto a = random_trajectory(rng, 6);
        auto b = random_trajectory(rng, 6);
        CHECK((mse_per_axis(a, b) - mse_per_axis(b, a)).norm() < 1e-12);
    }
}

TEST_CASE("loss_S_tau zero on identical trajectories") {
    auto a = straight_line(5, Vec3(1, 2, 3), Vec3(0.5, 0, 0));
    CHECK(loss_S_tau(a, a, CostWeights{}) == 0.0);
}

TEST_CASE("loss_S_tau single sample with unit errors") {
    auto a = straight_line(1, Vec3::Zero(), Vec3::Zero());
    auto b = a;
    b.states[0].position = Vec3(1, 1, 1);
    CHECK(loss_S_tau(a, b, CostWeights{}) == Catch::Approx(3.0));
}

TEST_CASE("loss_S_tau matches brute-force recomputation") {
    std::mt19937 rng(21);
    auto a = random_trajectory(rng, 5);
    auto b = random_trajectory(rng, 5);
    CostWeights w;
    std::uniform_real_distribution<double> wd(0.0, 2.0);
    for (int k = 0; k < 12; ++k) w.state_weights[k] = wd(rng);
    w.control_weight = 0.5;

    double expected = 0.0;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto va = a.states[i].as_vector();
        const auto vb = b.states[i].as_vector();
        for (int k = 0; k < 12; ++k) {
            const double d = va[k] - vb[k];
            expected += w.state_weights[k] * d * d;
        }
    }
    CHECK(loss_S_tau(a, b, w) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("loss_S_tau with default weights equals summed position mse") {
    std::mt19937 rng(33);
    auto a = random_trajectory(rng, 9);
    auto b = random_trajectory(rng, 9);
    const Vec3 mse = mse_per_axis(a, b);
    const double expected = mse.sum() * static_cast<double>(a.states.size());
    CHECK(loss_S_tau(a, b, CostWeights{}) == Catch::Approx(expected).epsilon(1e-12));
}

TEST_CASE("wrap_attitude identity and wrapping") {
    CHECK(wrap_attitude(Vec3::Zero()).angles.isZero(0.0));
    CHECK(wrap_attitude(Vec3(0, 0, 3.0 * kPi / 2.0)).angles[2] ==
          Catch::Approx(-kPi / 2.0));
}

TEST_CASE("wrap_attitude matches naive while-loop wrap") {
    auto naive = [](double a) {
        while (a >= kPi) a -= 2.0 * kPi;
        while (a < -kPi) a += 2.0 * kPi;
        return a;
    };
    const double roll = -kPi - 0.1;
    CHECK(wrap_attitude(Vec3(roll, 0, 0)).angles[0] == Catch::Approx(naive(roll)));
    CHECK(wrap_attitude(Vec3(roll, 0, 0)).angles[0] == Catch::Approx(kPi - 0.1));

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const double raw = d(rng);
        CHECK(wrap_attitude(Vec3(raw, 0, raw)).angles[0] ==
              Catch::Approx(naive(raw)).margin(1e-12));
    }
}

TEST_CASE("wrap_attitude clamps pitch and flags it") {
    const auto r = wrap_attitude(Vec3(0, 2.0, 0));
    CHECK(r.angles[1] == Catch::Approx(kPi / 2.0));
    CHECK(r.pitch_clamped);
    CHECK_FALSE(wrap_attitude(Vec3(0, 0.3, 0)).pitch_clamped);
}

TEST_CASE("wrap_attitude is idempotent") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-20.0, 20.0);
    for (int i = 0; i < 100; ++i) {
        const Vec3 raw(d(rng), d(rng), d(rng));
        const Vec3 once = wrap_attitude(raw).angles;
        const Vec3 twice = wrap_attitude(once).angles;
        CHECK((once - twice).norm() < 1e-12);
    }
}

TEST_CASE("wrap_attitude rejects non-finite input") {
    CHECK_THROWS_AS(wrap_attitude(Vec3(std::nan(""), 0, 0)), NumericError);
}

TEST_CASE("trajectory validation") {
    Trajectory t;
    t.dt = 0.0;
    CHECK_THROWS_AS(t.validate(), DimensionError);
    t.dt = 0.1;
    t.states.resize(3);
    t.controls.resize(1);
    CHECK_THROWS_AS(t.validate(), DimensionError);
    t.controls.resize(2);
    CHECK_NOTHROW(t.validate());
    t.controls.resize(3);
    CHECK_NOTHROW(t.validate());
}

TEST_CASE("body_to_world is orthonormal") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-1.4, 1.4);
    for (int i = 0; i < 50; ++i) {
        const Mat3 r = body_to_world(Vec3(d(rng), d(rng), d(rng)));
        CHECK((r * r.transpose() - Mat3::Identity()).norm() < 1e-12);
        CHECK(r.determinant() == Catch::Approx(1.0));
    }
}

TEST_CASE("euler_rate_matrix throws near pitch singularity") {
    CHECK_THROWS_AS(euler_rate_matrix(Vec3(0, kPi / 2.0 - 0.001, 0)), SingularityError);
    CHECK_NOTHROW(euler_rate_matrix(Vec3(0, 1.2, 0)));
}
