#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mimic/config.hpp"
#include "mimic/csv_log.hpp"

using namespace mimic;

namespace {

Trajectory random_trajectory(std::mt19937& rng, std::size_t n, bool with_controls) {
    std::uniform_real_distribution<double> d(-100.0, 100.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    Trajectory t;
    t.dt = 0.1;
    t.start_time = 2.5;
    for (std::size_t i = 0; i < n; ++i) {
        VehicleState s;
        s.position = Vec3(d(rng), d(rng), d(rng));
        s.velocity = Vec3(d(rng), d(rng), d(rng)) * 0.1;
        s.attitude = Vec3(u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5);
        s.angular_rates = Vec3(d(rng), d(rng), d(rng)) * 0.01;
        t.states.push_back(s);
        if (with_controls)
            t.controls.push_back(
                ControlVector::multirotor(Vec4(u01(rng), u01(rng), u01(rng), u01(rng))));
    }
    return t;
}

}  // namespace

TEST_CASE("csv round trip preserves trajectories") {
    std::mt19937 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const bool with_controls = trial % 2 == 0;
        const Trajectory t = random_trajectory(rng, 20, with_controls);
        std::stringstream ss;
        save_log(t, ss);
        const Trajectory back = load_log(ss, "roundtrip");
        REQUIRE(back.states.size() == t.states.size());
        CHECK(std::abs(back.dt - t.dt) < 1e-12);
        CHECK(std::abs(back.start_time - t.start_time) < 1e-12);
        for (std::size_t i = 0; i < t.states.size(); ++i) {
            CHECK((back.states[i].as_vector() - t.states[i].as_vector()).norm() < 1e-12);
            if (with_controls)
                CHECK((back.controls[i].channels - t.controls[i].channels).norm() < 1e-12);
        }
    }
}

TEST_CASE("csv NaN reported with line number") {
    std::string text = "t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r\n";
    for (int i = 0; i < 10; ++i) {
        std::string row = std::to_string(0.1 * i);
        for (int k = 0; k < 12; ++k) row += i == 5 && k == 3 ? ",nan" : ",0";
        text += row + "\n";
    }
    // NaN sits on file line 7 (header is line 1)
    std::stringstream ss(text);
    try {
        load_log(ss, "nancase");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("line 7") != std::string::npos);
    }
}

TEST_CASE("csv rejects non-uniform dt") {
    std::string text = "t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r\n";
    const double times[] = {0.0, 0.1, 0.2, 0.35};
    for (double t : times) {
        text += std::to_string(t);
        for (int k = 0; k < 12; ++k) text += ",0";
        text += "\n";
    }
    std::stringstream ss(text);
    CHECK_THROWS_AS(load_log(ss, "nonuniform"), ParseError);
}

TEST_CASE("csv rejects malformed rows") {
    std::stringstream missing("t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r\n0,1,2\n");
    CHECK_THROWS_AS(load_log(missing, "short-row"), ParseError);
    std::stringstream garbage("t,x,y,z,u,v,w,roll,pitch,yaw,p,q,r\n0,a,0,0,0,0,0,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(load_log(garbage, "garbage"), ParseError);
    std::stringstream empty("");
    CHECK_THROWS_AS(load_log(empty, "empty"), ParseError);
}

TEST_CASE("60 s log at dt 0.1 has 601 rows") {
    Trajectory t;
    t.dt = 0.1;
    t.states.resize(601);
    std::stringstream ss;
    save_log(t, ss);
    std::string line;
    int rows = -1;  // header
    while (std::getline(ss, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 601);
}

TEST_CASE("config parses scalars, vectors, booleans and comments") {
    const auto cfg = Config::from_string(
        "mass = 2.5  # kg\n"
        "\n"
        "inertia_diag = 0.1 0.2 0.3\n"
        "lag_enabled = true\n"
        "name = hover-test\n");
    CHECK(cfg.get_double("mass", 0.0) == 2.5);
    CHECK((cfg.get_vec3("inertia_diag", Vec3::Zero()) - Vec3(0.1, 0.2, 0.3)).norm() == 0.0);
    CHECK(cfg.get_bool("lag_enabled", false));
    CHECK(cfg.get_string("name", "") == "hover-test");
    CHECK(cfg.get_double("missing", 7.0) == 7.0);
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(Config::from_string("just words\n"), ParseError);
    CHECK_THROWS_AS(Config::from_string("= 3\n"), ParseError);
    const auto cfg = Config::from_string("mass = heavy\n");
    CHECK_THROWS_AS(cfg.get_double("mass", 0.0), ParseError);
    CHECK_THROWS_AS(cfg.require_string("absent"), ParseError);
}
