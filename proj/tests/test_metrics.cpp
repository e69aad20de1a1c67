#include "afw/errors.hpp"
#include "afw/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace afw;
using namespace afw::metrics;

namespace {

FlightLog make_log(const std::vector<double>& roll_err, const std::vector<double>& pitch_err,
                   const std::vector<double>& xtrack) {
    FlightLog log;
    for (std::size_t i = 0; i < xtrack.size(); ++i) {
        LogRecord r;
        r.time = 0.004 * static_cast<double>(i);
        r.roll_s = 0.3 + roll_err[i];
        r.roll_m = 0.3;
        r.pitch_s = pitch_err[i];
        r.pitch_m = 0.0;
        r.xtrack = xtrack[i];
        log.records.push_back(r);
    }
    return log;
}

}  // namespace

TEST_CASE("perfect tracking gives zero metrics") {
    const auto m = compute_metrics(make_log({0, 0, 0}, {0, 0, 0}, {0, 0, 0}));
    CHECK(m.j_phi == 0.0);
    CHECK(m.j_theta == 0.0);
    CHECK(m.j_traj == 0.0);
}

TEST_CASE("hand-computed RMS values") {
    SUBCASE("constant bank error") {
        for (std::size_t n : {1u, 7u, 1000u}) {
            std::vector<double> e(n, 0.1), z(n, 0.0);
            CHECK(std::abs(compute_metrics(make_log(e, z, z)).j_phi - 0.1) <= 1e-12);
        }
    }
    SUBCASE("alternating cross-track error") {
        const auto m = compute_metrics(make_log({0, 0, 0, 0}, {0, 0, 0, 0}, {3, -3, 0, 0}));
        CHECK(std::abs(m.j_traj - std::sqrt(18.0 / 4.0)) <= 1e-12);
        CHECK(m.j_traj == doctest::Approx(2.1213).epsilon(1e-4));
    }
}

TEST_CASE("permutation invariance and exact scaling") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> n(0.0, 1.0);
    std::vector<double> a(200), b(200), c(200);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = n(rng), b[i] = n(rng), c[i] = n(rng);
    const auto base = compute_metrics(make_log(a, b, c));

    std::vector<std::size_t> idx(a.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<double> pa, pb, pc;
    for (auto i : idx) pa.push_back(a[i]), pb.push_back(b[i]), pc.push_back(c[i]);
    const auto perm = compute_metrics(make_log(pa, pb, pc));
    CHECK(perm.j_phi == doctest::Approx(base.j_phi).epsilon(1e-13));
    CHECK(perm.j_traj == doctest::Approx(base.j_traj).epsilon(1e-13));

    std::vector<double> c2 = c;
    for (auto& x : c2) x *= 4.0;
    CHECK(compute_metrics(make_log(a, b, c2)).j_traj == 4.0 * base.j_traj);
}

TEST_CASE("warm-up exclusion") {
    const auto log = make_log({1, 1, 0, 0}, {0, 0, 0, 0}, {0, 0, 0, 0});
    CHECK(compute_metrics(log, 0.008).j_phi == 0.0);
    CHECK_THROWS_AS(compute_metrics(log, 1.0), InputError);
    CHECK_THROWS_AS(compute_metrics(log, -1.0), InputError);
}

TEST_CASE("invalid logs") {
    CHECK_THROWS_AS(compute_metrics(FlightLog{}), InputError);
    auto log = make_log({0, 0}, {0, 0}, {0, 0});
    log.records[1].time = log.records[0].time;
    CHECK_THROWS_AS(compute_metrics(log), InputError);
}

TEST_CASE("normalization") {
    const MetricReport b{0.1, 0.1, 2.0};
    const auto self = normalize(b, b);
    CHECK(self.j_phi == 1.0);
    CHECK(self.j_theta == 1.0);
    CHECK(self.j_traj == 1.0);
    const auto twice = normalize({0.2, 0.2, 4.0}, b);
    CHECK(twice.j_phi == 2.0);
    CHECK(twice.j_traj == 2.0);
    const auto mixed = normalize({0.2, 0.1, 4.0}, b);
    CHECK(mixed.j_phi == 2.0);
    CHECK(mixed.j_theta == 1.0);
    CHECK(mixed.j_traj == 2.0);
    CHECK_THROWS_AS(normalize(b, {0.0, 0.1, 1.0}), InputError);
}

TEST_CASE("CSV round trip") {
    FlightLog log = make_log({0.1, -0.2}, {0.01, 0.02}, {1.5, 2.5});
    log.records[1].theta[3][1] = 1.0 / 3.0;
    log.records[1].position = Vec3(1, -2, -100);
    log.records[1].target_index = 3;

    std::stringstream ss;
    write_csv(ss, log);
    const std::string text = ss.str();
    const std::string header = text.substr(0, text.find('\n'));
    CHECK(header.rfind("time_s,roll_sp_rad,roll_rad", 0) == 0);
    CHECK(header.find("theta_pitch_rate_ki_1") != std::string::npos);
    CHECK(std::count(header.begin(), header.end(), ',') + 1 == static_cast<long>(csv_columns().size()));
    for (const auto& c : csv_columns()) {
        const auto us = c.rfind('_');
        CHECK(us != std::string::npos);
    }

    std::stringstream in(text);
    const auto back = read_csv(in);
    REQUIRE(back.size() == 2);
    CHECK(back.records[1].theta[3][1] == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(back.records[1].position == Vec3(1, -2, -100));
    CHECK(back.records[1].target_index == 3);
    CHECK(compute_metrics(back).j_traj == doctest::Approx(compute_metrics(log).j_traj).epsilon(1e-9));
}

TEST_CASE("CSV reader rejects malformed input") {
    std::stringstream empty;
    CHECK_THROWS_AS(read_csv(empty), InputError);
    std::stringstream missing("time_s,roll_rad\n0,0\n");
    CHECK_THROWS_AS(read_csv(missing), InputError);
    std::stringstream bad("time_s,roll_sp_rad,roll_rad,pitch_sp_rad,pitch_rad,xtrack_m\n0,0,x,0,0,0\n");
    CHECK_THROWS_AS(read_csv(bad), InputError);
    std::stringstream ragged("time_s,roll_sp_rad,roll_rad,pitch_sp_rad,pitch_rad,xtrack_m\n0,0,0\n");
    CHECK_THROWS_AS(read_csv(ragged), InputError);
}
