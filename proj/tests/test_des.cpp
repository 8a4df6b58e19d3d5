#include <doctest.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gjsq/des.hpp"

using namespace gjsq;

namespace {

SimOptions quick(long long departures, std::uint64_t seed = 1,
                 std::uint64_t substream = 0) {
    SimOptions opt;
    opt.departures = departures;
    opt.master_seed = seed;
    opt.substream = substream;
    return opt;
}

}  // namespace

TEST_SUITE("des") {

TEST_CASE("simulation is deterministic per (seed, substream)") {
    SystemConfig config = canonical_config(2, 0.7);
    SimResult a = run_simulation(config, quick(20000, 7, 3));
    SimResult b = run_simulation(config, quick(20000, 7, 3));
    CHECK(a.t_end == b.t_end);
    CHECK(a.arrivals == b.arrivals);
    CHECK(a.server[0].busy_time == b.server[0].busy_time);
    CHECK(a.server[1].work_completed == b.server[1].work_completed);

    SimResult c = run_simulation(config, quick(20000, 7, 4));
    CHECK(a.t_end != c.t_end);
}

TEST_CASE("invalid inputs are rejected; zero arrivals return a zero result") {
    SystemConfig config = canonical_config(2, 0.7);
    SimOptions bad = quick(0);
    CHECK_THROWS_AS(run_simulation(config, bad), std::invalid_argument);
    bad = quick(100);
    bad.warmup_fraction = 1.0;
    CHECK_THROWS_AS(run_simulation(config, bad), std::invalid_argument);

    SystemConfig idle = canonical_config(2, 0.0);
    SimResult r = run_simulation(idle, quick(1000));
    CHECK(r.departures == 0);
    CHECK(r.t_end == 0.0);
    CHECK(r.arrivals == 0);
}

TEST_CASE("counter identities hold exactly") {
    SystemConfig config = canonical_config(2, 0.7);
    SimResult r = run_simulation(config, quick(50000));

    long long arrivals_total = 0;
    for (int i = 0; i < 2; ++i) {
        const ServerStats& s = r.server[i];
        long long a = std::accumulate(s.arrivals_in_state.begin(),
                                      s.arrivals_in_state.end(), 0LL);
        CHECK(a == s.arrivals);
        arrivals_total += s.arrivals;

        long long seen = std::accumulate(s.seen_in_state.begin(),
                                         s.seen_in_state.end(), 0LL);
        CHECK(seen == r.arrivals);  // every arrival observes every server

        double t = std::accumulate(s.time_in_state.begin(),
                                   s.time_in_state.end(), 0.0);
        CHECK(t == doctest::Approx(r.t_end).epsilon(1e-9));
        CHECK(s.busy_time <= r.t_end * (1.0 + 1e-12));
    }
    CHECK(arrivals_total == r.arrivals);
    long long departures_total = r.server[0].departures + r.server[1].departures;
    CHECK(departures_total == r.departures);
}

TEST_CASE("work conservation per server") {
    // Admitted work minus what is still in the system is exactly the service
    // delivered, and PS delivers at the full rate whenever busy.
    SystemConfig config = canonical_config(3, 0.8, canonical_jobsize("uni"));
    SimResult r = run_simulation(config, quick(40000));
    for (int i = 0; i < 2; ++i) {
        const ServerStats& s = r.server[i];
        double delivered = s.work_admitted - s.residual_work;
        CHECK(config.rates[i] * s.busy_time ==
              doctest::Approx(delivered).epsilon(1e-6));
        // Sizes of departed jobs never exceed the delivered service; the gap
        // is the served share of jobs still in the system.
        CHECK(s.work_completed <= delivered * (1.0 + 1e-9));
        CHECK(delivered - s.work_completed >= -1e-9);
    }
}

TEST_CASE("M/M/1-PS mean queue matches rho/(1-rho)") {
    SystemConfig config;
    config.rates = {1.0};
    config.lambda = 0.5;
    ReplicatedResult rep = replicate(config, quick(100000), 4);
    CHECK(rep.reps == 4);
    CHECK(rep.server[0].mean_q.mean == doctest::Approx(1.0).epsilon(0.08));
}

TEST_CASE("M/G/1-PS insensitivity: mean queue depends only on rho") {
    for (const char* name : {"uni", "logn"}) {
        SystemConfig config;
        config.rates = {1.0};
        config.lambda = 0.5;
        config.jobsize = canonical_jobsize(name);
        ReplicatedResult rep = replicate(config, quick(100000), 4);
        CHECK(rep.server[0].mean_q.mean == doctest::Approx(1.0).epsilon(0.12));
    }
}

TEST_CASE("PASTA: arrival snapshots match time averages") {
    SystemConfig config = canonical_config(2, 0.7);
    SimResult r = run_simulation(config, quick(200000));
    for (int i = 0; i < 2; ++i) {
        const ServerStats& s = r.server[i];
        for (int n = 0; n <= 3; ++n) {
            double seen_frac = static_cast<double>(s.seen_in_state[n]) /
                               static_cast<double>(r.arrivals);
            double time_frac = s.time_in_state[n] / r.t_end;
            CHECK(std::abs(seen_frac - time_frac) < 0.01);
        }
    }
}

TEST_CASE("flow balance: throughput equals mu times utilization") {
    SystemConfig config = canonical_config(2, 0.7);
    SimResult r = run_simulation(config, quick(200000));
    for (int i = 0; i < 2; ++i) {
        const ServerStats& s = r.server[i];
        double arrival_rate = estimate_time_average_rate(s, r.t_end);
        double busy_frac = s.busy_time / r.t_end;
        CHECK(arrival_rate ==
              doctest::Approx(config.rates[i] * busy_frac).epsilon(0.02));
    }
}

TEST_CASE("light traffic starves the slow server") {
    SystemConfig config = canonical_config(4, 0.05);
    SimResult r = run_simulation(config, quick(50000));
    double frac1 = static_cast<double>(r.server[0].arrivals) /
                   static_cast<double>(r.arrivals);
    CHECK(frac1 < 0.01);
}

TEST_CASE("warm-up resets the measured window") {
    SystemConfig config = canonical_config(2, 0.7);
    SimOptions opt = quick(50000);
    opt.warmup_fraction = 0.5;
    SimResult r = run_simulation(config, opt);
    CHECK(r.departures == 25000);

    // Identities still hold in the measured window: work carried over the
    // reset counts as admitted, so admitted - residual = rate * busy.
    for (int i = 0; i < 2; ++i) {
        const ServerStats& s = r.server[i];
        double t = std::accumulate(s.time_in_state.begin(),
                                   s.time_in_state.end(), 0.0);
        CHECK(t == doctest::Approx(r.t_end).epsilon(1e-9));
        CHECK(config.rates[i] * s.busy_time ==
              doctest::Approx(s.work_admitted - s.residual_work).epsilon(1e-6));
    }
}

TEST_CASE("estimated server-2 rates equal lambda below the crossover") {
    SystemConfig config = canonical_config(4, 0.7);
    ReplicatedResult rep = replicate(config, quick(100000), 4, true, 1.0);
    const RateProfile& rates = rep.server[1].rates;
    for (int n = 0; n <= 2; ++n) {
        auto v = rates.rate_at(n);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(config.lambda).epsilon(0.02));
    }
}

TEST_CASE("replication aggregates carry uncertainty and distributions") {
    SystemConfig config = canonical_config(2, 0.7);
    ReplicatedResult rep = replicate(config, quick(20000), 3);
    CHECK(rep.reps == 3);
    CHECK(rep.per_rep.size() == 3);
    REQUIRE(rep.server.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(rep.server[i].pi_mean.sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.server[i].mean_q.stddev >= 0.0);
        bool has_se = false;
        for (const auto& p : rep.server[i].rates.points)
            if (std::isfinite(p.stderr_est)) has_se = true;
        CHECK(has_se);
    }
    // Aggregation order is deterministic even under parallel execution.
    ReplicatedResult serial = replicate(config, quick(20000), 3, false);
    CHECK(rep.server[0].mean_q.mean ==
          doctest::Approx(serial.server[0].mean_q.mean).epsilon(1e-12));
}

}  // TEST_SUITE
