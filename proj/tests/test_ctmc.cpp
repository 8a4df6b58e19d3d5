#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gjsq/ctmc.hpp"
#include "gjsq/sqa.hpp"

using namespace gjsq;

namespace {

int idx(int q1, int q2, int K) { return q1 * (K + 1) + q2; }

}  // namespace

TEST_SUITE("ctmc") {

TEST_CASE("default truncation") {
    CHECK(default_truncation(0.5) == 200);
    CHECK(default_truncation(0.9) == 400);
    CHECK(default_truncation(0.95) == 800);
}

TEST_CASE("generator shape and row sums") {
    SystemConfig config = canonical_config(2, 0.7);
    CHECK_THROWS_AS(build_generator(config, 1), std::invalid_argument);
    SystemConfig one;
    one.rates = {1.0};
    one.lambda = 0.5;
    CHECK_THROWS_AS(build_generator(one, 10), std::invalid_argument);

    int K = 12;
    CtmcModel model = build_generator(config, K);
    int n = (K + 1) * (K + 1);
    REQUIRE(model.Q.rows() == n);
    REQUIRE(model.Q.cols() == n);

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    Eigen::VectorXd row_sums = model.Q * ones;
    CHECK(row_sums.cwiseAbs().maxCoeff() < 1e-9);

    Eigen::MatrixXd dense = Eigen::MatrixXd(model.Q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) CHECK(dense(i, j) >= 0.0);
}

TEST_CASE("generator spot transitions") {
    int K = 8;
    double lambda = 2.1;
    SystemConfig config = canonical_config(2, 0.7);
    CtmcModel model = build_generator(config, K);
    Eigen::MatrixXd Q = Eigen::MatrixXd(model.Q);

    // Empty system: (0+1)/1 = 1 > (0+1)/2, all arrivals join server 2.
    CHECK(Q(idx(0, 0, K), idx(0, 1, K)) == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(Q(idx(0, 0, K), idx(1, 0, K)) == doctest::Approx(0.0));

    // (0,1): indices tie at 1, uniform split by default.
    CHECK(Q(idx(0, 1, K), idx(1, 1, K)) == doctest::Approx(0.5 * lambda).epsilon(1e-12));
    CHECK(Q(idx(0, 1, K), idx(0, 2, K)) == doctest::Approx(0.5 * lambda).epsilon(1e-12));

    // Departures: rate 1 from server 1, rate 2 from server 2.
    CHECK(Q(idx(3, 2, K), idx(2, 2, K)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Q(idx(3, 2, K), idx(3, 1, K)) == doctest::Approx(2.0).epsilon(1e-12));

    // tie_prob reweights the tied split.
    SystemConfig biased = config;
    biased.tie_prob = {0.3, 0.7};
    Eigen::MatrixXd Qb = Eigen::MatrixXd(build_generator(biased, K).Q);
    CHECK(Qb(idx(0, 1, K), idx(1, 1, K)) == doctest::Approx(0.3 * lambda).epsilon(1e-12));
    CHECK(Qb(idx(0, 1, K), idx(0, 2, K)) == doctest::Approx(0.7 * lambda).epsilon(1e-12));

    SystemConfig all_first = config;
    all_first.tie_prob = {1.0, 0.0};
    Eigen::MatrixXd Qf = Eigen::MatrixXd(build_generator(all_first, K).Q);
    CHECK(Qf(idx(0, 1, K), idx(1, 1, K)) == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(Qf(idx(0, 1, K), idx(0, 2, K)) == doctest::Approx(0.0));

    // Reflecting corner: arrivals at (K, K) are dropped, only departures out.
    CHECK(Q(idx(K, K, K), idx(K, K - 1, K)) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(Q(idx(K, K, K), idx(K - 1, K, K)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(Q(idx(K, K, K), idx(K, K, K)) == doctest::Approx(-3.0).epsilon(1e-12));
}

TEST_CASE("zero arrivals concentrate at the origin") {
    SystemConfig config = canonical_config(2, 0.0);
    StationaryResult dist = oracle_solve(config, 4);
    CHECK(dist.pi(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist.pi.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("s = 1 stationary law is exchangeable") {
    SystemConfig config = canonical_config(1, 0.6);
    StationaryResult dist = oracle_solve(config, 60);
    for (int a = 0; a <= 60; a += 7)
        for (int b = 0; b <= 60; b += 7)
            CHECK(dist.pi(a, b) == doctest::Approx(dist.pi(b, a)).epsilon(1e-9));
}

TEST_CASE("frozen oracle moments at (s, rho) = (2, 0.7)") {
    SystemConfig config = canonical_config(2, 0.7);
    StationaryResult dist = oracle_solve(config, 200);
    CHECK(dist.residual < 1e-12);
    CHECK(dist.tail_mass < 1e-10);
    auto marg = oracle_marginals(dist, config);
    CHECK(marg[0].mean == doctest::Approx(0.9216074197).epsilon(1e-6));
    CHECK(marg[1].mean == doctest::Approx(2.0258053929).epsilon(1e-6));
    // The published simulation estimate for this cell is 0.9232 / 2.0316.
    CHECK(std::abs(marg[0].mean - 0.9232) < 0.005);
    CHECK(std::abs(marg[1].mean - 2.0316) < 0.02);

    // Unconditional rate identity: lambda_bar_1 + lambda_bar_2 = lambda.
    CHECK(marg[0].lambda_bar + marg[1].lambda_bar ==
          doctest::Approx(config.lambda).epsilon(1e-10));
}

TEST_CASE("truncation insensitivity at the default K") {
    SystemConfig config = canonical_config(2, 0.7);
    auto m200 = oracle_marginals(oracle_solve(config, 200), config);
    auto m240 = oracle_marginals(oracle_solve(config, 240), config);
    CHECK(std::abs(m200[1].mean - m240[1].mean) < 1e-8);
    CHECK(std::abs(m200[0].mean - m240[0].mean) < 1e-8);
}

TEST_CASE("oracle conditional rates: exact plateau for low server-2 states") {
    // For n <= s-2 every arrival joins server 2, so lambda_2(n) = lambda.
    SystemConfig config = canonical_config(3, 0.7);
    StationaryResult dist = oracle_solve(config, 240);
    auto profiles = oracle_conditional_rates(dist, config);
    for (int n = 0; n <= 1; ++n) {
        auto v = profiles[1].rate_at(n);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(config.lambda).epsilon(1e-12));
    }
    CHECK(profiles[1].provenance == RateProvenance::oracle);
}

TEST_CASE("deep-tail conditional rates approach the limiting values") {
    SystemConfig config = canonical_config(2, 0.7);
    StationaryResult dist = oracle_solve(config, 200);
    auto profiles = oracle_conditional_rates(dist, config);
    double alpha = std::pow(0.7, 3);
    for (int n = 14; n <= 20; ++n) {
        auto v = profiles[0].rate_at(n);
        REQUIRE(v.has_value());
        CHECK(*v == doctest::Approx(alpha).epsilon(5e-3));
    }
}

TEST_CASE("marginals satisfy the birth-death balance (level-crossing cut)") {
    SystemConfig config = canonical_config(2, 0.7);
    StationaryResult dist = oracle_solve(config, 200);
    auto profiles = oracle_conditional_rates(dist, config);
    auto marg = oracle_marginals(dist, config);
    for (int i = 0; i < 2; ++i) {
        double mu = config.rates[i];
        int m = std::min(profiles[i].contiguous_prefix(), dist.K);
        REQUIRE(m > 10);
        for (int n = 0; n + 1 < m; ++n) {
            double lhs = marg[i].pi[n] * profiles[i].rate_at(n).value();
            double rhs = marg[i].pi[n + 1] * mu;
            CHECK(std::abs(lhs - rhs) < 1e-9);
        }
    }
}

}  // TEST_SUITE
