#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>

#include "gjsq/core_model.hpp"
#include "gjsq/rate_profile.hpp"

namespace gjsq {

// Exact finite oracle for the two-server exponential system: the CTMC on
// queue-length pairs (q1, q2) in [0, K]^2, state index q1 (K+1) + q2.

struct CtmcModel {
  SystemConfig config;
  int K = 0;
  Eigen::SparseMatrix<double> Q;  // generator, row-sums zero
};

// Default truncation K = max(200, ceil(40 / (1 - rho))).
int default_truncation(double rho);

// Builds the truncated generator. Arrivals routed to a server already at K
// are dropped (reflecting boundary); ties split lambda by route_weights.
// Throws std::invalid_argument unless the config has exactly two servers
// and K >= 2.
CtmcModel build_generator(const SystemConfig& config, int K);

struct StationaryResult {
  int K = 0;
  Eigen::MatrixXd pi;   // (K+1) x (K+1), pi(q1, q2)
  double residual = 0;  // || pi Q ||_inf
  double tail_mass = 0; // mass on the q1 = K or q2 = K boundary band
};

// Global balance via sparse LU on Q^T with a normalization row; iterative
// refinement until residual < 1e-12 (throws std::runtime_error otherwise).
// tail_mass is reported so callers can raise K.
StationaryResult solve_stationary(const CtmcModel& model);

// Convenience: K = 0 picks default_truncation and doubles K until
// tail_mass < 1e-10; explicit K solves once at that truncation.
StationaryResult oracle_solve(const SystemConfig& config, int K = 0);

// Conditional arrival rates lambda_i(n) = lambda * E[w_i | q_i = n] with
// w_i the routing weight toward server i. States with marginal mass below
// absent_below are omitted from the profile.
std::array<RateProfile, 2> oracle_conditional_rates(
    const StationaryResult& dist, const SystemConfig& config,
    double absent_below = 1e-14);

struct MarginalSummary {
  Eigen::VectorXd pi;      // marginal law of q_i
  double mean = 0.0;
  double stddev = 0.0;
  double lambda_bar = 0.0; // sum_n lambda_i(n) pi_i(n)
};

// Marginals plus the unconditional-rate identity; lambda_bar_1 + lambda_bar_2
// equals lambda exactly on the truncated chain.
std::array<MarginalSummary, 2> oracle_marginals(const StationaryResult& dist,
                                                const SystemConfig& config);

}  // namespace gjsq
