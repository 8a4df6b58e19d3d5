#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "gjsq/core_model.hpp"
#include "gjsq/rate_profile.hpp"
#include "gjsq/spectral.hpp"

namespace gjsq {

// Single Queue Approximation: each server is analyzed as an M(n)/M/1 queue
// whose state-dependent arrival rates are the approximated conditional GJSQ
// rates; the stationary law is the birth-death solution.

// The regression approximations were fitted on 1 <= s <= 4, 0.3 <= rho < 1.
bool approx_in_fitted_range(double rho, int s);

// Server-1 approximated conditional rate, normalized system (rates [1, s]).
// n = 0,1,2 use the fitted regressions; n >= 3 returns the exact limit alpha.
double approx_rate_server1(int n, double rho, int s);

// Server-2 approximated conditional rate. Uses lambda for n <= s-2, a
// geometric correction times the limiting rates for s-1 <= n <= 2s-1, and
// the periodic limits for n >= 2s. For s = 1 delegates to server 1's form.
double approx_rate_server2(int n, double rho, int s, const LimitingRates& lim);

// Full profile with periodic analytic tail (server_index 0 or 1).
RateProfile approximation_profile(int server_index, double rho, int s);

struct BirthDeathResult {
  Eigen::VectorXd pi;
  double mean = 0.0;
  double stddev = 0.0;
  double lambda_bar = 0.0;  // sum_n lambda(n) pi(n)
};

// Stationary law of the birth-death chain with births lambda(n) from the
// profile and constant death rate mu: pi(n+1) = pi(n) lambda(n)/mu.
// Finite profiles give the exact finite chain; profiles with a periodic tail
// are truncated where a geometric tail bound drops below tol * mass
// (hard cap max_states). Throws std::invalid_argument on gaps or unstable
// tails (cycle product >= mu^period).
BirthDeathResult birth_death_solve(const RateProfile& profile, double mu,
                                   double tol = 1e-12, int max_states = 100000);

struct SqaServer {
  RateProfile rates;
  BirthDeathResult dist;
};

struct SqaResult {
  int s = 1;
  double rho = 0.0;
  std::array<SqaServer, 2> server;
  std::vector<std::string> warnings;  // e.g. out-of-fitted-range use
};

// End-to-end SQA for a canonical two-server config (rates [1, s]); the
// job-size law is ignored (the approximation is built for the exponential
// case and doubles as the near-insensitive prediction).
SqaResult sqa_pipeline(const SystemConfig& config);

// Birth-death pass over externally supplied profiles (oracle heads,
// simulation estimates); profiles must be contiguous from 0.
SqaResult sqa_from_profiles(const std::array<RateProfile, 2>& profiles,
                            const std::array<double, 2>& mu, int s, double rho);

// Signed relative difference (reference - value) / reference.
double relative_difference(double reference, double value);

}  // namespace gjsq
