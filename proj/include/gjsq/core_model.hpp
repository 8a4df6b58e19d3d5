#pragma once

#include <vector>

#include "gjsq/jobsize.hpp"
#include "gjsq/random_stream.hpp"

namespace gjsq {

// Heterogeneous processor-sharing system under generalized join-the-shortest-
// queue routing: an arrival that sees queue lengths q joins a server
// minimizing the index (q_i + 1) / rate_i.
struct SystemConfig {
  std::vector<double> rates;     // service rates, one per server
  double lambda = 0.0;           // Poisson arrival rate
  JobSize jobsize = ExponentialJob{1.0};
  std::vector<double> tie_prob;  // tie-break weights; empty => uniform

  int servers() const { return static_cast<int>(rates.size()); }
};

// Throws std::invalid_argument on: no servers, non-positive rate, negative
// lambda, load >= 1, tie_prob wrong length / negative / zero sum.
void validate(const SystemConfig& config);

// Offered load rho = lambda / sum(rates).
double load(double lambda, const std::vector<double>& rates);
inline double load(const SystemConfig& c) { return load(c.lambda, c.rates); }

// Canonical two-server family: rates [1, s], lambda = rho(1+s).
SystemConfig canonical_config(int s, double rho, const JobSize& jobsize = ExponentialJob{1.0});

// Integer s of a canonical config (rates exactly [1, s], integer s >= 1);
// throws std::invalid_argument otherwise.
int canonical_s(const SystemConfig& config);

// GJSQ routing index. Throws std::domain_error for rate <= 0 or q < 0.
double gjsq_index(long long q, double rate);

// Routing decision: the set of servers attaining the minimal index.
// candidates.size() == 1 means a unique choice; > 1 means a tie.
struct RouteDecision {
  std::vector<int> candidates;
  bool tie() const { return candidates.size() > 1; }
  int server() const { return candidates.front(); }
};

// Minimizers of (q_i+1)/rate_i. Integer-valued rates are compared exactly
// (cross-multiplied int64 rationals); otherwise indices are compared with
// absolute tolerance 1e-12, so near-ties are reported as ties.
RouteDecision gjsq_route(const std::vector<long long>& queues,
                         const std::vector<double>& rates);

// Tie-break weights for a decision: unique -> that server with weight 1;
// tie -> config.tie_prob renormalized over the tied subset (uniform if empty).
std::vector<double> route_weights(const RouteDecision& decision,
                                  const SystemConfig& config);

// Sample a server from the decision's weights (one uniform draw on ties).
int pick_server(const RouteDecision& decision, const SystemConfig& config,
                RandomStream& rng);

}  // namespace gjsq
