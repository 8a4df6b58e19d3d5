#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "gjsq/core_model.hpp"
#include "gjsq/rate_profile.hpp"

namespace gjsq {

// Discrete-event simulator: Poisson arrivals, GJSQ routing, egalitarian
// processor sharing at every server, general job sizes, any server count.

struct SimOptions {
  long long departures = 200000;   // horizon: stop at this total departure
  double warmup_fraction = 0.0;    // counters reset after this fraction of departures
  std::uint64_t master_seed = 1;
  std::uint64_t substream = 0;     // replication index
};

struct ServerStats {
  long long arrivals = 0;                    // A_i over the measured window
  long long departures = 0;
  std::vector<long long> arrivals_in_state;  // A_{i,n}: arrivals routed here that saw q_i = n
  std::vector<long long> seen_in_state;      // all arrivals that saw q_i = n (PASTA)
  std::vector<double> time_in_state;         // T_{i,n}
  double busy_time = 0.0;
  double work_admitted = 0.0;  // sampled sizes (plus carried residual at reset)
  double work_completed = 0.0;
  double residual_work = 0.0;  // unfinished work here at the horizon
};

struct SimResult {
  double t_end = 0.0;          // measured-window length
  long long departures = 0;    // departures in the measured window
  long long arrivals = 0;
  std::vector<ServerStats> server;
  double residual_work = 0.0;  // unfinished work at the horizon
};

// Runs to the options' total departure count from an empty system. A zero
// arrival rate returns an all-zero result immediately. Throws
// std::invalid_argument on invalid config or departures <= 0.
SimResult run_simulation(const SystemConfig& config, const SimOptions& options);

// lambda_i(n) = A_{i,n} / T_{i,n} for states with T_{i,n} >= min_time;
// other states are absent from the profile.
RateProfile estimate_conditional_rates(const ServerStats& stats, double min_time);
std::vector<RateProfile> estimate_conditional_rates(const SimResult& result,
                                                    double min_time = 0.0);

// Time-average queue distribution T_{i,n} / t_end (zero vector if t_end = 0).
Eigen::VectorXd queue_distribution(const ServerStats& stats, double t_end);

// Time-average arrival rate A_i / t_end (0 for an empty horizon).
double estimate_time_average_rate(const ServerStats& stats, double t_end);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample std across replications
};

struct PerRepMetrics {
  double t_end = 0.0;
  std::vector<double> mean_q, std_q, lambda_bar, fraction;
};

struct ReplicatedServer {
  MetricSummary mean_q, std_q, lambda_bar, fraction;
  RateProfile rates;       // mean across reps; stderr = sample std / sqrt(m)
  Eigen::VectorXd pi_mean; // mean time-average queue distribution
};

struct ReplicatedResult {
  int reps = 0;
  std::vector<ReplicatedServer> server;
  std::vector<PerRepMetrics> per_rep;
};

// Independent replications with substreams base.substream + rep index,
// aggregated in replication order (deterministic under parallelism).
// min_time is the per-rep exposure threshold for rate estimation; rate
// states are kept when exposed in every replication.
ReplicatedResult replicate(const SystemConfig& config, const SimOptions& base,
                           int reps, bool parallel = true,
                           double min_time = 0.0);

}  // namespace gjsq
