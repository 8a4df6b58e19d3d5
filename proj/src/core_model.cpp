#include "gjsq/core_model.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gjsq {

void validate(const SystemConfig& config) {
  if (config.rates.empty())
    throw std::invalid_argument("config: at least one server required");
  for (double r : config.rates)
    if (!(r > 0.0) || !std::isfinite(r))
      throw std::invalid_argument("config: service rates must be positive");
  if (!(config.lambda >= 0.0) || !std::isfinite(config.lambda))
    throw std::invalid_argument("config: lambda must be nonnegative");
  if (load(config) >= 1.0)
    throw std::invalid_argument("config: load rho must be < 1");
  if (!config.tie_prob.empty()) {
    if (config.tie_prob.size() != config.rates.size())
      throw std::invalid_argument("config: tie_prob length must match rates");
    double sum = 0.0;
    for (double p : config.tie_prob) {
      if (p < 0.0) throw std::invalid_argument("config: tie_prob must be nonnegative");
      sum += p;
    }
    if (!(sum > 0.0))
      throw std::invalid_argument("config: tie_prob must have positive mass");
  }
}

double load(double lambda, const std::vector<double>& rates) {
  double total = std::accumulate(rates.begin(), rates.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("load: total service rate must be positive");
  return lambda / total;
}

SystemConfig canonical_config(int s, double rho, const JobSize& jobsize) {
  if (s < 1) throw std::invalid_argument("canonical_config: s must be >= 1");
  SystemConfig config;
  config.rates = {1.0, static_cast<double>(s)};
  config.lambda = rho * (1.0 + s);
  config.jobsize = jobsize;
  return config;
}

int canonical_s(const SystemConfig& config) {
  if (config.rates.size() != 2 || config.rates[0] != 1.0)
    throw std::invalid_argument("canonical_s: rates must be [1, s]");
  double s = config.rates[1];
  if (s < 1.0 || s != std::floor(s) || s > 1e6)
    throw std::invalid_argument("canonical_s: s must be a small positive integer");
  return static_cast<int>(s);
}

double gjsq_index(long long q, double rate) {
  if (!(rate > 0.0)) throw std::domain_error("gjsq_index: rate must be positive");
  if (q < 0) throw std::domain_error("gjsq_index: queue length must be >= 0");
  return (static_cast<double>(q) + 1.0) / rate;
}

namespace {

bool all_integer_rates(const std::vector<double>& rates) {
  for (double r : rates) {
    if (!(r > 0.0) || r != std::floor(r) || r > 1e9) return false;
  }
  return true;
}

}  // namespace

RouteDecision gjsq_route(const std::vector<long long>& queues,
                         const std::vector<double>& rates) {
  if (queues.size() != rates.size() || rates.empty())
    throw std::invalid_argument("gjsq_route: queues and rates must have equal nonzero length");

  RouteDecision decision;
  if (all_integer_rates(rates)) {
    // Exact rational comparison: (q_i+1)/r_i vs (q_j+1)/r_j as cross products.
    std::int64_t best_num = 0, best_den = 1;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (queues[i] < 0) throw std::domain_error("gjsq_route: queue length must be >= 0");
      std::int64_t num = queues[i] + 1;
      std::int64_t den = static_cast<std::int64_t>(rates[i]);
      if (decision.candidates.empty()) {
        best_num = num; best_den = den;
        decision.candidates.push_back(static_cast<int>(i));
        continue;
      }
      std::int64_t lhs = num * best_den, rhs = best_num * den;
      if (lhs < rhs) {
        best_num = num; best_den = den;
        decision.candidates.assign(1, static_cast<int>(i));
      } else if (lhs == rhs) {
        decision.candidates.push_back(static_cast<int>(i));
      }
    }
  } else {
    constexpr double kTol = 1e-12;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rates.size(); ++i) {
      double idx = gjsq_index(queues[i], rates[i]);
      if (idx < best - kTol) {
        best = idx;
        decision.candidates.assign(1, static_cast<int>(i));
      } else if (idx <= best + kTol) {
        decision.candidates.push_back(static_cast<int>(i));
        if (idx < best) best = idx;
      }
    }
  }
  return decision;
}

std::vector<double> route_weights(const RouteDecision& decision,
                                  const SystemConfig& config) {
  std::vector<double> weights(config.rates.size(), 0.0);
  if (decision.candidates.size() == 1) {
    weights[decision.candidates.front()] = 1.0;
    return weights;
  }
  double total = 0.0;
  for (int i : decision.candidates)
    total += config.tie_prob.empty() ? 1.0 : config.tie_prob[i];
  if (!(total > 0.0)) {
    // All tied servers carry zero weight: fall back to uniform over the tie.
    for (int i : decision.candidates)
      weights[i] = 1.0 / static_cast<double>(decision.candidates.size());
    return weights;
  }
  for (int i : decision.candidates)
    weights[i] = (config.tie_prob.empty() ? 1.0 : config.tie_prob[i]) / total;
  return weights;
}

int pick_server(const RouteDecision& decision, const SystemConfig& config,
                RandomStream& rng) {
  if (decision.candidates.size() == 1) return decision.candidates.front();
  std::vector<double> weights = route_weights(decision, config);
  double u = rng.uniform01();
  double acc = 0.0;
  for (int i : decision.candidates) {
    acc += weights[i];
    if (u <= acc) return i;
  }
  return decision.candidates.back();
}

}  // namespace gjsq
