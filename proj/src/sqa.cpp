#include "gjsq/sqa.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gjsq {

bool approx_in_fitted_range(double rho, int s) {
  return s >= 1 && s <= 4 && rho >= 0.3 && rho < 1.0;
}

namespace {

void check_args(int n, double rho, int s) {
  if (n < 0) throw std::invalid_argument("approx rate: n must be >= 0");
  if (s < 1) throw std::invalid_argument("approx rate: s must be >= 1");
  if (!(rho > 0.0) || !(rho < 1.0))
    throw std::invalid_argument("approx rate: rho must be inside (0, 1)");
}

double dot5(const double (&x)[5], const double (&c)[5]) {
  double acc = 0.0;
  for (int i = 0; i < 5; ++i) acc += x[i] * c[i];
  return acc;
}

}  // namespace

double approx_rate_server1(int n, double rho, int s) {
  check_args(n, rho, s);
  const double alpha = alpha_of(rho, s);
  if (n >= 3) return alpha;
  double v = 1.0;
  if (n == 0) {
    const double x[5] = {s * rho, static_cast<double>(s), s / rho, 1.0,
                         rho * rho / (static_cast<double>(s) * s)};
    const double c[5] = {0.669, -1.90, 1.23, 1.86, -0.192};
    v = dot5(x, c);
  } else if (n == 1) {
    const double x[5] = {s * rho * rho, 1.0, 1.0 / rho, 1.0 / (s * rho),
                         std::pow(rho, 1.0 / s)};
    const double c[5] = {-0.00856, 1.37, -0.0578, 0.123, -0.254};
    v = dot5(x, c);
  } else {
    const double x[5] = {s * rho, 1.0 / (s * rho), rho / (static_cast<double>(s) * s),
                         1.0 / (static_cast<double>(s) * s), std::pow(rho, 1.0 / s)};
    const double c[5] = {-0.131, -0.820, -6.48, 10.4, 0.893};
    v = 1.0 + dot5(x, c) / 100.0;
  }
  return alpha * v;
}

double approx_rate_server2(int n, double rho, int s, const LimitingRates& lim) {
  check_args(n, rho, s);
  if (s == 1) return approx_rate_server1(n, rho, s);
  if (lim.lambda2.size() != s)
    throw std::invalid_argument("approx_rate_server2: limits have wrong length");
  const double lambda = rho * (1.0 + s);
  if (n <= s - 2) return lambda;
  if (n <= 2 * s - 1) {
    int idx = n - s;  // ranges over -1 .. s-1
    double limit = (idx == -1) ? lim.lambda2[s - 1] : lim.lambda2[idx];
    double factor = 1.0 + (1.0 / s - rho / (2.0 * s - 1.0)) *
                              std::pow(2.0, -(n - (s - 1)));
    return factor * limit;
  }
  return lim.lambda2[n % s];
}

RateProfile approximation_profile(int server_index, double rho, int s) {
  if (server_index != 0 && server_index != 1)
    throw std::invalid_argument("approximation_profile: server_index must be 0 or 1");
  RateProfile profile;
  profile.provenance = RateProvenance::approximation;
  if (server_index == 0 || s == 1) {
    for (int n = 0; n <= 2; ++n)
      profile.points.push_back({n, approx_rate_server1(n, rho, s), std::nan("")});
    profile.tail_start = 3;
    profile.tail_cycle = {alpha_of(rho, s)};
    return profile;
  }
  LimitingRates lim = limiting_rates(rho, s);
  for (int n = 0; n <= 2 * s - 1; ++n)
    profile.points.push_back({n, approx_rate_server2(n, rho, s, lim), std::nan("")});
  profile.tail_start = 2 * s;
  profile.tail_cycle.assign(lim.lambda2.data(), lim.lambda2.data() + s);
  return profile;
}

BirthDeathResult birth_death_solve(const RateProfile& profile, double mu,
                                   double tol, int max_states) {
  if (!(mu > 0.0)) throw std::invalid_argument("birth_death_solve: mu must be positive");
  if (!profile.contiguous())
    throw std::invalid_argument("birth_death_solve: profile must cover n = 0.. contiguously");

  std::vector<double> pis;
  pis.push_back(1.0);
  double total = 1.0;

  if (profile.has_tail()) {
    const int L = static_cast<int>(profile.tail_cycle.size());
    double period_product = 1.0, prefix = 1.0, max_prefix = 0.0;
    for (int k = 0; k < L; ++k) {
      prefix *= profile.tail_cycle[k] / mu;
      max_prefix = std::max(max_prefix, prefix);
    }
    period_product = prefix;
    if (period_product >= 1.0)
      throw std::invalid_argument("birth_death_solve: unstable periodic tail");
    const double tail_factor = L * std::max(1.0, max_prefix) / (1.0 - period_product);

    int n = 0;
    while (n + 1 < max_states) {
      double lam = *profile.rate_at(n);
      double next = pis.back() * lam / mu;
      pis.push_back(next);
      total += next;
      ++n;
      if (n >= profile.tail_start && (n - profile.tail_start) % L == 0 &&
          next * tail_factor < tol * total)
        break;
    }
  } else {
    for (std::size_t k = 0; k < profile.points.size() &&
                            static_cast<int>(k) + 1 < max_states; ++k) {
      double next = pis.back() * profile.points[k].value / mu;
      pis.push_back(next);
      total += next;
    }
  }

  BirthDeathResult out;
  out.pi = Eigen::Map<Eigen::VectorXd>(pis.data(), static_cast<Eigen::Index>(pis.size()));
  out.pi /= out.pi.sum();
  double mean = 0.0, second = 0.0, lbar = 0.0;
  for (Eigen::Index n = 0; n < out.pi.size(); ++n) {
    mean += static_cast<double>(n) * out.pi[n];
    second += static_cast<double>(n) * static_cast<double>(n) * out.pi[n];
    if (auto lam = profile.rate_at(static_cast<int>(n))) lbar += *lam * out.pi[n];
  }
  out.mean = mean;
  out.stddev = std::sqrt(std::max(0.0, second - mean * mean));
  out.lambda_bar = lbar;
  return out;
}

SqaResult sqa_pipeline(const SystemConfig& config) {
  validate(config);
  const int s = canonical_s(config);
  const double rho = load(config);
  SqaResult result;
  result.s = s;
  result.rho = rho;
  if (!approx_in_fitted_range(rho, s)) {
    std::ostringstream warn;
    warn << "approximation used outside its fitted range (1 <= s <= 4, "
            "0.3 <= rho < 1): s=" << s << ", rho=" << rho;
    result.warnings.push_back(warn.str());
  }
  for (int i = 0; i < 2; ++i) {
    result.server[i].rates = approximation_profile(i, rho, s);
    result.server[i].dist =
        birth_death_solve(result.server[i].rates, config.rates[i]);
  }
  return result;
}

SqaResult sqa_from_profiles(const std::array<RateProfile, 2>& profiles,
                            const std::array<double, 2>& mu, int s, double rho) {
  SqaResult result;
  result.s = s;
  result.rho = rho;
  for (int i = 0; i < 2; ++i) {
    result.server[i].rates = profiles[i];
    result.server[i].dist = birth_death_solve(profiles[i], mu[i]);
  }
  return result;
}

double relative_difference(double reference, double value) {
  if (reference == 0.0)
    throw std::domain_error("relative_difference: reference must be nonzero");
  return (reference - value) / reference;
}

}  // namespace gjsq
