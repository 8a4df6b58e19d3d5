#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "gjsq/random_stream.hpp"

namespace gjsq {

// Supported job-size laws; all canonical forms have mean 1.
struct UniformJob {
  double lo = 0.0;
  double hi = 2.0;
};
struct ExponentialJob {
  double rate = 1.0;
};
struct WeibullJob {
  double shape;  // k
  double scale;  // c
};
struct LogNormalJob {
  double mu;
  double sigma2;
};

using JobSize = std::variant<UniformJob, ExponentialJob, WeibullJob, LogNormalJob>;

// Canonical Table-1 parameterization by short name:
//   "uni"  U(0,2)                 (variance 1/3)
//   "exp"  Exp(1)                 (variance 1)
//   "weib" Weibull, variance 5    (shape solved numerically, scale for mean 1)
//   "logn" LogNormal, variance 10 (sigma^2 = ln 11, mu = -sigma^2/2)
// Long names (uniform/exponential/weibull/lognormal) also accepted.
JobSize canonical_jobsize(std::string_view name);

std::string jobsize_name(const JobSize& dist);

double jobsize_mean(const JobSize& dist);
double jobsize_variance(const JobSize& dist);

// Inversion sampling (one uniform per draw except lognormal's normal draw):
//   uniform: 2u;  exponential: -ln(u)/rate;  weibull: c(-ln u)^(1/k);
//   lognormal: exp(mu + sigma z).
double sample_jobsize(const JobSize& dist, RandomStream& rng);

// Shape k of a mean-1 Weibull with the given variance, i.e. the root of
// Gamma(1+2/k)/Gamma(1+1/k)^2 = 1 + var, bracketed in (0.1, 1) for var > 1.
double weibull_shape_for_variance(double variance);

}  // namespace gjsq
