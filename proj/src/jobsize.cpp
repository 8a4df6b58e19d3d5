#include "gjsq/jobsize.hpp"

#include <cmath>
#include <stdexcept>

namespace gjsq {

namespace {

double gamma_ratio_log(double k) {
  // log( Gamma(1+2/k) / Gamma(1+1/k)^2 )
  return std::lgamma(1.0 + 2.0 / k) - 2.0 * std::lgamma(1.0 + 1.0 / k);
}

}  // namespace

double weibull_shape_for_variance(double variance) {
  if (!(variance > 1.0))
    throw std::invalid_argument("weibull_shape_for_variance: bracket assumes variance > 1");
  // Solve Gamma(1+2/k)/Gamma(1+1/k)^2 = 1 + variance (mean fixed at 1 via the
  // scale); the ratio is decreasing in k, bracket (0.1, 1) covers var > 1.
  const double target = std::log1p(variance);
  double lo = 0.1, hi = 1.0;
  if (gamma_ratio_log(lo) < target || gamma_ratio_log(hi) > target)
    throw std::invalid_argument("weibull_shape_for_variance: variance outside bracket");
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (gamma_ratio_log(mid) > target)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-15 * hi) break;
  }
  return 0.5 * (lo + hi);
}

JobSize canonical_jobsize(std::string_view name) {
  if (name == "uni" || name == "uniform") return UniformJob{0.0, 2.0};
  if (name == "exp" || name == "exponential") return ExponentialJob{1.0};
  if (name == "weib" || name == "weibull") {
    double k = weibull_shape_for_variance(5.0);
    double c = std::exp(-std::lgamma(1.0 + 1.0 / k));  // mean 1
    return WeibullJob{k, c};
  }
  if (name == "logn" || name == "lognormal") {
    double sigma2 = std::log(11.0);  // variance 10 at mean 1
    return LogNormalJob{-0.5 * sigma2, sigma2};
  }
  throw std::invalid_argument("canonical_jobsize: unknown name '" + std::string(name) + "'");
}

std::string jobsize_name(const JobSize& dist) {
  struct Visitor {
    std::string operator()(const UniformJob&) const { return "uniform"; }
    std::string operator()(const ExponentialJob&) const { return "exponential"; }
    std::string operator()(const WeibullJob&) const { return "weibull"; }
    std::string operator()(const LogNormalJob&) const { return "lognormal"; }
  };
  return std::visit(Visitor{}, dist);
}

double jobsize_mean(const JobSize& dist) {
  struct Visitor {
    double operator()(const UniformJob& d) const { return 0.5 * (d.lo + d.hi); }
    double operator()(const ExponentialJob& d) const { return 1.0 / d.rate; }
    double operator()(const WeibullJob& d) const {
      return d.scale * std::exp(std::lgamma(1.0 + 1.0 / d.shape));
    }
    double operator()(const LogNormalJob& d) const {
      return std::exp(d.mu + 0.5 * d.sigma2);
    }
  };
  return std::visit(Visitor{}, dist);
}

double jobsize_variance(const JobSize& dist) {
  struct Visitor {
    double operator()(const UniformJob& d) const {
      double w = d.hi - d.lo;
      return w * w / 12.0;
    }
    double operator()(const ExponentialJob& d) const { return 1.0 / (d.rate * d.rate); }
    double operator()(const WeibullJob& d) const {
      double g1 = std::exp(std::lgamma(1.0 + 1.0 / d.shape));
      double g2 = std::exp(std::lgamma(1.0 + 2.0 / d.shape));
      return d.scale * d.scale * (g2 - g1 * g1);
    }
    double operator()(const LogNormalJob& d) const {
      return (std::exp(d.sigma2) - 1.0) * std::exp(2.0 * d.mu + d.sigma2);
    }
  };
  return std::visit(Visitor{}, dist);
}

double sample_jobsize(const JobSize& dist, RandomStream& rng) {
  struct Visitor {
    RandomStream& rng;
    double operator()(const UniformJob& d) const {
      return d.lo + (d.hi - d.lo) * rng.uniform01();
    }
    double operator()(const ExponentialJob& d) const {
      return -std::log(rng.uniform01()) / d.rate;
    }
    double operator()(const WeibullJob& d) const {
      return d.scale * std::pow(-std::log(rng.uniform01()), 1.0 / d.shape);
    }
    double operator()(const LogNormalJob& d) const {
      return std::exp(d.mu + std::sqrt(d.sigma2) * rng.normal());
    }
  };
  return std::visit(Visitor{rng}, dist);
}

}  // namespace gjsq
