#include "gjsq/json_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gjsq {

std::string format_double(double x) {
  char buf[48];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, ptr);
}

json to_json(const JobSize& dist) {
  struct Visitor {
    json operator()(const UniformJob& d) const {
      return {{"name", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
    }
    json operator()(const ExponentialJob& d) const {
      return {{"name", "exponential"}, {"rate", d.rate}};
    }
    json operator()(const WeibullJob& d) const {
      return {{"name", "weibull"}, {"shape", d.shape}, {"scale", d.scale}};
    }
    json operator()(const LogNormalJob& d) const {
      return {{"name", "lognormal"}, {"mu", d.mu}, {"sigma2", d.sigma2}};
    }
  };
  return std::visit(Visitor{}, dist);
}

JobSize jobsize_from_json(const json& j) {
  if (j.is_string()) return canonical_jobsize(j.get<std::string>());
  if (!j.is_object() || !j.contains("name"))
    throw std::invalid_argument("jobsize: expected a name string or object with 'name'");
  std::string name = j.at("name").get<std::string>();
  if (name == "uni" || name == "uniform") {
    UniformJob d;
    d.lo = j.value("lo", 0.0);
    d.hi = j.value("hi", 2.0);
    if (!(d.hi > d.lo)) throw std::invalid_argument("jobsize: uniform needs hi > lo");
    return d;
  }
  if (name == "exp" || name == "exponential") {
    ExponentialJob d;
    d.rate = j.value("rate", 1.0);
    if (!(d.rate > 0.0)) throw std::invalid_argument("jobsize: exponential rate must be > 0");
    return d;
  }
  if (name == "weib" || name == "weibull") {
    if (j.contains("shape") || j.contains("scale")) {
      WeibullJob d{j.at("shape").get<double>(), j.at("scale").get<double>()};
      if (!(d.shape > 0.0) || !(d.scale > 0.0))
        throw std::invalid_argument("jobsize: weibull shape/scale must be > 0");
      return d;
    }
    if (j.contains("variance")) {
      double k = weibull_shape_for_variance(j.at("variance").get<double>());
      return WeibullJob{k, std::exp(-std::lgamma(1.0 + 1.0 / k))};
    }
    return canonical_jobsize("weib");
  }
  if (name == "logn" || name == "lognormal") {
    if (j.contains("mu") || j.contains("sigma2")) {
      LogNormalJob d{j.at("mu").get<double>(), j.at("sigma2").get<double>()};
      if (!(d.sigma2 > 0.0)) throw std::invalid_argument("jobsize: lognormal sigma2 must be > 0");
      return d;
    }
    if (j.contains("variance")) {
      double sigma2 = std::log1p(j.at("variance").get<double>());  // mean 1
      return LogNormalJob{-0.5 * sigma2, sigma2};
    }
    return canonical_jobsize("logn");
  }
  throw std::invalid_argument("jobsize: unknown name '" + name + "'");
}

json to_json(const SystemConfig& config) {
  json j;
  j["rates"] = config.rates;
  j["lambda"] = config.lambda;
  j["jobsize"] = to_json(config.jobsize);
  if (!config.tie_prob.empty()) j["tie_prob"] = config.tie_prob;
  return j;
}

SystemConfig config_from_json(const json& j) {
  SystemConfig config;
  if (!j.contains("rates") || !j.contains("lambda"))
    throw std::invalid_argument("config: 'rates' and 'lambda' are required");
  config.rates = j.at("rates").get<std::vector<double>>();
  config.lambda = j.at("lambda").get<double>();
  if (j.contains("jobsize")) config.jobsize = jobsize_from_json(j.at("jobsize"));
  if (j.contains("tie_prob"))
    config.tie_prob = j.at("tie_prob").get<std::vector<double>>();
  validate(config);
  return config;
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j = json::parse(in);
  return config_from_json(j);
}

json to_json(const RateProfile& profile) {
  json pts = json::array();
  for (const auto& p : profile.points) {
    json e{{"n", p.n}, {"value", p.value}};
    if (!std::isnan(p.stderr_est)) e["stderr"] = p.stderr_est;
    pts.push_back(e);
  }
  json j{{"provenance", provenance_name(profile.provenance)}, {"points", pts}};
  if (profile.has_tail()) {
    j["tail_start"] = profile.tail_start;
    j["tail_cycle"] = profile.tail_cycle;
  }
  return j;
}

namespace {

json sqa_server_json(const SqaServer& server) {
  json j;
  const Eigen::Index n_states = server.dist.pi.size();
  std::vector<double> rates(static_cast<std::size_t>(n_states));
  for (Eigen::Index n = 0; n < n_states; ++n)
    rates[static_cast<std::size_t>(n)] =
        server.rates.rate_at(static_cast<int>(n)).value_or(std::nan(""));
  j["rates"] = rates;
  j["pi"] = std::vector<double>(server.dist.pi.data(),
                                server.dist.pi.data() + n_states);
  if (server.rates.has_tail()) {
    j["tail_start"] = server.rates.tail_start;
    j["tail_cycle"] = server.rates.tail_cycle;
  }
  j["mean"] = server.dist.mean;
  j["std"] = server.dist.stddev;
  j["lambda_bar"] = server.dist.lambda_bar;
  return j;
}

}  // namespace

json to_json(const SqaResult& result) {
  json j;
  j["s"] = result.s;
  j["rho"] = result.rho;
  j["server1"] = sqa_server_json(result.server[0]);
  j["server2"] = sqa_server_json(result.server[1]);
  if (!result.warnings.empty()) j["warnings"] = result.warnings;
  return j;
}

json summary_json(const SqaResult& result) {
  json servers = json::array();
  for (int i = 0; i < 2; ++i) {
    servers.push_back({{"server", i + 1},
                       {"mean", result.server[i].dist.mean},
                       {"std", result.server[i].dist.stddev},
                       {"lambda_bar", result.server[i].dist.lambda_bar}});
  }
  json j{{"engine", "sqa"}, {"s", result.s}, {"rho", result.rho}, {"servers", servers}};
  if (!result.warnings.empty()) j["warnings"] = result.warnings;
  return j;
}

json summary_json(const StationaryResult& dist, const SystemConfig& config) {
  auto marginals = oracle_marginals(dist, config);
  json servers = json::array();
  for (int i = 0; i < 2; ++i) {
    servers.push_back({{"server", i + 1},
                       {"mean", marginals[i].mean},
                       {"std", marginals[i].stddev},
                       {"lambda_bar", marginals[i].lambda_bar}});
  }
  return json{{"engine", "oracle"},
              {"rho", load(config)},
              {"lambda", config.lambda},
              {"K", dist.K},
              {"residual", dist.residual},
              {"tail_mass", dist.tail_mass},
              {"servers", servers}};
}

json summary_json(const ReplicatedResult& reps, const SystemConfig& config) {
  json servers = json::array();
  for (std::size_t i = 0; i < reps.server.size(); ++i) {
    const ReplicatedServer& s = reps.server[i];
    servers.push_back({{"server", static_cast<int>(i) + 1},
                       {"mean", s.mean_q.mean},
                       {"mean_rep_std", s.mean_q.stddev},
                       {"std", s.std_q.mean},
                       {"std_rep_std", s.std_q.stddev},
                       {"lambda_bar", s.lambda_bar.mean},
                       {"lambda_bar_rep_std", s.lambda_bar.stddev},
                       {"fraction", s.fraction.mean}});
  }
  return json{{"engine", "simulation"},
              {"rho", load(config)},
              {"lambda", config.lambda},
              {"jobsize", jobsize_name(config.jobsize)},
              {"reps", reps.reps},
              {"servers", servers}};
}

namespace {

std::string csv_cell(double x) {
  if (std::isnan(x)) return "";
  return format_double(x);
}

}  // namespace

std::string rates_csv(const std::vector<RateProfile>& profiles) {
  std::ostringstream out;
  out << "server,n,value,stderr\n";
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (const auto& p : profiles[i].points) {
      out << (i + 1) << ',' << p.n << ',' << format_double(p.value) << ','
          << csv_cell(p.stderr_est) << '\n';
    }
  }
  return out.str();
}

std::string queue_csv(const std::vector<Eigen::VectorXd>& dists) {
  std::ostringstream out;
  out << "server,n,value,stderr\n";
  for (std::size_t i = 0; i < dists.size(); ++i) {
    for (Eigen::Index n = 0; n < dists[i].size(); ++n) {
      out << (i + 1) << ',' << n << ',' << format_double(dists[i][n]) << ",\n";
    }
  }
  return out.str();
}

std::string joint_csv(const Eigen::MatrixXd& pi, double floor) {
  std::ostringstream out;
  out << "q1,q2,prob\n";
  for (Eigen::Index a = 0; a < pi.rows(); ++a) {
    for (Eigen::Index b = 0; b < pi.cols(); ++b) {
      if (pi(a, b) > floor)
        out << a << ',' << b << ',' << format_double(pi(a, b)) << '\n';
    }
  }
  return out.str();
}

}  // namespace gjsq
