#include "gjsq/ctmc.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace gjsq {

int default_truncation(double rho) {
  if (!(rho >= 0.0) || !(rho < 1.0))
    throw std::invalid_argument("default_truncation: rho must be in [0, 1)");
  // Small slack so representable rho (0.9, 0.95, ...) hits the intended
  // ceil(40 / (1 - rho)) instead of one above it.
  double adaptive = std::ceil(40.0 / (1.0 - rho) - 1e-9);
  return std::max(200, static_cast<int>(adaptive));
}

CtmcModel build_generator(const SystemConfig& config, int K) {
  validate(config);
  if (config.rates.size() != 2)
    throw std::invalid_argument("build_generator: exactly two servers required");
  if (K < 2) throw std::invalid_argument("build_generator: K must be >= 2");

  const int W = K + 1;
  const int N = W * W;
  auto index = [W](int a, int b) { return a * W + b; };

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(N) * 5);
  std::vector<long long> queues(2);
  for (int a = 0; a <= K; ++a) {
    for (int b = 0; b <= K; ++b) {
      const int i = index(a, b);
      double out = 0.0;
      if (a > 0) {
        trips.emplace_back(i, index(a - 1, b), config.rates[0]);
        out += config.rates[0];
      }
      if (b > 0) {
        trips.emplace_back(i, index(a, b - 1), config.rates[1]);
        out += config.rates[1];
      }
      if (config.lambda > 0.0) {
        queues[0] = a;
        queues[1] = b;
        std::vector<double> w = route_weights(gjsq_route(queues, config.rates), config);
        // Arrivals that would push a server past K are dropped (reflection).
        if (w[0] > 0.0 && a < K) {
          trips.emplace_back(i, index(a + 1, b), config.lambda * w[0]);
          out += config.lambda * w[0];
        }
        if (w[1] > 0.0 && b < K) {
          trips.emplace_back(i, index(a, b + 1), config.lambda * w[1]);
          out += config.lambda * w[1];
        }
      }
      if (out > 0.0) trips.emplace_back(i, i, -out);
    }
  }

  CtmcModel model;
  model.config = config;
  model.K = K;
  model.Q.resize(N, N);
  model.Q.setFromTriplets(trips.begin(), trips.end());
  model.Q.makeCompressed();
  return model;
}

StationaryResult solve_stationary(const CtmcModel& model) {
  const int W = model.K + 1;
  const int N = W * W;

  // A = Q^T with the state-0 balance row replaced by the normalization row.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(model.Q.nonZeros()) + N);
  for (int col = 0; col < model.Q.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(model.Q, col); it; ++it) {
      if (it.col() != 0) trips.emplace_back(it.col(), it.row(), it.value());
    }
  }
  for (int k = 0; k < N; ++k) trips.emplace_back(0, k, 1.0);
  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  Eigen::VectorXd b = Eigen::VectorXd::Zero(N);
  b[0] = 1.0;

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.analyzePattern(A);
  solver.factorize(A);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("solve_stationary: sparse LU factorization failed");
  Eigen::VectorXd x = solver.solve(b);

  auto balance_residual = [&](const Eigen::VectorXd& v) {
    return (model.Q.transpose() * v).cwiseAbs().maxCoeff();
  };
  double residual = balance_residual(x);
  for (int pass = 0; pass < 5 && residual > 1e-13; ++pass) {
    Eigen::VectorXd r = b - A * x;
    x += solver.solve(r);
    residual = balance_residual(x);
  }
  if (!(residual < 1e-12)) {
    std::ostringstream msg;
    msg << "solve_stationary: residual " << residual << " did not reach 1e-12";
    throw std::runtime_error(msg.str());
  }

  for (int i = 0; i < N; ++i) {
    if (x[i] < 0.0) {
      if (x[i] < -1e-12)
        throw std::runtime_error("solve_stationary: significantly negative probability");
      x[i] = 0.0;
    }
  }
  x /= x.sum();

  StationaryResult out;
  out.K = model.K;
  out.pi.resize(W, W);
  for (int a = 0; a < W; ++a)
    for (int bcol = 0; bcol < W; ++bcol) out.pi(a, bcol) = x[a * W + bcol];
  out.residual = residual;
  out.tail_mass = out.pi.row(model.K).sum() + out.pi.col(model.K).sum() -
                  out.pi(model.K, model.K);
  return out;
}

StationaryResult oracle_solve(const SystemConfig& config, int K) {
  if (K > 0) return solve_stationary(build_generator(config, K));
  int k = default_truncation(load(config));
  for (int attempt = 0; attempt < 6; ++attempt) {
    StationaryResult result = solve_stationary(build_generator(config, k));
    if (result.tail_mass < 1e-10) return result;
    k *= 2;
  }
  throw std::runtime_error("oracle_solve: truncation tail mass did not reach 1e-10");
}

namespace {

struct ConditionalAccumulator {
  Eigen::VectorXd marginal[2];
  Eigen::VectorXd weighted[2];  // sum over the other queue of pi * w_i

  ConditionalAccumulator(const StationaryResult& dist, const SystemConfig& config) {
    const int W = dist.K + 1;
    for (int i = 0; i < 2; ++i) {
      marginal[i] = Eigen::VectorXd::Zero(W);
      weighted[i] = Eigen::VectorXd::Zero(W);
    }
    std::vector<long long> queues(2);
    for (int a = 0; a < W; ++a) {
      for (int b = 0; b < W; ++b) {
        double p = dist.pi(a, b);
        queues[0] = a;
        queues[1] = b;
        std::vector<double> w = route_weights(gjsq_route(queues, config.rates), config);
        marginal[0][a] += p;
        marginal[1][b] += p;
        weighted[0][a] += p * w[0];
        weighted[1][b] += p * w[1];
      }
    }
  }
};

}  // namespace

std::array<RateProfile, 2> oracle_conditional_rates(const StationaryResult& dist,
                                                    const SystemConfig& config,
                                                    double absent_below) {
  ConditionalAccumulator acc(dist, config);
  std::array<RateProfile, 2> profiles;
  for (int i = 0; i < 2; ++i) {
    profiles[i].provenance = RateProvenance::oracle;
    for (int n = 0; n <= dist.K; ++n) {
      double mass = acc.marginal[i][n];
      if (mass <= absent_below || mass <= 0.0) continue;
      profiles[i].points.push_back(
          {n, config.lambda * acc.weighted[i][n] / mass, std::nan("")});
    }
  }
  return profiles;
}

std::array<MarginalSummary, 2> oracle_marginals(const StationaryResult& dist,
                                                const SystemConfig& config) {
  ConditionalAccumulator acc(dist, config);
  std::array<MarginalSummary, 2> out;
  for (int i = 0; i < 2; ++i) {
    out[i].pi = acc.marginal[i];
    double mean = 0.0, second = 0.0;
    for (int n = 0; n <= dist.K; ++n) {
      mean += static_cast<double>(n) * out[i].pi[n];
      second += static_cast<double>(n) * static_cast<double>(n) * out[i].pi[n];
    }
    out[i].mean = mean;
    out[i].stddev = std::sqrt(std::max(0.0, second - mean * mean));
    out[i].lambda_bar = config.lambda * acc.weighted[i].sum();
  }
  return out;
}

}  // namespace gjsq
