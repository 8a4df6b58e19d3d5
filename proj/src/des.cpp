#include "gjsq/des.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <queue>
#include <stdexcept>
#include <thread>

namespace gjsq {

namespace {

struct Job {
  double mark;  // server work offset at which this job completes
  double size;
  bool operator>(const Job& other) const { return mark > other.mark; }
};

// Egalitarian processor sharing with lazy bookkeeping: `done` is the
// cumulative per-job work the server has delivered; a job admitted at offset
// d with size x departs when done reaches d + x. Between events the queue
// length q is constant and done advances at rate/q per unit time.
struct PsServer {
  double rate = 1.0;
  std::priority_queue<Job, std::vector<Job>, std::greater<Job>> jobs;
  double done = 0.0;

  int q() const { return static_cast<int>(jobs.size()); }

  double time_to_departure() const {
    if (jobs.empty()) return std::numeric_limits<double>::infinity();
    return std::max(0.0, (jobs.top().mark - done)) * jobs.size() / rate;
  }

  double residual_work() const {
    // Sum of (mark - done) over queued jobs; rebuilds the container copy.
    double total = 0.0;
    auto copy = jobs;
    while (!copy.empty()) {
      total += copy.top().mark - done;
      copy.pop();
    }
    return total;
  }

  // Keeps mark - done well-conditioned on long runs.
  void rebase() {
    if (done < 1048576.0) return;
    std::vector<Job> rebased;
    rebased.reserve(jobs.size());
    auto copy = std::move(jobs);
    while (!copy.empty()) {
      rebased.push_back({copy.top().mark - done, copy.top().size});
      copy.pop();
    }
    jobs = std::priority_queue<Job, std::vector<Job>, std::greater<Job>>(
        std::greater<Job>(), std::move(rebased));
    done = 0.0;
  }
};

void grow_to(std::vector<double>& v, std::size_t n) {
  if (v.size() <= n) v.resize(n + 1, 0.0);
}
void grow_to(std::vector<long long>& v, std::size_t n) {
  if (v.size() <= n) v.resize(n + 1, 0);
}

}  // namespace

SimResult run_simulation(const SystemConfig& config, const SimOptions& options) {
  validate(config);
  if (options.departures <= 0)
    throw std::invalid_argument("run_simulation: departures must be positive");
  if (options.warmup_fraction < 0.0 || options.warmup_fraction >= 1.0)
    throw std::invalid_argument("run_simulation: warmup_fraction must be in [0, 1)");

  const int n_servers = config.servers();
  SimResult result;
  result.server.resize(n_servers);
  if (config.lambda == 0.0) return result;

  RandomStream rng(options.master_seed, options.substream);
  std::vector<PsServer> servers(n_servers);
  for (int i = 0; i < n_servers; ++i) servers[i].rate = config.rates[i];

  const long long warmup_count = static_cast<long long>(
      std::floor(options.warmup_fraction * static_cast<double>(options.departures)));

  double t = 0.0;
  double measure_start = 0.0;
  double next_arrival = -std::log(rng.uniform01()) / config.lambda;
  long long completed = 0;
  std::vector<long long> queues(n_servers, 0);

  auto reset_measurement = [&]() {
    for (int i = 0; i < n_servers; ++i) {
      ServerStats& st = result.server[i];
      st = ServerStats{};
      st.work_admitted = servers[i].residual_work();  // carried-over work
    }
    result.arrivals = 0;
    result.departures = 0;
    measure_start = t;
  };

  if (warmup_count == 0) reset_measurement();

  while (completed < options.departures) {
    int dep_server = -1;
    double dt_dep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n_servers; ++i) {
      double dt = servers[i].time_to_departure();
      if (dt < dt_dep) {
        dt_dep = dt;
        dep_server = i;
      }
    }
    const double t_dep = t + dt_dep;
    const bool is_arrival = next_arrival < t_dep;
    const double t_next = is_arrival ? next_arrival : t_dep;
    const double dt = t_next - t;

    for (int i = 0; i < n_servers; ++i) {
      PsServer& srv = servers[i];
      ServerStats& st = result.server[i];
      grow_to(st.time_in_state, static_cast<std::size_t>(srv.q()));
      st.time_in_state[static_cast<std::size_t>(srv.q())] += dt;
      if (srv.q() > 0) {
        st.busy_time += dt;
        srv.done += dt * srv.rate / srv.q();
      }
    }
    t = t_next;

    if (is_arrival) {
      for (int i = 0; i < n_servers; ++i) {
        queues[i] = servers[i].q();
        ServerStats& seen = result.server[i];
        grow_to(seen.seen_in_state, static_cast<std::size_t>(queues[i]));
        seen.seen_in_state[static_cast<std::size_t>(queues[i])] += 1;
      }
      RouteDecision decision = gjsq_route(queues, config.rates);
      int target = pick_server(decision, config, rng);
      double size = sample_jobsize(config.jobsize, rng);

      ServerStats& st = result.server[target];
      grow_to(st.arrivals_in_state, static_cast<std::size_t>(queues[target]));
      st.arrivals_in_state[static_cast<std::size_t>(queues[target])] += 1;
      st.arrivals += 1;
      st.work_admitted += size;
      result.arrivals += 1;

      servers[target].jobs.push({servers[target].done + size, size});
      next_arrival = t + -std::log(rng.uniform01()) / config.lambda;
    } else {
      PsServer& srv = servers[dep_server];
      ServerStats& st = result.server[dep_server];
      st.work_completed += srv.jobs.top().size;
      st.departures += 1;
      result.departures += 1;
      srv.jobs.pop();
      if (srv.jobs.empty())
        srv.done = 0.0;
      else
        srv.rebase();
      ++completed;
      if (completed == warmup_count) reset_measurement();
    }
  }

  result.t_end = t - measure_start;
  result.residual_work = 0.0;
  for (int i = 0; i < n_servers; ++i) {
    result.server[i].residual_work = servers[i].residual_work();
    result.residual_work += result.server[i].residual_work;
  }
  return result;
}

RateProfile estimate_conditional_rates(const ServerStats& stats, double min_time) {
  RateProfile profile;
  profile.provenance = RateProvenance::simulation;
  for (std::size_t n = 0; n < stats.time_in_state.size(); ++n) {
    double T = stats.time_in_state[n];
    if (T <= 0.0 || T < min_time) continue;
    long long a = n < stats.arrivals_in_state.size() ? stats.arrivals_in_state[n] : 0;
    profile.points.push_back(
        {static_cast<int>(n), static_cast<double>(a) / T, std::nan("")});
  }
  return profile;
}

std::vector<RateProfile> estimate_conditional_rates(const SimResult& result,
                                                    double min_time) {
  std::vector<RateProfile> out;
  out.reserve(result.server.size());
  for (const auto& st : result.server)
    out.push_back(estimate_conditional_rates(st, min_time));
  return out;
}

Eigen::VectorXd queue_distribution(const ServerStats& stats, double t_end) {
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(
      static_cast<Eigen::Index>(std::max<std::size_t>(1, stats.time_in_state.size())));
  if (t_end <= 0.0) return pi;
  for (std::size_t n = 0; n < stats.time_in_state.size(); ++n)
    pi[static_cast<Eigen::Index>(n)] = stats.time_in_state[n] / t_end;
  return pi;
}

double estimate_time_average_rate(const ServerStats& stats, double t_end) {
  if (t_end <= 0.0) return 0.0;
  return static_cast<double>(stats.arrivals) / t_end;
}

namespace {

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary out;
  const std::size_t n = values.size();
  if (n == 0) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(n);
  if (n >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(n - 1));
  }
  return out;
}

}  // namespace

ReplicatedResult replicate(const SystemConfig& config, const SimOptions& base,
                           int reps, bool parallel, double min_time) {
  if (reps < 1) throw std::invalid_argument("replicate: reps must be >= 1");
  std::vector<SimResult> runs(static_cast<std::size_t>(reps));

  auto run_rep = [&](int r) {
    SimOptions opts = base;
    opts.substream = base.substream + static_cast<std::uint64_t>(r);
    return run_simulation(config, opts);
  };

  if (parallel && reps > 1) {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futs;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < std::min<unsigned>(workers, static_cast<unsigned>(reps)); ++w) {
      futs.push_back(std::async(std::launch::async, [&]() {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1))
          runs[static_cast<std::size_t>(r)] = run_rep(r);
      }));
    }
    for (auto& f : futs) f.get();
  } else {
    for (int r = 0; r < reps; ++r) runs[static_cast<std::size_t>(r)] = run_rep(r);
  }

  const int n_servers = config.servers();
  ReplicatedResult out;
  out.reps = reps;
  out.server.resize(static_cast<std::size_t>(n_servers));
  out.per_rep.resize(static_cast<std::size_t>(reps));

  for (int r = 0; r < reps; ++r) {
    PerRepMetrics& m = out.per_rep[static_cast<std::size_t>(r)];
    const SimResult& run = runs[static_cast<std::size_t>(r)];
    m.t_end = run.t_end;
    m.mean_q.resize(n_servers);
    m.std_q.resize(n_servers);
    m.lambda_bar.resize(n_servers);
    m.fraction.resize(n_servers);
    for (int i = 0; i < n_servers; ++i) {
      Eigen::VectorXd pi = queue_distribution(run.server[i], run.t_end);
      double mean = 0.0, second = 0.0;
      for (Eigen::Index n = 0; n < pi.size(); ++n) {
        mean += static_cast<double>(n) * pi[n];
        second += static_cast<double>(n) * static_cast<double>(n) * pi[n];
      }
      m.mean_q[i] = mean;
      m.std_q[i] = std::sqrt(std::max(0.0, second - mean * mean));
      m.lambda_bar[i] = estimate_time_average_rate(run.server[i], run.t_end);
      m.fraction[i] = run.arrivals > 0
                          ? static_cast<double>(run.server[i].arrivals) /
                                static_cast<double>(run.arrivals)
                          : 0.0;
    }
  }

  for (int i = 0; i < n_servers; ++i) {
    ReplicatedServer& agg = out.server[static_cast<std::size_t>(i)];
    std::vector<double> v(reps);
    auto fill = [&](auto getter) {
      for (int r = 0; r < reps; ++r) v[static_cast<std::size_t>(r)] = getter(out.per_rep[static_cast<std::size_t>(r)]);
      return summarize(v);
    };
    agg.mean_q = fill([&](const PerRepMetrics& m) { return m.mean_q[i]; });
    agg.std_q = fill([&](const PerRepMetrics& m) { return m.std_q[i]; });
    agg.lambda_bar = fill([&](const PerRepMetrics& m) { return m.lambda_bar[i]; });
    agg.fraction = fill([&](const PerRepMetrics& m) { return m.fraction[i]; });

    // Conditional rates: keep states exposed (T >= min_time) in at least two
    // replications; mean across exposed reps, stderr = sample std / sqrt(m).
    std::size_t max_len = 0;
    for (const auto& run : runs)
      max_len = std::max(max_len, run.server[i].time_in_state.size());
    agg.rates.provenance = RateProvenance::simulation;
    Eigen::VectorXd pi_sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(std::max<std::size_t>(1, max_len)));
    for (std::size_t n = 0; n < max_len; ++n) {
      std::vector<double> vals;
      for (const auto& run : runs) {
        const ServerStats& st = run.server[i];
        if (n >= st.time_in_state.size()) continue;
        double T = st.time_in_state[n];
        if (T <= 0.0 || T < min_time) continue;
        long long a = n < st.arrivals_in_state.size() ? st.arrivals_in_state[n] : 0;
        vals.push_back(static_cast<double>(a) / T);
      }
      if (vals.size() >= 2) {
        MetricSummary ms = summarize(vals);
        agg.rates.points.push_back({static_cast<int>(n), ms.mean,
                                    ms.stddev / std::sqrt(static_cast<double>(vals.size()))});
      }
      for (const auto& run : runs) {
        const ServerStats& st = run.server[i];
        if (n < st.time_in_state.size() && run.t_end > 0.0)
          pi_sum[static_cast<Eigen::Index>(n)] += st.time_in_state[n] / run.t_end;
      }
    }
    agg.pi_mean = pi_sum / static_cast<double>(reps);
  }
  return out;
}

}  // namespace gjsq
