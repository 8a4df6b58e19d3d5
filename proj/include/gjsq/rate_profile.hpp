#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace gjsq {

enum class RateProvenance { oracle, approximation, simulation };

inline const char* provenance_name(RateProvenance p) {
  switch (p) {
    case RateProvenance::oracle: return "oracle";
    case RateProvenance::approximation: return "approximation";
    case RateProvenance::simulation: return "simulation";
  }
  return "?";
}

struct RatePoint {
  int n = 0;
  double value = 0.0;
  double stderr_est = std::nan("");  // NaN when not applicable
};

// Conditional arrival-rate series lambda_i(n) for one server, tagged with
// where it came from. `points` is sorted by n and may be sparse (simulation
// profiles omit unexposed states). Analytic profiles additionally carry an
// eventually-periodic tail: for n >= tail_start,
//   lambda(n) = tail_cycle[(n - tail_start) mod tail_cycle.size()].
struct RateProfile {
  RateProvenance provenance = RateProvenance::approximation;
  std::vector<RatePoint> points;
  std::vector<double> tail_cycle;
  int tail_start = -1;  // -1: no analytic tail

  bool has_tail() const { return tail_start >= 0 && !tail_cycle.empty(); }

  std::optional<double> rate_at(int n) const {
    if (has_tail() && n >= tail_start) {
      return tail_cycle[static_cast<std::size_t>(n - tail_start) % tail_cycle.size()];
    }
    for (const auto& p : points) {
      if (p.n == n) return p.value;
      if (p.n > n) break;
    }
    return std::nullopt;
  }

  // Largest m such that points cover n = 0..m-1 contiguously.
  int contiguous_prefix() const {
    int expect = 0;
    for (const auto& p : points) {
      if (p.n != expect) break;
      ++expect;
    }
    return expect;
  }

  // Analytic profiles must cover 0..tail_start-1 so a birth-death chain can
  // be built from n = 0.
  bool contiguous() const {
    return has_tail() ? contiguous_prefix() >= tail_start
                      : contiguous_prefix() == static_cast<int>(points.size());
  }
};

}  // namespace gjsq
