#include <cmath>
#include <thread>
#include <vector>

#include "crw/errors.hpp"
#include "crw/oracle.hpp"
#include "crw/rng.hpp"

namespace crw::oracle {

namespace {

struct PartitionSums {
  std::uint64_t absorbed = 0;
  std::uint64_t hit_upper = 0;
  std::uint64_t truncated = 0;
  double sum_tau = 0.0;
  double sum_tau_sq = 0.0;
};

// Draws an index from a <=3-atom law by inverse CDF; the fixed state order
// (1, 0, -1) is part of the reproducibility contract.
int draw(const std::vector<double>& weights, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(weights.size());
  for (int j = 0; j < n; ++j) {
    acc += weights[j];
    if (u < acc) return j;
  }
  return n - 1;
}

PartitionSums run_partition(const IncrementKernel& k, Barriers b, std::uint64_t n_paths,
                            std::uint64_t seed, std::uint64_t step_cap,
                            std::uint32_t index) {
  rng::Xoshiro256pp gen(seed);
  for (std::uint32_t t = 0; t < index; ++t) gen.jump();

  PartitionSums out;
  for (std::uint64_t path = 0; path < n_paths; ++path) {
    int last = draw(k.initial, gen.uniform01());
    int pos = k.states[last];
    std::uint64_t steps = 1;
    bool absorbed = pos >= b.A || pos <= -b.B;
    while (!absorbed && steps < step_cap) {
      last = draw(k.rows[last], gen.uniform01());
      pos += k.states[last];
      ++steps;
      absorbed = pos >= b.A || pos <= -b.B;
    }
    if (!absorbed) {
      ++out.truncated;
      continue;
    }
    ++out.absorbed;
    if (pos >= b.A) ++out.hit_upper;
    const double tau = static_cast<double>(steps);
    out.sum_tau += tau;
    out.sum_tau_sq += tau * tau;
  }
  return out;
}

MonteCarloResult simulate_impl(const IncrementKernel& k, Barriers b,
                               std::uint64_t n_paths, std::uint64_t seed,
                               std::uint64_t step_cap, std::uint32_t partitions) {
  if (n_paths < 1) fail(ErrorCode::Domain, "n_paths must be at least 1");
  if (step_cap < 1) fail(ErrorCode::Domain, "step_cap must be at least 1");
  if (partitions < 1) fail(ErrorCode::Domain, "partitions must be at least 1");

  const std::uint64_t base = n_paths / partitions;
  const std::uint64_t rem = n_paths % partitions;
  std::vector<PartitionSums> parts(partitions);

  if (partitions == 1) {
    parts[0] = run_partition(k, b, n_paths, seed, step_cap, 0);
  } else {
    std::vector<std::thread> workers;
    workers.reserve(partitions);
    for (std::uint32_t i = 0; i < partitions; ++i) {
      const std::uint64_t chunk = base + (i < rem ? 1 : 0);
      workers.emplace_back([&, i, chunk] {
        parts[i] = run_partition(k, b, chunk, seed, step_cap, i);
      });
    }
    for (auto& w : workers) w.join();
  }

  // Merge in partition order; results do not depend on thread scheduling.
  PartitionSums total;
  for (const auto& p : parts) {
    total.absorbed += p.absorbed;
    total.hit_upper += p.hit_upper;
    total.truncated += p.truncated;
    total.sum_tau += p.sum_tau;
    total.sum_tau_sq += p.sum_tau_sq;
  }

  MonteCarloResult res;
  res.n_paths = n_paths;
  res.seed = seed;
  res.truncated_paths = total.truncated;
  res.partitions = partitions;
  if (total.absorbed > 0) {
    const double n = static_cast<double>(total.absorbed);
    res.alpha_hat = static_cast<double>(total.hit_upper) / n;
    res.tau_hat = total.sum_tau / n;
    res.stderr_alpha = std::sqrt(res.alpha_hat * (1.0 - res.alpha_hat) / n);
    if (total.absorbed > 1) {
      const double var =
          std::max(0.0, (total.sum_tau_sq - n * res.tau_hat * res.tau_hat) / (n - 1.0));
      res.stderr_tau = std::sqrt(var / n);
    }
  } else {
    res.alpha_hat = std::nan("");
    res.tau_hat = std::nan("");
    res.stderr_alpha = std::nan("");
    res.stderr_tau = std::nan("");
  }
  return res;
}

}  // namespace

MonteCarloResult simulate(const Chain& chain, Barriers b, std::uint64_t n_paths,
                          std::uint64_t seed, std::uint64_t step_cap,
                          std::uint32_t partitions) {
  ensure_valid(chain);
  ensure_valid(b);
  return simulate_impl(kernel(chain), b, n_paths, seed, step_cap, partitions);
}

MonteCarloResult simulate(const Chain& chain, std::span<const double> initial,
                          Barriers b, std::uint64_t n_paths, std::uint64_t seed,
                          std::uint64_t step_cap, std::uint32_t partitions) {
  ensure_valid(chain);
  ensure_valid(b);
  return simulate_impl(kernel(chain, initial), b, n_paths, seed, step_cap, partitions);
}

}  // namespace crw::oracle
