#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slcomm/protocols.hpp"

namespace slcomm {

/// Restarted sparsified mirror descent for losses with restricted strong
/// convexity. Round k shrinks the effective radius to B_{k-1}, with
/// B_j = 2^{-j/2} B_1, and recenters the regularizer at the previous output.
struct FastRateConfig {
  std::size_t dim = 0;
  std::size_t examples = 0;  ///< total budget N
  std::size_t machines = 1;  ///< m; machine i holds examples [(i-1)N/m, iN/m)
  double q = 2.0;
  double radius = 1.0;          ///< B_1
  double gradient_bound = 1.0;  ///< R_q
  double rsc = 1.0;             ///< gamma_q
  double c = 1.0;               ///< high-probability constant of the inner guarantee
  double kappa_s = 1.0;
  double kappa_s0 = 1.0;
  WireMode wire = WireMode::rank;
  std::uint64_t materialize_limit = Channel::kDefaultMaterializeLimit;

  void validate() const;
};

struct FastRateRound {
  std::size_t index = 0;          ///< k, 1-based
  std::size_t examples = 0;       ///< N_k
  std::size_t first_example = 0;  ///< offset of the round's first example
  double radius_bar = 0.0;        ///< B_{k-1}
  std::size_t machines_touched = 0;
  double step = 0.0;
  std::uint64_t transfer_samples = 0;
  std::uint64_t output_samples = 0;
};

/// B_j = 2^{-j/2} B_1 for any integer j (B_{-1} = sqrt(2) B_1).
double fast_rate_radius(double b1, long j);

/// N_k = ceil(C_q (4 c R / (gamma B_{k-2}))^2); T is the largest number of
/// rounds whose sizes fit in N. Throws InvalidConfig when T = 0.
std::vector<FastRateRound> fast_rate_schedule(const FastRateConfig& cfg);

struct FastRunResult {
  DenseVector estimate;
  CommLedger ledger;
  std::vector<FastRateRound> rounds;
  std::vector<RunTrace> traces;
  std::vector<DenseVector> round_outputs;
};

/// Runs the restarted protocol. Round k draws its randomness from
/// rng.split(k); with one round it coincides with run_smd on the first N_1
/// examples using rng.split(1).
FastRunResult run_fast_smd(ExampleSampler& data, const LinkFunction& link,
                           const FastRateConfig& cfg, const CounterRng& rng,
                           const RunOptions& opts = {});

}  // namespace slcomm
