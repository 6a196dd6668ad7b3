#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "slcomm/datagen.hpp"
#include "slcomm/ledger.hpp"
#include "slcomm/losses.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/sparsify.hpp"
#include "slcomm/vecspace.hpp"

namespace slcomm {

/// Sparsified mirror descent over m machines, each holding n = N/m examples.
struct ProtocolConfig {
  std::size_t dim = 0;
  std::size_t examples = 0;  ///< N
  std::size_t machines = 1;  ///< m
  double q = 2.0;            ///< dual exponent; the mirror map uses p = q/(q-1)
  double radius = 1.0;       ///< B, radius of the l1 constraint
  double step = 0.0;         ///< eta
  /// Samples s for inter-machine transfers; 0 sends iterates densely.
  std::uint64_t transfer_samples = 0;
  /// Samples s0 for the output; 0 outputs the selected iterate as is.
  std::uint64_t output_samples = 0;
  /// Average per machine and combine the sparsified averages instead of
  /// returning one random iterate.
  bool high_probability = false;
  WireMode wire = WireMode::rank;
  std::uint64_t materialize_limit = Channel::kDefaultMaterializeLimit;

  [[nodiscard]] std::size_t per_machine() const noexcept {
    return machines == 0 ? 0 : examples / machines;
  }
  [[nodiscard]] double p() const noexcept { return q == 2.0 ? 2.0 : q / (q - 1.0); }
  /// C_q = q - 1
  [[nodiscard]] double cq() const noexcept { return q - 1.0; }
  /// Throws InvalidConfig (or InvalidParameter for out-of-range scalars).
  void validate() const;
};

struct LipschitzDefaults {
  double kappa_s = 1.0;
  double kappa_s0 = 1.0;
  /// Linear models admit the smaller output sparsity s0 = ceil(kappa N).
  bool linear_model = false;
};

/// eta = (B/R) sqrt(1/(C_q N)), s = ceil(kappa_s m^{2(q-1)}),
/// s0 = ceil(kappa_s0 N^{q/2}) (or ceil(kappa_s0 N) for linear models).
ProtocolConfig default_params_lipschitz(std::size_t dim, double q, double radius,
                                        double gradient_bound, std::size_t examples,
                                        std::size_t machines, const LipschitzDefaults& opts = {});
ProtocolConfig default_params_lipschitz(const InstanceInfo& info, std::size_t examples,
                                        std::size_t machines, const LipschitzDefaults& opts = {});

/// Smooth losses with beta_q = beta_phi R^2 and optimal risk L* >= 0:
/// eta = min(sqrt(B^2/(C beta L* N)), 1/(4 C beta)),
/// s0 = min(ceil(sqrt(beta B^2 N/(C L*))), ceil(N/C)); terms with L* = 0 drop out.
ProtocolConfig default_params_smooth(std::size_t dim, double q, double radius, double beta_q,
                                     double optimal_risk, std::size_t examples,
                                     std::size_t machines, double kappa_s = 1.0);

/// Per-machine terms of the mirror-descent regret inequality
/// sum <g_t, w_t - w*> <= (D(w*||w_1) - D(w*||w_{n+1}))/eta + (eta C_q / 2) sum ||g_t||_q^2.
struct RegretRecord {
  std::size_t machine = 0;
  std::size_t round = 0;
  double linearized_regret = 0.0;
  double grad_sq_sum = 0.0;
  double bregman_start = 0.0;
  double bregman_end = 0.0;
  double step = 0.0;
  double cq = 0.0;

  [[nodiscard]] double bound() const noexcept {
    return (bregman_start - bregman_end) / step + 0.5 * step * cq * grad_sq_sum;
  }
  /// bound - regret; nonnegative up to rounding.
  [[nodiscard]] double slack() const noexcept { return bound() - linearized_regret; }
};

struct RunTrace {
  std::vector<RegretRecord> regret;
  /// max over all iterates of ||w_t||_1 / B
  double max_l1_ratio = 0.0;
  std::size_t output_machine = 0;
  std::size_t output_step = 0;
  std::size_t active_projections = 0;
  /// Pre-update iterates in visiting order (only with record_iterates).
  std::vector<DenseVector> iterates;
};

struct RunOptions {
  /// Comparator for the regret invariant; regret is not tracked when null.
  const DenseVector* comparator = nullptr;
  bool record_iterates = false;
};

struct RunResult {
  DenseVector estimate;
  CommLedger ledger;
  RunTrace trace;
};

/// Sequential distributed mirror descent with Maurey-sparsified hand-offs.
/// Machine i processes examples [(i-1)n, in) of `data` in order.
RunResult run_smd(ExampleSampler& data, const LinkFunction& link, const ProtocolConfig& cfg,
                  const CounterRng& rng, const RunOptions& opts = {});

/// Single-machine mirror descent with no sparsification; draws its output
/// index from the same stream as run_smd, so both can share randomness.
RunResult run_centralized_md(ExampleSampler& data, const LinkFunction& link,
                             const ProtocolConfig& cfg, const CounterRng& rng,
                             const RunOptions& opts = {});

/// Baseline: every machine keeps the `keep` largest-magnitude coordinates of
/// each feature vector and ships its truncated examples to a server, which
/// runs centralized mirror descent on them. Each example costs
/// 32 + k (ceil(log2 d) + 64) + 64 bits.
RunResult run_truncation_baseline(ExampleSampler& data, const LinkFunction& link,
                                  const ProtocolConfig& cfg, std::size_t keep,
                                  const CounterRng& rng);

namespace detail {

/// Contiguous block of steps executed by one machine.
struct Segment {
  std::size_t machine = 0;  ///< 1-based
  std::size_t steps = 0;
};

struct EngineParams {
  std::size_t dim = 0;
  double q = 2.0;
  double radius = 1.0;
  double step = 0.0;
  std::uint64_t transfer_samples = 0;
  std::uint64_t output_samples = 0;
  bool high_probability = false;
  std::size_t round = 0;
  /// Center of the regularizer; empty means the origin.
  DenseVector center;
  /// First iterate; empty means the center (or the origin).
  DenseVector start;
};

struct EngineOutput {
  DenseVector estimate;
  RunTrace trace;
};

EngineOutput run_engine(ExampleSampler& data, const LinkFunction& link, const EngineParams& p,
                        const std::vector<Segment>& segments, const CounterRng& rng,
                        Channel& channel, const RunOptions& opts);

std::vector<Segment> even_segments(std::size_t machines, std::size_t per_machine);

}  // namespace detail

}  // namespace slcomm
