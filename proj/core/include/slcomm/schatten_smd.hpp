#pragma once

#include <cstddef>
#include <cstdint>

#include "slcomm/datagen.hpp"
#include "slcomm/ledger.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/schatten.hpp"

namespace slcomm {

/// Sparsified spectral mirror descent over the nuclear-norm ball.
struct SchattenConfig {
  std::size_t dim = 0;
  std::size_t examples = 0;
  std::size_t machines = 1;
  double q = 2.0;
  double radius = 1.0;
  double step = 0.0;
  /// Rank-one samples per hand-off and for the output; 0 disables.
  std::uint64_t transfer_samples = 0;
  std::uint64_t output_samples = 0;

  void validate() const;
};

/// Same rules as the vector case with R_q the S_q bound on the gradients.
SchattenConfig default_schatten_params(const InstanceInfo& info, std::size_t examples,
                                       std::size_t machines, double kappa_s = 1.0,
                                       double kappa_s0 = 1.0);

struct MatrixRunResult {
  DenseMatrix estimate;
  CommLedger ledger;
  std::size_t output_machine = 0;
  std::size_t output_step = 0;
  /// max over iterates of ||W_t||_{S_1} / B
  double max_nuclear_ratio = 0.0;
};

MatrixRunResult run_schatten_smd(MatrixSampler& data, const LinkFunction& link,
                                 const SchattenConfig& cfg, const CounterRng& rng);

}  // namespace slcomm
