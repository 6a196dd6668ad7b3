#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "slcomm/config.hpp"
#include "slcomm/datagen.hpp"
#include "slcomm/sparsify.hpp"

namespace slcomm {

enum class Algorithm { smd, fast_smd, jl_ogd, schatten_smd, centralized, centralized_ogd, truncation };

Algorithm algorithm_from_name(const std::string& name);
std::string algorithm_name(Algorithm algorithm);

struct InstanceSpec {
  std::string kind = "l1lq";  ///< l1lq, sparse_regression, hide_and_seek, l2l2, matrix
  std::size_t dim = 1000;
  double q = 2.0;
  double radius = 1.0;
  double feature_norm = 1.0;
  std::string link = "square";
  double noise = 0.5;
  std::size_t sparsity = 4;
  FeatureLaw law = FeatureLaw::sphere;
  double signal_mass = 0.5;
  double magnitude = 0.2;
  double bias = 0.4;
  std::optional<std::size_t> hidden;
  std::size_t rank = 2;
};

struct ProtocolSpec {
  std::size_t examples = 1024;
  std::size_t machines = 1;
  std::string params = "lipschitz";  ///< lipschitz or smooth
  std::optional<double> step;
  std::optional<double> gradient_bound;
  std::optional<std::uint64_t> transfer_samples;
  std::optional<std::uint64_t> output_samples;
  double kappa_s = 1.0;
  double kappa_s0 = 1.0;
  bool linear_model = false;
  bool high_probability = false;
  WireMode wire = WireMode::rank;
  std::optional<double> optimal_risk;
  std::optional<double> rsc;
  double c = 1.0;
  std::optional<std::size_t> keep;
  std::optional<std::size_t> sketch_dim;
  std::optional<std::size_t> column_sparsity;
  bool identity_sketch = false;
};

struct Scenario {
  std::string name = "scenario";
  Algorithm algorithm = Algorithm::smd;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  InstanceSpec instance;
  ProtocolSpec protocol;

  /// Sweep axes; an empty axis keeps the base value.
  std::vector<std::size_t> sweep_examples;
  std::vector<std::size_t> sweep_machines;
  std::vector<double> sweep_q;
  std::vector<std::uint64_t> sweep_transfer_samples;
  std::vector<std::uint64_t> sweep_output_samples;
};

/// Reads [scenario], [instance], [protocol] and [sweep]; unknown keys are errors.
Scenario load_scenario(const ConfigDocument& doc);

struct TrialRecord {
  std::size_t trial = 0;
  std::size_t examples = 0;
  std::size_t machines = 0;
  double q = 0.0;
  std::uint64_t transfer_samples = 0;
  std::uint64_t output_samples = 0;
  double excess_risk = 0.0;
  std::uint64_t total_bits = 0;
  std::uint64_t max_machine_bits = 0;
  double wall_time = 0.0;
};

struct RunSettings {
  unsigned workers = 1;
  /// Measure wall time; when false the column is written as 0 so that output
  /// files are byte-identical across runs.
  bool timing = false;
};

/// Worker count from SLCOMM_WORKERS, defaulting to the number of cores.
unsigned default_workers();

/// Runs every trial of the scenario at its base settings. Trials are
/// independent: trial t draws data and protocol randomness from streams keyed
/// by (seed, t), so results do not depend on the worker count.
std::vector<TrialRecord> run_scenario(const Scenario& scenario, const RunSettings& settings);

/// Cartesian product over the sweep axes; trial ids are numbered
/// consecutively across grid points.
std::vector<TrialRecord> sweep(const Scenario& scenario, const RunSettings& settings);

/// Single trial at the scenario's base settings.
TrialRecord run_trial(const Scenario& scenario, std::size_t trial);

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);

std::unique_ptr<ProblemInstance> make_instance(const InstanceSpec& spec, std::uint64_t seed);
std::unique_ptr<MatrixInstance> make_matrix_instance(const InstanceSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Hide-and-seek detection experiment

struct HideSeekConfig {
  std::size_t dim = 32;
  std::size_t examples = 10000;
  std::size_t machines = 10;
  double q = 2.0;
  double radius = 1.0;
  std::vector<double> biases{0.0, 0.4};
  /// Per-message bit budgets; 0 means unlimited.
  std::vector<std::uint64_t> budgets{0};
  std::size_t trials = 200;
  std::uint64_t seed = 0;
  std::optional<std::size_t> hidden;
  double kappa_s = 1.0;
  double kappa_s0 = 1.0;
};

HideSeekConfig load_hide_seek(const ConfigDocument& doc);

struct HideSeekRow {
  double bias = 0.0;
  std::uint64_t budget = 0;
  std::uint64_t transfer_samples = 0;
  std::uint64_t output_samples = 0;
  std::size_t trials = 0;
  std::size_t detections = 0;

  [[nodiscard]] double rate() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(detections) / static_cast<double>(trials);
  }
};

/// Largest s whose rank-mode message (header included) fits in `budget`
/// bits; 0 if not even s = 1 fits.
std::uint64_t samples_for_budget(std::size_t dim, std::uint64_t budget);

/// For every (bias, budget) pair runs the protocol and reports how often the
/// argmax coordinate of the output (ties broken at random) is the hidden one.
/// Trial t of every cell reuses the same data stream.
std::vector<HideSeekRow> hide_and_seek_scenario(const HideSeekConfig& cfg,
                                                const RunSettings& settings);
void write_hide_seek_csv(std::ostream& out, const std::vector<HideSeekRow>& rows);

// ---------------------------------------------------------------------------
// Invariant suites

struct CheckResult {
  std::string module;
  std::string name;
  std::size_t cases = 0;
  /// Worst empirical / bound ratio; the check passes when it is at most 1.
  double worst_ratio = 0.0;
  bool passed = false;
};

std::vector<std::string> verify_modules();
/// Runs the named suite ("all" runs every suite). Throws InvalidParameter for
/// unknown names.
std::vector<CheckResult> verify_module(const std::string& module, std::uint64_t seed);
void print_verify_report(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace slcomm
