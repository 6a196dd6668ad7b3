#include "slcomm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "slcomm/errors.hpp"
#include "slcomm/fast_rate.hpp"
#include "slcomm/jl_ogd.hpp"
#include "slcomm/protocols.hpp"
#include "slcomm/schatten_smd.hpp"

namespace slcomm {

namespace {

constexpr std::uint64_t kDataStream = 0xda7a;
constexpr std::uint64_t kProtocolStream = 0x9807;

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::size_t> to_sizes(const std::vector<double>& v, const char* what) {
  std::vector<std::size_t> out;
  for (double x : v) {
    if (!(x >= 1.0) || std::floor(x) != x) {
      throw InvalidConfig(std::string("[sweep] ") + what + ": entries must be positive integers");
    }
    out.push_back(static_cast<std::size_t>(x));
  }
  return out;
}

std::vector<std::uint64_t> to_u64(const std::vector<double>& v, const char* what) {
  std::vector<std::uint64_t> out;
  for (double x : v) {
    if (!(x >= 0.0) || std::floor(x) != x) {
      throw InvalidConfig(std::string("[sweep] ") + what + ": entries must be nonnegative integers");
    }
    out.push_back(static_cast<std::uint64_t>(x));
  }
  return out;
}

/// Runs f(i) for i in [0, count) on `workers` threads; rethrows the first error.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F&& f) {
  const unsigned threads = std::max(1U, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          f(i);
        } catch (...) {
          const std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

ProtocolConfig vector_config(const Scenario& sc, const InstanceInfo& info) {
  const ProtocolSpec& ps = sc.protocol;
  const double grad = ps.gradient_bound.value_or(info.gradient_bound);
  ProtocolConfig cfg;
  if (ps.params == "smooth") {
    const double lstar = ps.optimal_risk.value_or(info.optimal_risk);
    cfg = default_params_smooth(info.dim, info.q, info.radius, info.smoothness, lstar, ps.examples,
                                ps.machines, ps.kappa_s);
  } else if (ps.params == "lipschitz") {
    LipschitzDefaults opts{ps.kappa_s, ps.kappa_s0, ps.linear_model};
    cfg = default_params_lipschitz(info.dim, info.q, info.radius, grad, ps.examples, ps.machines,
                                   opts);
  } else {
    throw InvalidConfig("[protocol] params: expected 'lipschitz' or 'smooth', got '" + ps.params +
                        "'");
  }
  if (ps.step) cfg.step = *ps.step;
  if (ps.transfer_samples) cfg.transfer_samples = *ps.transfer_samples;
  if (ps.output_samples) cfg.output_samples = *ps.output_samples;
  cfg.high_probability = ps.high_probability;
  cfg.wire = ps.wire;
  cfg.validate();
  return cfg;
}

TrialRecord run_vector_trial(const Scenario& sc, const ProblemInstance& inst, std::size_t trial) {
  const InstanceInfo& info = inst.info();
  const ProtocolSpec& ps = sc.protocol;
  const std::uint64_t data_seed = CounterRng(sc.seed, kDataStream).split(trial)();
  const CounterRng rng = CounterRng(sc.seed, kProtocolStream).split(trial);
  auto data = inst.sampler(data_seed);

  TrialRecord rec;
  rec.trial = trial;
  rec.examples = ps.examples;
  rec.machines = ps.machines;
  rec.q = info.q;

  DenseVector estimate;
  CommLedger ledger;
  const double grad = ps.gradient_bound.value_or(info.gradient_bound);
  switch (sc.algorithm) {
    case Algorithm::smd:
    case Algorithm::centralized:
    case Algorithm::truncation: {
      const ProtocolConfig cfg = vector_config(sc, info);
      RunResult r;
      if (sc.algorithm == Algorithm::smd) {
        r = run_smd(*data, inst.link(), cfg, rng);
        rec.transfer_samples = cfg.transfer_samples;
        rec.output_samples = cfg.output_samples;
      } else if (sc.algorithm == Algorithm::centralized) {
        r = run_centralized_md(*data, inst.link(), cfg, rng);
      } else {
        const double n = static_cast<double>(ps.examples);
        const std::size_t keep = ps.keep.value_or(static_cast<std::size_t>(std::min(
            static_cast<double>(info.dim), std::ceil(ps.kappa_s0 * std::pow(n, info.q / 2.0)))));
        r = run_truncation_baseline(*data, inst.link(), cfg, keep, rng);
        rec.output_samples = keep;
      }
      estimate = std::move(r.estimate);
      ledger = std::move(r.ledger);
      break;
    }
    case Algorithm::fast_smd: {
      FastRateConfig cfg;
      cfg.dim = info.dim;
      cfg.examples = ps.examples;
      cfg.machines = ps.machines;
      cfg.q = info.q;
      cfg.radius = info.radius;
      cfg.gradient_bound = grad;
      cfg.rsc = ps.rsc.value_or(info.rsc);
      cfg.c = ps.c;
      cfg.kappa_s = ps.kappa_s;
      cfg.kappa_s0 = ps.kappa_s0;
      cfg.wire = ps.wire;
      FastRunResult r = run_fast_smd(*data, inst.link(), cfg, rng);
      rec.transfer_samples = r.rounds.front().transfer_samples;
      rec.output_samples = r.rounds.front().output_samples;
      estimate = std::move(r.estimate);
      ledger = std::move(r.ledger);
      break;
    }
    case Algorithm::jl_ogd: {
      JlConfig cfg = default_jl_config(info.dim, ps.examples, ps.machines, info.radius, grad);
      if (ps.sketch_dim) cfg.sketch_dim = *ps.sketch_dim;
      if (ps.column_sparsity) cfg.column_sparsity = *ps.column_sparsity;
      if (ps.step) cfg.step = *ps.step;
      cfg.identity_sketch = ps.identity_sketch;
      RunResult r = run_jl_ogd(*data, inst.link(), cfg, rng);
      rec.transfer_samples = cfg.identity_sketch ? info.dim : cfg.sketch_dim;
      estimate = std::move(r.estimate);
      ledger = std::move(r.ledger);
      break;
    }
    case Algorithm::centralized_ogd: {
      const double step = ps.step.value_or(info.radius /
                                           (grad * std::sqrt(static_cast<double>(ps.examples))));
      RunResult r = run_centralized_ogd(*data, inst.link(), info.dim, ps.examples, step);
      estimate = std::move(r.estimate);
      ledger = std::move(r.ledger);
      break;
    }
    case Algorithm::schatten_smd:
      throw InvalidConfig("schatten_smd requires a matrix instance");
  }
  rec.excess_risk = inst.excess_risk(estimate);
  rec.total_bits = ledger.total_bits();
  rec.max_machine_bits = ledger.max_machine_bits();
  return rec;
}

TrialRecord run_matrix_trial(const Scenario& sc, const MatrixInstance& inst, std::size_t trial) {
  const ProtocolSpec& ps = sc.protocol;
  if (sc.algorithm != Algorithm::schatten_smd) {
    throw InvalidConfig("matrix instances only support the schatten_smd algorithm");
  }
  const std::uint64_t data_seed = CounterRng(sc.seed, kDataStream).split(trial)();
  const CounterRng rng = CounterRng(sc.seed, kProtocolStream).split(trial);
  auto data = inst.sampler(data_seed);
  InstanceInfo info = inst.info();
  if (ps.gradient_bound) info.gradient_bound = *ps.gradient_bound;
  SchattenConfig cfg = default_schatten_params(info, ps.examples, ps.machines, ps.kappa_s,
                                               ps.kappa_s0);
  if (ps.step) cfg.step = *ps.step;
  if (ps.transfer_samples) cfg.transfer_samples = *ps.transfer_samples;
  if (ps.output_samples) cfg.output_samples = *ps.output_samples;
  MatrixRunResult r = run_schatten_smd(*data, inst.link(), cfg, rng);
  TrialRecord rec;
  rec.trial = trial;
  rec.examples = ps.examples;
  rec.machines = ps.machines;
  rec.q = info.q;
  rec.transfer_samples = cfg.transfer_samples;
  rec.output_samples = cfg.output_samples;
  rec.excess_risk = inst.excess_risk(r.estimate);
  rec.total_bits = r.ledger.total_bits();
  rec.max_machine_bits = r.ledger.max_machine_bits();
  return rec;
}

struct PreparedInstance {
  std::unique_ptr<ProblemInstance> vector;
  std::unique_ptr<MatrixInstance> matrix;
};

PreparedInstance prepare(const Scenario& sc) {
  PreparedInstance p;
  if (sc.instance.kind == "matrix") {
    p.matrix = make_matrix_instance(sc.instance, sc.seed);
  } else {
    p.vector = make_instance(sc.instance, sc.seed);
  }
  return p;
}

TrialRecord timed_trial(const Scenario& sc, const PreparedInstance& inst, std::size_t trial,
                        bool timing) {
  const auto start = std::chrono::steady_clock::now();
  TrialRecord rec = inst.matrix ? run_matrix_trial(sc, *inst.matrix, trial)
                                : run_vector_trial(sc, *inst.vector, trial);
  if (timing) {
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

std::vector<TrialRecord> run_prepared(const Scenario& sc, const PreparedInstance& inst,
                                      const RunSettings& settings, std::size_t id_offset) {
  std::vector<TrialRecord> out(sc.trials);
  parallel_for(sc.trials, settings.workers, [&](std::size_t t) {
    out[t] = timed_trial(sc, inst, t, settings.timing);
    out[t].trial = id_offset + t;
  });
  return out;
}

}  // namespace

Algorithm algorithm_from_name(const std::string& name) {
  if (name == "smd") return Algorithm::smd;
  if (name == "fast_smd") return Algorithm::fast_smd;
  if (name == "jl_ogd") return Algorithm::jl_ogd;
  if (name == "schatten_smd") return Algorithm::schatten_smd;
  if (name == "centralized") return Algorithm::centralized;
  if (name == "centralized_ogd") return Algorithm::centralized_ogd;
  if (name == "truncation") return Algorithm::truncation;
  throw InvalidConfig("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::smd: return "smd";
    case Algorithm::fast_smd: return "fast_smd";
    case Algorithm::jl_ogd: return "jl_ogd";
    case Algorithm::schatten_smd: return "schatten_smd";
    case Algorithm::centralized: return "centralized";
    case Algorithm::centralized_ogd: return "centralized_ogd";
    case Algorithm::truncation: return "truncation";
  }
  return "unknown";
}

Scenario load_scenario(const ConfigDocument& doc) {
  doc.require_known_keys("scenario", {"name", "algorithm", "trials", "seed"});
  doc.require_known_keys("instance", {"kind", "dim", "q", "radius", "feature_norm", "link",
                                      "noise", "sparsity", "law", "signal_mass", "magnitude",
                                      "bias", "hidden", "rank"});
  doc.require_known_keys("protocol",
                         {"examples", "machines", "params", "step", "gradient_bound",
                          "transfer_samples", "output_samples", "kappa_s", "kappa_s0",
                          "linear_model", "high_probability", "wire", "optimal_risk", "rsc", "c",
                          "keep", "sketch_dim", "column_sparsity", "identity_sketch"});
  doc.require_known_keys("sweep",
                         {"examples", "machines", "q", "transfer_samples", "output_samples"});
  for (const std::string& key : doc.keys("")) {
    throw InvalidConfig(doc.source() + ": key '" + key + "' appears before any section header");
  }

  Scenario sc;
  sc.name = doc.get_string_or("scenario", "name", sc.name);
  sc.algorithm = algorithm_from_name(doc.get_string_or("scenario", "algorithm", "smd"));
  sc.trials = doc.get_uint_or("scenario", "trials", 1);
  sc.seed = doc.get_uint_or("scenario", "seed", 0);
  if (sc.trials == 0) throw InvalidConfig("[scenario] trials must be positive");

  InstanceSpec& is = sc.instance;
  is.kind = doc.get_string_or("instance", "kind", is.kind);
  is.dim = doc.get_uint_or("instance", "dim", is.dim);
  is.q = doc.get_double_or("instance", "q", is.q);
  is.radius = doc.get_double_or("instance", "radius", is.radius);
  is.feature_norm = doc.get_double_or("instance", "feature_norm", is.feature_norm);
  is.link = doc.get_string_or("instance", "link", is.link);
  is.noise = doc.get_double_or("instance", "noise", is.noise);
  is.sparsity = doc.get_uint_or("instance", "sparsity", is.sparsity);
  if (auto law = doc.get_string("instance", "law")) is.law = feature_law_from_name(*law);
  is.signal_mass = doc.get_double_or("instance", "signal_mass", is.signal_mass);
  is.magnitude = doc.get_double_or("instance", "magnitude", is.magnitude);
  is.bias = doc.get_double_or("instance", "bias", is.bias);
  if (auto h = doc.get_uint("instance", "hidden")) is.hidden = *h;
  is.rank = doc.get_uint_or("instance", "rank", is.rank);

  ProtocolSpec& ps = sc.protocol;
  ps.examples = doc.get_uint_or("protocol", "examples", ps.examples);
  ps.machines = doc.get_uint_or("protocol", "machines", ps.machines);
  ps.params = doc.get_string_or("protocol", "params", ps.params);
  ps.step = doc.get_double("protocol", "step");
  ps.gradient_bound = doc.get_double("protocol", "gradient_bound");
  ps.transfer_samples = doc.get_uint("protocol", "transfer_samples");
  ps.output_samples = doc.get_uint("protocol", "output_samples");
  ps.kappa_s = doc.get_double_or("protocol", "kappa_s", ps.kappa_s);
  ps.kappa_s0 = doc.get_double_or("protocol", "kappa_s0", ps.kappa_s0);
  ps.linear_model = doc.get_bool_or("protocol", "linear_model", ps.linear_model);
  ps.high_probability = doc.get_bool_or("protocol", "high_probability", ps.high_probability);
  const std::string wire = doc.get_string_or("protocol", "wire", "rank");
  if (wire == "rank") {
    ps.wire = WireMode::rank;
  } else if (wire == "list") {
    ps.wire = WireMode::list;
  } else {
    throw InvalidConfig("[protocol] wire: expected 'rank' or 'list', got '" + wire + "'");
  }
  ps.optimal_risk = doc.get_double("protocol", "optimal_risk");
  ps.rsc = doc.get_double("protocol", "rsc");
  ps.c = doc.get_double_or("protocol", "c", ps.c);
  if (auto k = doc.get_uint("protocol", "keep")) ps.keep = *k;
  if (auto k = doc.get_uint("protocol", "sketch_dim")) ps.sketch_dim = *k;
  if (auto k = doc.get_uint("protocol", "column_sparsity")) ps.column_sparsity = *k;
  ps.identity_sketch = doc.get_bool_or("protocol", "identity_sketch", ps.identity_sketch);

  if (auto v = doc.get_double_list("sweep", "examples")) sc.sweep_examples = to_sizes(*v, "examples");
  if (auto v = doc.get_double_list("sweep", "machines")) sc.sweep_machines = to_sizes(*v, "machines");
  if (auto v = doc.get_double_list("sweep", "q")) sc.sweep_q = *v;
  if (auto v = doc.get_double_list("sweep", "transfer_samples")) {
    sc.sweep_transfer_samples = to_u64(*v, "transfer_samples");
  }
  if (auto v = doc.get_double_list("sweep", "output_samples")) {
    sc.sweep_output_samples = to_u64(*v, "output_samples");
  }
  return sc;
}

unsigned default_workers() {
  const char* env = std::getenv("SLCOMM_WORKERS");
  if (env == nullptr || *env == '\0') return std::max(1U, std::thread::hardware_concurrency());
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1 || v > 1024) {
    throw InvalidConfig("SLCOMM_WORKERS must be an integer in [1, 1024]");
  }
  return static_cast<unsigned>(v);
}

std::unique_ptr<ProblemInstance> make_instance(const InstanceSpec& spec, std::uint64_t seed) {
  if (spec.kind == "l1lq") {
    L1LqOptions o;
    o.dim = spec.dim;
    o.radius = spec.radius;
    o.feature_norm = spec.feature_norm;
    o.q = spec.q;
    o.link = LinkFunction::from_name(spec.link);
    o.noise = spec.noise;
    o.sparsity = spec.sparsity;
    o.law = spec.law;
    o.signal_mass = spec.signal_mass;
    return gen_l1lq(o, seed);
  }
  if (spec.kind == "sparse_regression") {
    SparseRegressionOptions o;
    o.dim = spec.dim;
    o.sparsity = spec.sparsity;
    o.magnitude = spec.magnitude;
    o.q = spec.q;
    o.noise = spec.noise;
    return gen_sparse_regression(o, seed);
  }
  if (spec.kind == "hide_and_seek") {
    HideAndSeekOptions o;
    o.dim = spec.dim;
    o.bias = spec.bias;
    o.hidden = spec.hidden.value_or(spec.dim / 2);
    o.q = spec.q;
    o.radius = spec.radius;
    return gen_hide_and_seek(o);
  }
  if (spec.kind == "l2l2") {
    L2L2Options o;
    o.dim = spec.dim;
    o.radius = spec.radius;
    o.feature_norm = spec.feature_norm;
    o.noise = spec.noise;
    o.sparsity = spec.sparsity;
    o.law = spec.law;
    o.signal_mass = spec.signal_mass;
    return gen_l2l2(o, seed);
  }
  throw InvalidConfig("unknown instance kind '" + spec.kind + "'");
}

std::unique_ptr<MatrixInstance> make_matrix_instance(const InstanceSpec& spec,
                                                     std::uint64_t seed) {
  if (spec.kind != "matrix") throw InvalidConfig("instance kind '" + spec.kind + "' is not a matrix instance");
  MatrixOptions o;
  o.dim = spec.dim;
  o.q = spec.q;
  o.radius = spec.radius;
  o.feature_norm = spec.feature_norm;
  o.rank = spec.rank;
  o.noise = spec.noise;
  o.signal_mass = spec.signal_mass;
  return gen_matrix_s1sq(o, seed);
}

TrialRecord run_trial(const Scenario& scenario, std::size_t trial) {
  const PreparedInstance inst = prepare(scenario);
  return timed_trial(scenario, inst, trial, false);
}

std::vector<TrialRecord> run_scenario(const Scenario& scenario, const RunSettings& settings) {
  const PreparedInstance inst = prepare(scenario);
  return run_prepared(scenario, inst, settings, 0);
}

std::vector<TrialRecord> sweep(const Scenario& scenario, const RunSettings& settings) {
  auto axis = [](const auto& values, auto base) {
    using T = decltype(base);
    return values.empty() ? std::vector<T>{base} : std::vector<T>(values.begin(), values.end());
  };
  const auto qs = axis(scenario.sweep_q, scenario.instance.q);
  const auto ns = axis(scenario.sweep_examples, scenario.protocol.examples);
  const auto ms = axis(scenario.sweep_machines, scenario.protocol.machines);
  std::vector<std::optional<std::uint64_t>> ss;
  for (auto v : scenario.sweep_transfer_samples) ss.emplace_back(v);
  if (ss.empty()) ss.push_back(scenario.protocol.transfer_samples);
  std::vector<std::optional<std::uint64_t>> s0s;
  for (auto v : scenario.sweep_output_samples) s0s.emplace_back(v);
  if (s0s.empty()) s0s.push_back(scenario.protocol.output_samples);

  std::vector<TrialRecord> all;
  for (double q : qs) {
    Scenario base = scenario;
    base.instance.q = q;
    const PreparedInstance inst = prepare(base);
    for (std::size_t n : ns) {
      for (std::size_t m : ms) {
        for (const auto& s : ss) {
          for (const auto& s0 : s0s) {
            Scenario point = base;
            point.protocol.examples = n;
            point.protocol.machines = m;
            point.protocol.transfer_samples = s;
            point.protocol.output_samples = s0;
            auto recs = run_prepared(point, inst, settings, all.size());
            all.insert(all.end(), recs.begin(), recs.end());
          }
        }
      }
    }
  }
  return all;
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
  out << "trial,N,m,q,s,s0,excess_risk,total_bits,max_machine_bits,wall_time\n";
  for (const TrialRecord& r : records) {
    out << r.trial << ',' << r.examples << ',' << r.machines << ',' << format_double(r.q) << ','
        << r.transfer_samples << ',' << r.output_samples << ',' << format_double(r.excess_risk)
        << ',' << r.total_bits << ',' << r.max_machine_bits << ',' << format_double(r.wall_time)
        << '\n';
  }
}

// ---------------------------------------------------------------------------

HideSeekConfig load_hide_seek(const ConfigDocument& doc) {
  doc.require_known_keys("hide_and_seek",
                         {"dim", "examples", "machines", "q", "radius", "biases", "budgets",
                          "trials", "seed", "hidden", "kappa_s", "kappa_s0"});
  HideSeekConfig cfg;
  const std::string s = "hide_and_seek";
  cfg.dim = doc.get_uint_or(s, "dim", cfg.dim);
  cfg.examples = doc.get_uint_or(s, "examples", cfg.examples);
  cfg.machines = doc.get_uint_or(s, "machines", cfg.machines);
  cfg.q = doc.get_double_or(s, "q", cfg.q);
  cfg.radius = doc.get_double_or(s, "radius", cfg.radius);
  if (auto v = doc.get_double_list(s, "biases")) cfg.biases = *v;
  if (auto v = doc.get_double_list(s, "budgets")) cfg.budgets = to_u64(*v, "budgets");
  cfg.trials = doc.get_uint_or(s, "trials", cfg.trials);
  cfg.seed = doc.get_uint_or(s, "seed", cfg.seed);
  if (auto h = doc.get_uint(s, "hidden")) cfg.hidden = *h;
  cfg.kappa_s = doc.get_double_or(s, "kappa_s", cfg.kappa_s);
  cfg.kappa_s0 = doc.get_double_or(s, "kappa_s0", cfg.kappa_s0);
  return cfg;
}

std::uint64_t samples_for_budget(std::size_t dim, std::uint64_t budget) {
  auto fits = [&](std::uint64_t s) { return kMessageHeaderBits + rank_payload_bits(dim, s) <= budget; };
  if (!fits(1)) return 0;
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (hi <= kMaxSamples && fits(hi)) {
    lo = hi;
    hi *= 2;
  }
  hi = std::min(hi, kMaxSamples + 1);
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (fits(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::vector<HideSeekRow> hide_and_seek_scenario(const HideSeekConfig& cfg,
                                                const RunSettings& settings) {
  if (cfg.trials == 0) throw InvalidConfig("hide-and-seek needs at least one trial");
  if (cfg.examples % cfg.machines != 0) throw InvalidConfig("N is not divisible by m");
  const std::size_t hidden = cfg.hidden.value_or(cfg.dim / 2);
  const double cq = cfg.q - 1.0;
  const double n = static_cast<double>(cfg.examples);
  const std::uint64_t default_s = static_cast<std::uint64_t>(
      std::ceil(cfg.kappa_s * std::pow(static_cast<double>(cfg.machines), 2.0 * cq) - 1e-9));
  const std::uint64_t default_s0 = static_cast<std::uint64_t>(std::ceil(cfg.kappa_s0 * n - 1e-9));

  std::vector<HideSeekRow> rows;
  for (double bias : cfg.biases) {
    HideAndSeekOptions hopts;
    hopts.dim = cfg.dim;
    hopts.bias = bias;
    hopts.hidden = hidden;
    hopts.q = cfg.q;
    hopts.radius = cfg.radius;
    const auto inst = gen_hide_and_seek(hopts);
    for (std::uint64_t budget : cfg.budgets) {
      HideSeekRow row;
      row.bias = bias;
      row.budget = budget;
      row.transfer_samples = std::max<std::uint64_t>(1, default_s);
      row.output_samples = std::max<std::uint64_t>(1, default_s0);
      if (budget > 0) {
        const std::uint64_t sb = samples_for_budget(cfg.dim, budget);
        if (sb == 0) {
          throw InvalidConfig("budget of " + std::to_string(budget) +
                              " bits cannot carry a single atom");
        }
        row.transfer_samples = std::min(row.transfer_samples, sb);
        row.output_samples = std::min(row.output_samples, sb);
      }
      ProtocolConfig pc = default_params_lipschitz(inst->info(), cfg.examples, cfg.machines,
                                                   {cfg.kappa_s, cfg.kappa_s0, true});
      pc.transfer_samples = row.transfer_samples;
      pc.output_samples = row.output_samples;

      std::vector<char> hit(cfg.trials, 0);
      parallel_for(cfg.trials, settings.workers, [&](std::size_t t) {
        const std::uint64_t data_seed = CounterRng(cfg.seed, kDataStream).split(t)();
        const CounterRng rng = CounterRng(cfg.seed, kProtocolStream).split(t);
        auto data = inst->sampler(data_seed);
        const RunResult r = run_smd(*data, inst->link(), pc, rng);
        double best = -std::numeric_limits<double>::infinity();
        std::vector<std::size_t> ties;
        for (std::size_t i = 0; i < cfg.dim; ++i) {
          const double v = r.estimate[i];
          if (v > best) {
            best = v;
            ties.assign(1, i);
          } else if (v == best) {
            ties.push_back(i);
          }
        }
        CounterRng tie_rng = rng.split(0x71e);
        const std::size_t guess = ties[tie_rng.uniform_index(ties.size())];
        hit[t] = guess == hidden ? 1 : 0;
      });
      row.trials = cfg.trials;
      row.detections = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
      rows.push_back(row);
    }
  }
  return rows;
}

void write_hide_seek_csv(std::ostream& out, const std::vector<HideSeekRow>& rows) {
  out << "bias,budget_bits,s,s0,trials,detections,rate\n";
  for (const HideSeekRow& r : rows) {
    out << format_double(r.bias) << ',' << r.budget << ',' << r.transfer_samples << ','
        << r.output_samples << ',' << r.trials << ',' << r.detections << ','
        << format_double(r.rate()) << '\n';
  }
}

}  // namespace slcomm
