#include <gtest/gtest.h>

#include <sstream>
#include <string>

#include "oracles.hpp"
#include "slcomm/config.hpp"
#include "slcomm/errors.hpp"
#include "slcomm/harness.hpp"
#include "slcomm/sparsify.hpp"

using namespace slcomm;

namespace {

const char* kSmall = R"(# small smoke scenario
[scenario]
name = tiny
algorithm = smd
trials = 3
seed = 11

[instance]
kind = l1lq
dim = 64
q = 2
law = signal_block

[protocol]
examples = 64
machines = 4
linear_model = true
)";

Scenario small_scenario() { return load_scenario(ConfigDocument::parse(kSmall)); }

std::string csv_of(const std::vector<TrialRecord>& rows) {
  std::ostringstream os;
  write_trials_csv(os, rows);
  return os.str();
}

std::string error_of(const std::string& text) {
  try {
    load_scenario(ConfigDocument::parse(text, "probe.ini"));
  } catch (const InvalidConfig& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, ErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[scenario]\nname = a\nname = b\n").find("probe.ini:3"), std::string::npos);
  EXPECT_NE(error_of("[scenario\n").find("probe.ini:1"), std::string::npos);
  EXPECT_NE(error_of("[scenario]\n\njunk line\n").find("probe.ini:3"), std::string::npos);
  const std::string unknown = error_of("[protocol]\nexamples = 4\nstepsize = 0.1\n");
  EXPECT_NE(unknown.find("probe.ini:3"), std::string::npos) << unknown;
  EXPECT_NE(unknown.find("stepsize"), std::string::npos);
  EXPECT_NE(error_of("[protocol]\nexamples = many\n").find("examples"), std::string::npos);
  EXPECT_FALSE(error_of("trials = 2\n[scenario]\n").empty());
  EXPECT_FALSE(error_of("[protocol]\nwire = morse\n").empty());
}

TEST(Config, ParsesValues) {
  const Scenario sc = small_scenario();
  EXPECT_EQ(sc.name, "tiny");
  EXPECT_EQ(sc.algorithm, Algorithm::smd);
  EXPECT_EQ(sc.trials, 3U);
  EXPECT_EQ(sc.instance.law, FeatureLaw::signal_block);
  EXPECT_TRUE(sc.protocol.linear_model);
  EXPECT_THROW(algorithm_from_name("gossip"), InvalidConfig);
  for (Algorithm a : {Algorithm::smd, Algorithm::fast_smd, Algorithm::jl_ogd, Algorithm::schatten_smd,
                      Algorithm::centralized, Algorithm::centralized_ogd, Algorithm::truncation}) {
    EXPECT_EQ(algorithm_from_name(algorithm_name(a)), a);
  }
}

TEST(Harness, SameSeedGivesIdenticalCsv) {
  const Scenario sc = small_scenario();
  const std::string a = csv_of(run_scenario(sc, {1, false}));
  const std::string b = csv_of(run_scenario(sc, {1, false}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')),
            "trial,N,m,q,s,s0,excess_risk,total_bits,max_machine_bits,wall_time");
  Scenario other = sc;
  other.seed = 12;
  EXPECT_NE(a, csv_of(run_scenario(other, {1, false})));
}

TEST(Harness, WorkerCountDoesNotChangeResults) {
  const Scenario sc = small_scenario();
  EXPECT_EQ(csv_of(run_scenario(sc, {1, false})), csv_of(run_scenario(sc, {3, false})));
}

TEST(Harness, SweepRowCounts) {
  Scenario sc = small_scenario();
  sc.sweep_examples = {64, 128, 256, 512, 1024};
  EXPECT_EQ(sweep(sc, {1, false}).size(), 5U * sc.trials);
  sc.sweep_examples = {64, 128};
  sc.sweep_machines = {2, 4};
  const auto rows = sweep(sc, {1, false});
  ASSERT_EQ(rows.size(), 4U * sc.trials);
  for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].trial, i);
}

TEST(Harness, SingletonGridEqualsRun) {
  Scenario sc = small_scenario();
  const std::string direct = csv_of(run_scenario(sc, {1, false}));
  sc.sweep_examples = {sc.protocol.examples};
  EXPECT_EQ(csv_of(sweep(sc, {1, false})), direct);
}

TEST(Harness, TrialRecordsAreConsistent) {
  const Scenario sc = small_scenario();
  for (const TrialRecord& r : run_scenario(sc, {1, false})) {
    EXPECT_EQ(r.examples, 64U);
    EXPECT_EQ(r.machines, 4U);
    EXPECT_EQ(r.transfer_samples, 16U);
    EXPECT_EQ(r.output_samples, 64U);
    EXPECT_GE(r.excess_risk, -1e-12);
    EXPECT_LE(r.max_machine_bits, r.total_bits);
    EXPECT_EQ(r.wall_time, 0.0);
  }
}

TEST(Harness, TruncationKeepsAllCoordinatesWhenSmall) {
  Scenario sc = small_scenario();
  sc.algorithm = Algorithm::truncation;
  sc.instance.dim = 256;
  sc.trials = 1;
  // keep = ceil(N^{q/2}) = 64 for q = 2, N = 64
  EXPECT_EQ(run_trial(sc, 0).output_samples, 64U);
}

TEST(Harness, UnknownVerifySuiteThrows) {
  EXPECT_THROW(verify_module("astrology", 1), InvalidParameter);
  EXPECT_FALSE(verify_modules().empty());
}

TEST(HideAndSeek, SamplesForBudget) {
  for (std::size_t d : {8U, 32U, 1000U}) {
    for (std::uint64_t budget : {120U, 200U, 500U, 4000U}) {
      const std::uint64_t s = samples_for_budget(d, budget);
      if (s == 0) {
        EXPECT_GT(kMessageHeaderBits + rank_payload_bits(d, 1), budget);
        continue;
      }
      EXPECT_LE(kMessageHeaderBits + rank_payload_bits(d, s), budget);
      if (s == kMaxSamples) continue;
      EXPECT_GT(kMessageHeaderBits + rank_payload_bits(d, s + 1), budget);
      // independent payload count: ceil(log2 C(2d+s-1, s))
      EXPECT_EQ(rank_payload_bits(d, s), oracle::ceil_log2(oracle::binomial(2 * d + s - 1, s)));
    }
  }
}

TEST(HideAndSeek, ConfigAndRows) {
  const char* text = R"([hide_and_seek]
dim = 8
examples = 400
machines = 4
biases = 0.0, 0.5
budgets = 0, 150
trials = 6
seed = 2
)";
  const HideSeekConfig cfg = load_hide_seek(ConfigDocument::parse(text));
  const auto rows = hide_and_seek_scenario(cfg, {1, false});
  ASSERT_EQ(rows.size(), 4U);
  for (const HideSeekRow& r : rows) {
    EXPECT_EQ(r.trials, 6U);
    EXPECT_LE(r.detections, r.trials);
    if (r.budget != 0) {
      EXPECT_LE(kMessageHeaderBits + rank_payload_bits(8, r.transfer_samples), r.budget);
    }
  }
  std::ostringstream os;
  write_hide_seek_csv(os, rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "bias,budget_bits,s,s0,trials,detections,rate");
  HideSeekConfig tiny = cfg;
  tiny.budgets = {50};
  EXPECT_THROW(hide_and_seek_scenario(tiny, {1, false}), InvalidConfig);
}
