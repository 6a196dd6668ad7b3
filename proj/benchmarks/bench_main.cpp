#include <benchmark/benchmark.h>

#include <vector>

#include "slcomm/mirror.hpp"
#include "slcomm/rng.hpp"
#include "slcomm/sparsify.hpp"
#include "slcomm/vecspace.hpp"

namespace {

using namespace slcomm;

DenseVector gaussian(std::size_t d, CounterRng& rng, double scale = 1.0) {
  DenseVector v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = scale * rng.normal();
  return v;
}

void BM_Svd(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  CounterRng rng(1);
  DenseMatrix m(d);
  for (double& x : m.flat()) x = rng.normal();
  for (auto _ : state) benchmark::DoNotOptimize(svd(m));
}
BENCHMARK(BM_Svd)->Arg(16)->Arg(64);

// Active projections onto the unit l1 ball, at the origin and around a
// shifted center of norm 1 (as in restarted rounds).
void BM_Projection(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const bool shifted = state.range(1) != 0;
  CounterRng rng(2);
  DenseVector center(d);
  if (shifted) {
    for (std::size_t i = 0; i < 4; ++i) center[i] = i % 2 == 0 ? 0.25 : -0.25;
  }
  BregmanProjector proj(MirrorMap(1.5, center), L1Ball(1.0));
  const DenseVector theta = gaussian(d, rng, 0.5);
  std::vector<double> primal(d), dual(d);
  for (auto _ : state) {
    proj.project(theta.span(), primal, dual);
    benchmark::DoNotOptimize(primal.data());
  }
}
BENCHMARK(BM_Projection)->Args({4096, 0})->Args({4096, 1})->Args({10000, 0});

void BM_MdStep(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  CounterRng rng(3);
  const MirrorMap map = MirrorMap::at_origin(1.5, d);
  const L1Ball ball(1.0);
  DenseVector w(d);
  const DenseVector g = gaussian(d, rng);
  for (auto _ : state) {
    w = md_step(map, ball, w, g, 0.01);
    benchmark::DoNotOptimize(w.values().data());
  }
}
BENCHMARK(BM_MdStep)->Arg(1000)->Arg(10000);

void BM_Maurey(benchmark::State& state) {
  const auto s = static_cast<std::uint64_t>(state.range(0));
  CounterRng rng(4);
  const DenseVector w = gaussian(10000, rng);
  for (auto _ : state) benchmark::DoNotOptimize(maurey(w, s, rng));
}
BENCHMARK(BM_Maurey)->Arg(64)->Arg(4096)->Arg(1 << 20);

void BM_RankEncode(benchmark::State& state) {
  const auto s = static_cast<std::uint64_t>(state.range(0));
  CounterRng rng(5);
  const DenseVector w = gaussian(10000, rng);
  const MaureyMessage msg = maurey(w, s, rng);
  for (auto _ : state) benchmark::DoNotOptimize(encode(msg, 10000, WireMode::rank));
}
BENCHMARK(BM_RankEncode)->Arg(64)->Arg(1024)->Arg(8192);

void BM_RankDecode(benchmark::State& state) {
  const auto s = static_cast<std::uint64_t>(state.range(0));
  CounterRng rng(6);
  const DenseVector w = gaussian(10000, rng);
  const EncodedMessage enc = encode(maurey(w, s, rng), 10000, WireMode::rank);
  for (auto _ : state) benchmark::DoNotOptimize(decode_bits(enc.bits, 10000));
}
BENCHMARK(BM_RankDecode)->Arg(64)->Arg(1024)->Arg(8192);

}  // namespace
BENCHMARK_MAIN();
