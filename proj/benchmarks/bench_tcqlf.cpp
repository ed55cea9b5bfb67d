#include <benchmark/benchmark.h>

#include <tcqlf/channel.hpp>
#include <tcqlf/precoding.hpp>
#include <tcqlf/quantizer.hpp>
#include <tcqlf/rng.hpp>
#include <tcqlf/trellis.hpp>

namespace {

arma::cx_rowvec random_direction(int num_antennas, std::mt19937_64& rng) {
  return tcqlf::normalize_cdi(
      tcqlf::complex_gaussian_vector(num_antennas, rng));
}

void BM_ViterbiQpsk_M100(benchmark::State& state) {
  const tcqlf::Trellis trellis = tcqlf::qpsk_trellis();
  std::mt19937_64 rng = tcqlf::make_stream(1, 0);
  const arma::cx_rowvec cdi = random_direction(100, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(tcqlf::quantize_spatial(cdi, trellis));
}
BENCHMARK(BM_ViterbiQpsk_M100);

void BM_Viterbi8psk_M100(benchmark::State& state) {
  const tcqlf::Trellis trellis = tcqlf::psk8_trellis();
  std::mt19937_64 rng = tcqlf::make_stream(1, 0);
  const arma::cx_rowvec cdi = random_direction(100, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(tcqlf::quantize_spatial(cdi, trellis));
}
BENCHMARK(BM_Viterbi8psk_M100);

void BM_DifferentialStep_M100(benchmark::State& state) {
  const tcqlf::Trellis trellis = tcqlf::qpsk_trellis();
  tcqlf::DifferentialSession session(trellis, 100, 0.9881);
  tcqlf::GaussMarkovProcess process(100, 0.9881, tcqlf::stream_seed(1, 0));
  for (auto _ : state)
    benchmark::DoNotOptimize(session.user_step(process.step()));
}
BENCHMARK(BM_DifferentialStep_M100);

void BM_GaussMarkovStep_M100(benchmark::State& state) {
  tcqlf::GaussMarkovProcess process(100, 0.9881, tcqlf::stream_seed(1, 0));
  for (auto _ : state) benchmark::DoNotOptimize(process.step());
}
BENCHMARK(BM_GaussMarkovStep_M100);

void BM_ZfPrecoders_K10_M100(benchmark::State& state) {
  std::mt19937_64 rng = tcqlf::make_stream(1, 0);
  arma::cx_mat channels(10, 100);
  for (int u = 0; u < 10; ++u)
    channels.row(u) = tcqlf::complex_gaussian_vector(100, rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(tcqlf::zf_precoders(channels));
}
BENCHMARK(BM_ZfPrecoders_K10_M100);

void BM_SpatialModelBuild_M100(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        tcqlf::exp_correlation_model(100, 0.9, tcqlf::ArrayTopology::ula));
}
BENCHMARK(BM_SpatialModelBuild_M100);

}  // namespace

BENCHMARK_MAIN();
