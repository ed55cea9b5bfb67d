#include <doctest.h>

#include <armadillo>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <vector>

#include <tcqlf/channel.hpp>
#include <tcqlf/constellation.hpp>
#include <tcqlf/quantizer.hpp>
#include <tcqlf/rng.hpp>
#include <tcqlf/trellis.hpp>

using namespace tcqlf;
using cx = std::complex<double>;

namespace {

// Exhaustive reference search: enumerate every trellis path from state 0 and
// keep the smallest squared distance. Only viable for short vectors, which is
// exactly what makes it an independent check of the dynamic program.
double exhaustive_best_metric(const arma::cx_rowvec& cdi, const Trellis& t,
                              std::span<const StageConstellation> stages) {
  double best = std::numeric_limits<double>::infinity();
  struct Frame {
    int state;
    std::size_t stage;
    double metric;
  };
  std::vector<Frame> stack{{0, 0, 0.0}};
  while (!stack.empty()) {
    const Frame f = stack.back();
    stack.pop_back();
    if (f.stage == cdi.n_elem) {
      best = std::min(best, f.metric);
      continue;
    }
    for (const TrellisEdge& e : t.transitions(f.state)) {
      const cx point = stages[f.stage][static_cast<std::size_t>(e.symbol)];
      const double d = std::norm(cdi[f.stage] - point);
      stack.push_back({e.next_state, f.stage + 1, f.metric + d});
    }
  }
  return best;
}

arma::cx_rowvec random_cdi(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> n(0.0, 1.0);
  arma::cx_rowvec h(m);
  for (std::size_t i = 0; i < m; ++i) h[i] = cx(n(rng), n(rng));
  return normalize_cdi(h);
}

std::vector<StageConstellation> uniform_stages(std::size_t m, int alphabet,
                                               double scale) {
  const auto base = psk_points(alphabet);
  std::vector<StageConstellation> stages(
      m, transform_constellation(base, cx(0, 0), scale));
  return stages;
}

}  // namespace

TEST_SUITE("quantizer") {

TEST_CASE("normalize_cdi returns a unit-norm direction") {
  arma::cx_rowvec h{cx(3, 0), cx(0, 4)};
  const arma::cx_rowvec d = normalize_cdi(h);
  CHECK(arma::norm(d) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(d[0] - cx(0.6, 0)) < 1e-14);
  CHECK(std::abs(d[1] - cx(0, 0.8)) < 1e-14);
  CHECK_THROWS_AS(normalize_cdi(arma::cx_rowvec(4, arma::fill::zeros)),
                  std::invalid_argument);
}

TEST_CASE("viterbi matches an exhaustive path search") {
  std::mt19937_64 rng(make_stream(7, 0));
  for (const Trellis& t : {qpsk_trellis(), psk8_trellis()}) {
    for (std::size_t m : {3u, 4u, 6u}) {
      const auto stages = uniform_stages(m, t.alphabet_size(),
                                         spatial_scale(static_cast<int>(m)));
      for (int rep = 0; rep < 50; ++rep) {
        const arma::cx_rowvec cdi = random_cdi(rng, m);
        const QuantizationResult r = viterbi_quantize(cdi, t, stages);
        const double oracle = exhaustive_best_metric(cdi, t, stages);
        CHECK(r.metric ==
              doctest::Approx(oracle).epsilon(1e-12));
        CHECK(r.bits.size() == m * static_cast<std::size_t>(t.bits_per_stage()));
        CHECK(r.symbols.size() == m);
        CHECK(conv_encode(t, r.bits) == r.symbols);
      }
    }
  }
}

TEST_CASE("a target lying on a trellis path is matched exactly") {
  // Stage points of the path encoded by bits [1,0,0] (symbols 2,1,2), built
  // at the snapshot scale. With three antennas the stage points already have
  // magnitude 1/sqrt(3), so the stacked target is unit norm.
  const Trellis t = qpsk_trellis();
  const std::size_t m = 3;
  const auto stages = uniform_stages(m, 4, spatial_scale(3));
  const std::vector<int> symbols{2, 1, 2};
  arma::cx_rowvec target(m);
  for (std::size_t i = 0; i < m; ++i)
    target[i] = stages[i][static_cast<std::size_t>(symbols[i])];
  REQUIRE(arma::norm(target) == doctest::Approx(1.0).epsilon(1e-12));

  const QuantizationResult r = viterbi_quantize(target, t, stages);
  CHECK(r.metric <= 1e-20);
  CHECK(r.bits == std::vector<std::uint8_t>{1, 0, 0});
  CHECK(r.symbols == symbols);
  CHECK(arma::norm(r.reconstructed - target) < 1e-12);
}

TEST_CASE("receiver reconstruction equals the quantizer output bit for bit") {
  std::mt19937_64 rng(make_stream(7, 1));
  const Trellis t = psk8_trellis();
  const std::size_t m = 16;
  const auto stages = uniform_stages(m, 8, spatial_scale(16));
  for (int rep = 0; rep < 20; ++rep) {
    const arma::cx_rowvec cdi = random_cdi(rng, m);
    const QuantizationResult r = viterbi_quantize(cdi, t, stages);
    const arma::cx_rowvec rec = reconstruct(r.bits, t, stages);
    REQUIRE(rec.n_elem == r.reconstructed.n_elem);
    for (std::size_t i = 0; i < m; ++i)
      CHECK(rec[i] == r.reconstructed[i]);  // identical arithmetic, not approx
  }
}

TEST_CASE("snapshot quantizer output is unit norm and re-encodable") {
  std::mt19937_64 rng(make_stream(7, 2));
  const Trellis t = qpsk_trellis();
  const arma::cx_rowvec h = random_cdi(rng, 32) * 3.7;  // any scale
  const QuantizationResult r = quantize_spatial(h, t);
  CHECK(arma::norm(r.reconstructed) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(conv_encode(t, r.bits) == r.symbols);
}

TEST_CASE("differential sessions stay synchronized over many intervals") {
  const Trellis t = qpsk_trellis();
  const int m = 24;
  const double epsilon = 0.9881;
  DifferentialSession user(t, m, epsilon);
  DifferentialSession bs(t, m, epsilon);

  CHECK(user.scale() == doctest::Approx(initial_scale(m)).epsilon(1e-14));

  GaussMarkovProcess channel(m, epsilon, stream_seed(7, 3));
  for (int interval = 0; interval < 20; ++interval) {
    const arma::cx_rowvec& h =
        interval == 0 ? channel.current() : channel.step();
    const QuantizationResult r = user.user_step(h);
    const arma::cx_rowvec bs_rec = bs.bs_step(r.bits);

    REQUIRE(bs_rec.n_elem == r.reconstructed.n_elem);
    for (arma::uword i = 0; i < bs_rec.n_elem; ++i) {
      CHECK(bs_rec[i] == r.reconstructed[i]);
      CHECK(user.centers()[i] == bs.centers()[i]);
    }
    CHECK(user.interval_index() == bs.interval_index());
    CHECK(user.scale() ==
          doctest::Approx(differential_scale(epsilon, m)).epsilon(1e-14));
  }
}

TEST_CASE("tracking beats the first interval once centers settle") {
  // On a slowly varying channel the per-interval quantization error must
  // eventually drop far below the first-interval error: the whole point of
  // recentring the constellation. The chase takes tens of intervals because
  // every stage point moves by exactly delta per interval.
  const Trellis t = qpsk_trellis();
  const int m = 64;
  const double epsilon = 0.9881;
  DifferentialSession user(t, m, epsilon);
  GaussMarkovProcess channel(m, epsilon, stream_seed(7, 4));

  const double first_metric = user.user_step(channel.current()).metric;
  double settled = 0;
  const int intervals = 80, window = 10;
  for (int interval = 1; interval < intervals; ++interval) {
    const double metric = user.user_step(channel.step()).metric;
    if (interval >= intervals - window) settled += metric;
  }
  settled /= window;
  CHECK(settled < 0.5 * first_metric);
}

TEST_CASE("session rejects malformed inputs") {
  const Trellis t = qpsk_trellis();
  DifferentialSession user(t, 8, 0.9);
  CHECK_THROWS_AS(user.user_step(arma::cx_rowvec(5, arma::fill::ones)),
                  std::invalid_argument);
  DifferentialSession bs(t, 8, 0.9);
  CHECK_THROWS_AS(bs.bs_step(std::vector<std::uint8_t>{1, 0, 1}),
                  std::invalid_argument);
  CHECK_THROWS_AS(DifferentialSession(t, 0, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(DifferentialSession(t, 8, 1.5), std::invalid_argument);
}

}  // TEST_SUITE
