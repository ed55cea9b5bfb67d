#include <doctest.h>

#include <armadillo>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <tcqlf/channel.hpp>
#include <tcqlf/errors.hpp>
#include <tcqlf/rng.hpp>

using namespace tcqlf;
using cx = std::complex<double>;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("tcqlf_channel_test_" + name);
}

std::vector<arma::cx_rowvec> sample_records(int count, int m,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(make_stream(seed, 0));
  std::vector<arma::cx_rowvec> records;
  records.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i)
    records.push_back(complex_gaussian_vector(m, rng));
  return records;
}

}  // namespace

TEST_SUITE("channel") {

TEST_CASE("fading coefficient at reference speeds") {
  // 2.5 GHz carrier, 5 ms feedback interval.
  const double fc = 2.5e9;
  const double T = 5e-3;
  CHECK(temporal_coefficient(3.0 / 3.6, fc, T) ==
        doctest::Approx(0.9881).epsilon(2e-4));
  CHECK(temporal_coefficient(5.0 / 3.6, fc, T) ==
        doctest::Approx(0.9672).epsilon(3e-4));
  CHECK(temporal_coefficient(7.0 / 3.6, fc, T) ==
        doctest::Approx(0.9363).epsilon(3e-4));
  CHECK(temporal_coefficient(0.0, fc, T) == 1.0);
  CHECK_THROWS_AS(temporal_coefficient(-1.0, fc, T), std::invalid_argument);
  CHECK_THROWS_AS(temporal_coefficient(1.0, 0.0, T), std::invalid_argument);
  CHECK_THROWS_AS(temporal_coefficient(1.0, fc, 0.0), std::invalid_argument);
}

TEST_CASE("fading coefficient is clamped to [0, 1]") {
  // Fast enough that J0 goes negative; the model floors it at zero.
  const double eps = temporal_coefficient(200.0, 2.5e9, 5e-3);
  CHECK(eps >= 0.0);
  CHECK(eps <= 1.0);
}

TEST_CASE("complex gaussian has unit power and zero mean") {
  std::mt19937_64 rng(make_stream(11, 0));
  const int n = 20000;
  cx mean(0, 0);
  double power = 0;
  for (int i = 0; i < n; ++i) {
    const cx z = complex_gaussian(rng);
    mean += z;
    power += std::norm(z);
  }
  mean /= static_cast<double>(n);
  power /= static_cast<double>(n);
  CHECK(std::abs(mean) < 0.02);
  CHECK(power == doctest::Approx(1.0).epsilon(0.05));

  const arma::cx_rowvec v = complex_gaussian_vector(1000, rng);
  CHECK(v.n_elem == 1000);
  CHECK(arma::norm(v) * arma::norm(v) / 1000.0 ==
        doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("gauss-markov limits: frozen at eps=1, memoryless at eps=0") {
  GaussMarkovProcess frozen(8, 1.0, stream_seed(11, 1));
  const arma::cx_rowvec h0 = frozen.current();
  frozen.step();
  frozen.step();
  for (arma::uword i = 0; i < h0.n_elem; ++i)
    CHECK(frozen.current()[i] == h0[i]);

  GaussMarkovProcess memoryless(8, 0.0, stream_seed(11, 2));
  const arma::cx_rowvec a = memoryless.current();
  const arma::cx_rowvec b = memoryless.step();
  CHECK(arma::norm(a - b) > 1e-3);  // fresh draw, no correlation

  CHECK_THROWS_AS(GaussMarkovProcess(8, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(GaussMarkovProcess(8, 1.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(GaussMarkovProcess(0, 0.5, 1), std::invalid_argument);
}

TEST_CASE("gauss-markov process is stationary") {
  // Under CN(0,1) marginals, E||h||^2/M stays 1 no matter how long it runs.
  const int m = 100;
  GaussMarkovProcess p(m, 0.9881, stream_seed(11, 3));
  double acc = 0;
  const int steps = 10000;
  for (int t = 0; t < steps; ++t) {
    p.step();
    acc += arma::dot(arma::abs(p.current()), arma::abs(p.current()));
  }
  const double mean_power = acc / (static_cast<double>(steps) * m);
  CHECK(mean_power > 0.9);
  CHECK(mean_power < 1.1);
}

TEST_CASE("gauss-markov one-step correlation matches eps") {
  const int m = 64;
  const double eps = 0.9;
  GaussMarkovProcess p(m, eps, stream_seed(11, 4));
  double num = 0, den = 0;
  for (int t = 0; t < 4000; ++t) {
    const arma::cx_rowvec prev = p.current();
    const arma::cx_rowvec next = p.step();
    num += std::real(arma::cdot(prev, next));
    den += std::real(arma::cdot(prev, prev));
  }
  CHECK(num / den == doctest::Approx(eps).epsilon(0.02));
}

TEST_CASE("same seed reproduces the same trajectory") {
  GaussMarkovProcess a(16, 0.95, stream_seed(11, 5));
  GaussMarkovProcess b(16, 0.95, stream_seed(11, 5));
  for (int t = 0; t < 5; ++t) {
    for (arma::uword i = 0; i < 16; ++i)
      CHECK(a.current()[i] == b.current()[i]);
    a.step();
    b.step();
  }
}

TEST_CASE("exponential correlation model, linear array") {
  const SpatialModel m = exp_correlation_model(3, 0.5, ArrayTopology::ula);
  const arma::mat expected{{1.0, 0.5, 0.25}, {0.5, 1.0, 0.5}, {0.25, 0.5, 1.0}};
  CHECK(arma::norm(m.correlation - expected, "fro") < 1e-14);

  // root * root^H reproduces R
  const arma::cx_mat rr =
      m.correlation_root * m.correlation_root.t();
  CHECK(arma::norm(rr - arma::cx_mat(m.correlation, arma::zeros(3, 3)), "fro") <
        1e-8);
}

TEST_CASE("correlation model limits") {
  const SpatialModel id = exp_correlation_model(4, 0.0, ArrayTopology::ula);
  CHECK(arma::norm(id.correlation - arma::eye(4, 4), "fro") < 1e-14);

  const SpatialModel ones = exp_correlation_model(4, 1.0, ArrayTopology::ula);
  CHECK(arma::norm(ones.correlation - arma::ones(4, 4), "fro") < 1e-14);
  // rank-1 root still satisfies root * root^H = R
  const arma::cx_mat rr = ones.correlation_root * ones.correlation_root.t();
  CHECK(arma::norm(rr - arma::cx_mat(ones.correlation, arma::zeros(4, 4)),
                   "fro") < 1e-8);
}

TEST_CASE("planar array uses euclidean grid distance") {
  // 2x2 grid, row-major: antennas 0 and 3 sit diagonally, distance sqrt(2).
  const SpatialModel m = exp_correlation_model(4, 0.9, ArrayTopology::ura);
  CHECK(m.correlation(0, 1) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(m.correlation(0, 2) == doctest::Approx(0.9).epsilon(1e-14));
  CHECK(m.correlation(0, 3) ==
        doctest::Approx(std::pow(0.9, std::sqrt(2.0))).epsilon(1e-14));
  CHECK(m.correlation(1, 2) ==
        doctest::Approx(std::pow(0.9, std::sqrt(2.0))).epsilon(1e-14));

  // planar layout needs a square count
  CHECK_THROWS_AS(exp_correlation_model(5, 0.9, ArrayTopology::ura),
                  std::invalid_argument);
}

TEST_CASE("planar array is more correlated than linear at the same zt") {
  const int m = 16;
  const double zt = 0.9;
  const SpatialModel ula = exp_correlation_model(m, zt, ArrayTopology::ula);
  const SpatialModel ura = exp_correlation_model(m, zt, ArrayTopology::ura);
  CHECK(arma::accu(ura.correlation) > arma::accu(ula.correlation));
}

TEST_CASE("correlation model validates arguments") {
  CHECK_THROWS_AS(exp_correlation_model(4, -0.1, ArrayTopology::ula),
                  std::invalid_argument);
  CHECK_THROWS_AS(exp_correlation_model(4, 1.1, ArrayTopology::ula),
                  std::invalid_argument);
  CHECK_THROWS_AS(exp_correlation_model(0, 0.5, ArrayTopology::ula),
                  std::invalid_argument);
}

TEST_CASE("spatial channel has the requested covariance") {
  const SpatialModel model = exp_correlation_model(4, 0.9, ArrayTopology::ula);
  std::mt19937_64 rng(make_stream(11, 6));
  arma::cx_mat cov(4, 4, arma::fill::zeros);
  const int trials = 20000;
  for (int i = 0; i < trials; ++i) {
    const arma::cx_rowvec h = spatial_channel(model, rng);
    cov += h.t() * h;  // column * row = outer product
  }
  cov /= static_cast<double>(trials);
  for (arma::uword r = 0; r < 4; ++r)
    for (arma::uword c = 0; c < 4; ++c)
      CHECK(std::abs(cov(r, c) - cx(model.correlation(r, c), 0.0)) < 0.05);
}

TEST_CASE("fully correlated channel is a scaled all-ones vector") {
  const SpatialModel model = exp_correlation_model(16, 1.0, ArrayTopology::ula);
  std::mt19937_64 rng(make_stream(11, 7));
  const arma::cx_rowvec h = spatial_channel(model, rng);
  // equal up to the eigensolver noise in the rank-1 root
  for (arma::uword i = 1; i < h.n_elem; ++i)
    CHECK(std::abs(h[i] - h[0]) < 1e-6 * (1.0 + std::abs(h[0])));
}

TEST_CASE("channel trace round trip is bit exact") {
  const auto records = sample_records(7, 5, 13);
  const fs::path path = temp_file("roundtrip.bin");
  save_channel_trace(path.string(), records);
  const auto loaded = load_channel_trace(path.string());
  REQUIRE(loaded.size() == records.size());
  for (std::size_t r = 0; r < records.size(); ++r) {
    REQUIRE(loaded[r].n_elem == records[r].n_elem);
    for (arma::uword i = 0; i < records[r].n_elem; ++i)
      CHECK(loaded[r][i] == records[r][i]);
  }
  fs::remove(path);
}

TEST_CASE("trace loader rejects corrupted files") {
  const fs::path good = temp_file("good.bin");
  save_channel_trace(good.string(), sample_records(3, 4, 17));

  const auto bytes = [&] {
    std::ifstream in(good, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  }();

  SUBCASE("bad magic") {
    std::string bad = bytes;
    bad[0] = 'X';
    const fs::path p = temp_file("bad_magic.bin");
    std::ofstream(p, std::ios::binary).write(bad.data(),
                                             static_cast<long>(bad.size()));
    CHECK_THROWS_AS(load_channel_trace(p.string()), parse_error);
    fs::remove(p);
  }
  SUBCASE("truncated record") {
    const std::string bad = bytes.substr(0, bytes.size() - 9);
    const fs::path p = temp_file("truncated.bin");
    std::ofstream(p, std::ios::binary).write(bad.data(),
                                             static_cast<long>(bad.size()));
    CHECK_THROWS_AS(load_channel_trace(p.string()), parse_error);
    fs::remove(p);
  }
  SUBCASE("trailing bytes") {
    const std::string bad = bytes + "zz";
    const fs::path p = temp_file("trailing.bin");
    std::ofstream(p, std::ios::binary).write(bad.data(),
                                             static_cast<long>(bad.size()));
    CHECK_THROWS_AS(load_channel_trace(p.string()), parse_error);
    fs::remove(p);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_channel_trace((temp_file("nope.bin")).string()),
                    parse_error);
  }
  fs::remove(good);
}

TEST_CASE("trace writer rejects inconsistent antenna counts") {
  std::vector<arma::cx_rowvec> records{arma::cx_rowvec(4, arma::fill::ones),
                                       arma::cx_rowvec(5, arma::fill::ones)};
  CHECK_THROWS_AS(
      save_channel_trace(temp_file("inconsistent.bin").string(), records),
      std::invalid_argument);
  CHECK_THROWS_AS(save_channel_trace(temp_file("empty.bin").string(), {}),
                  std::invalid_argument);
}

}  // TEST_SUITE
