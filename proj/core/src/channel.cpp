#include "tcqlf/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "tcqlf/errors.hpp"

namespace tcqlf {

double temporal_coefficient(double speed_mps, double carrier_hz,
                            double interval_s) {
  if (speed_mps < 0.0)
    throw std::invalid_argument("temporal_coefficient: speed must be >= 0");
  if (carrier_hz <= 0.0 || interval_s <= 0.0)
    throw std::invalid_argument(
        "temporal_coefficient: carrier and interval must be positive");
  constexpr double light_speed = 2.99792458e8;
  const double doppler = speed_mps * carrier_hz / light_speed;
  const double x = 2.0 * std::numbers::pi * doppler * interval_s;
  return std::clamp(std::cyl_bessel_j(0.0, x), 0.0, 1.0);
}

std::complex<double> complex_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, std::numbers::sqrt2 / 2.0);
  const double re = dist(rng);
  const double im = dist(rng);
  return {re, im};
}

arma::cx_rowvec complex_gaussian_vector(int n, std::mt19937_64& rng) {
  if (n < 1)
    throw std::invalid_argument("complex_gaussian_vector: size must be >= 1");
  std::normal_distribution<double> dist(0.0, std::numbers::sqrt2 / 2.0);
  arma::cx_rowvec v(static_cast<arma::uword>(n));
  for (arma::uword i = 0; i < v.n_elem; ++i) {
    const double re = dist(rng);
    const double im = dist(rng);
    v(i) = {re, im};
  }
  return v;
}

GaussMarkovProcess::GaussMarkovProcess(int num_antennas, double epsilon,
                                       std::uint64_t seed)
    : epsilon_(epsilon), innovation_(0.0), rng_(seed) {
  if (num_antennas < 1)
    throw std::invalid_argument(
        "gauss-markov process: antenna count must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument(
        "gauss-markov process: fading coefficient must be in [0, 1]");
  innovation_ = std::sqrt(1.0 - epsilon_ * epsilon_);
  h_ = complex_gaussian_vector(num_antennas, rng_);
}

const arma::cx_rowvec& GaussMarkovProcess::step() {
  const arma::cx_rowvec g =
      complex_gaussian_vector(static_cast<int>(h_.n_elem), rng_);
  h_ = epsilon_ * h_ + innovation_ * g;
  return h_;
}

SpatialModel exp_correlation_model(int num_antennas, double zt,
                                   ArrayTopology topology) {
  if (num_antennas < 1)
    throw std::invalid_argument(
        "correlation model: antenna count must be >= 1");
  if (!(zt >= 0.0 && zt <= 1.0))
    throw std::invalid_argument(
        "correlation model: transmit correlation must be in [0, 1]");

  int side = 0;
  if (topology == ArrayTopology::ura) {
    side = static_cast<int>(std::lround(std::sqrt(num_antennas)));
    if (side * side != num_antennas)
      throw std::invalid_argument(
          "correlation model: planar array needs a square antenna count, got " +
          std::to_string(num_antennas));
  }

  const arma::uword m = static_cast<arma::uword>(num_antennas);
  arma::mat correlation(m, m);
  for (arma::uword i = 0; i < m; ++i) {
    for (arma::uword j = 0; j < m; ++j) {
      double d = 0.0;
      if (topology == ArrayTopology::ula) {
        d = std::abs(static_cast<double>(i) - static_cast<double>(j));
      } else {
        // Row-major placement on a side x side grid.
        const double dr = static_cast<double>(i / static_cast<arma::uword>(side)) -
                          static_cast<double>(j / static_cast<arma::uword>(side));
        const double dc = static_cast<double>(i % static_cast<arma::uword>(side)) -
                          static_cast<double>(j % static_cast<arma::uword>(side));
        d = std::hypot(dr, dc);
      }
      correlation(i, j) = std::pow(zt, d);
    }
  }

  arma::vec eigval;
  arma::mat eigvec;
  if (!arma::eig_sym(eigval, eigvec, correlation))
    throw std::runtime_error(
        "correlation model: eigendecomposition failed");
  const double tol = 1e-10 * std::max(eigval.max(), 1.0);
  for (arma::uword i = 0; i < eigval.n_elem; ++i) {
    if (eigval(i) < -tol)
      throw std::runtime_error(
          "correlation model: matrix is not positive semidefinite");
    eigval(i) = std::max(eigval(i), 0.0);
  }
  const arma::mat root =
      eigvec * arma::diagmat(arma::sqrt(eigval)) * eigvec.t();

  SpatialModel model;
  model.num_antennas = num_antennas;
  model.zt = zt;
  model.topology = topology;
  model.correlation = correlation;
  model.correlation_root = arma::conv_to<arma::cx_mat>::from(root);
  return model;
}

arma::cx_rowvec spatial_channel(const SpatialModel& model,
                                std::mt19937_64& rng) {
  const arma::cx_rowvec g = complex_gaussian_vector(model.num_antennas, rng);
  return g * model.correlation_root;
}

namespace {

constexpr char k_trace_magic[8] = {'T', 'C', 'Q', 'T', 'R', 'A', 'C', 'E'};
constexpr std::uint32_t k_trace_version = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_f64(std::ostream& os, double d) {
  put_u64(os, std::bit_cast<std::uint64_t>(d));
}

bool get_bytes(std::istream& is, unsigned char* b, std::size_t n) {
  is.read(reinterpret_cast<char*>(b), static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(is.gcount()) == n;
}

std::uint32_t get_u32(std::istream& is, const std::string& what) {
  unsigned char b[4];
  if (!get_bytes(is, b, 4)) throw parse_error("channel trace: " + what);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t get_u64(std::istream& is, const std::string& what) {
  unsigned char b[8];
  if (!get_bytes(is, b, 8)) throw parse_error("channel trace: " + what);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

}  // namespace

std::vector<arma::cx_rowvec> load_channel_trace(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw parse_error("channel trace: cannot open " + path);

  char magic[8];
  in.read(magic, 8);
  if (in.gcount() != 8 || std::memcmp(magic, k_trace_magic, 8) != 0)
    throw parse_error("channel trace: bad magic in " + path);
  const std::uint32_t version = get_u32(in, "truncated header in " + path);
  if (version != k_trace_version)
    throw parse_error("channel trace: unsupported version " +
                      std::to_string(version) + " in " + path);
  const std::uint32_t antennas = get_u32(in, "truncated header in " + path);
  if (antennas < 1)
    throw parse_error("channel trace: antenna count must be >= 1 in " + path);
  const std::uint64_t count = get_u64(in, "truncated header in " + path);

  std::vector<arma::cx_rowvec> records;
  records.reserve(static_cast<std::size_t>(count));
  std::vector<unsigned char> buf(static_cast<std::size_t>(antennas) * 16);
  for (std::uint64_t r = 0; r < count; ++r) {
    if (!get_bytes(in, buf.data(), buf.size()))
      throw parse_error("channel trace: truncated record " +
                        std::to_string(r) + " in " + path);
    arma::cx_rowvec v(antennas);
    for (std::uint32_t m = 0; m < antennas; ++m) {
      std::uint64_t re_bits = 0, im_bits = 0;
      for (int i = 7; i >= 0; --i) {
        re_bits = (re_bits << 8) | buf[16ul * m + static_cast<std::size_t>(i)];
        im_bits =
            (im_bits << 8) | buf[16ul * m + 8 + static_cast<std::size_t>(i)];
      }
      v(m) = {std::bit_cast<double>(re_bits), std::bit_cast<double>(im_bits)};
    }
    records.push_back(std::move(v));
  }
  if (in.peek() != std::char_traits<char>::eof())
    throw parse_error("channel trace: trailing bytes after record " +
                      std::to_string(count ? count - 1 : 0) + " in " + path);
  return records;
}

void save_channel_trace(const std::string& path,
                        const std::vector<arma::cx_rowvec>& records) {
  if (records.empty())
    throw std::invalid_argument(
        "channel trace: cannot write an empty trace (no antenna count)");
  std::uint32_t antennas = 0;
  for (const auto& r : records) {
    if (antennas == 0) antennas = static_cast<std::uint32_t>(r.n_elem);
    if (r.n_elem == 0 || r.n_elem != antennas)
      throw std::invalid_argument(
          "channel trace: all records must share one nonzero antenna count");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("channel trace: cannot write " + path);
  out.write(k_trace_magic, 8);
  put_u32(out, k_trace_version);
  put_u32(out, antennas);
  put_u64(out, records.size());
  for (const auto& r : records)
    for (arma::uword m = 0; m < r.n_elem; ++m) {
      put_f64(out, r(m).real());
      put_f64(out, r(m).imag());
    }
  if (!out) throw std::runtime_error("channel trace: write failed for " + path);
}

}  // namespace tcqlf
