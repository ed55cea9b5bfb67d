#include "tcqlf/rvq.hpp"

#include <armadillo>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "detail_format.hpp"
#include "tcqlf/channel.hpp"
#include "tcqlf/precoding.hpp"

namespace tcqlf {

namespace {

void check_rho(double rho, const char* who) {
  if (!(rho > 0.0))
    throw std::invalid_argument(std::string(who) + ": rho must be positive");
}

void check_ratio(double q, const char* who) {
  if (!(q >= 1.0))
    throw std::invalid_argument(std::string(who) +
                                ": antenna-to-user ratio must be >= 1");
}

void check_antennas(int num_antennas, const char* who) {
  if (num_antennas < 2)
    throw std::invalid_argument(std::string(who) +
                                ": need at least 2 antennas");
}

// lgamma(x + r) - lgamma(x) without the catastrophic cancellation the naive
// difference hits once lgamma(x) outgrows the ulp of the ~r*log(x) result.
double lgamma_ratio(double x, double r) {
  if (x < 1e8) return std::lgamma(x + r) - std::lgamma(x);
  // Stirling; the dropped 1/(12x) corrections cancel to O(r/x^2).
  return (x - 0.5) * std::log1p(r / x) + r * std::log(x + r) - r;
}

}  // namespace

double zf_expected_sinr(double rho, double q) {
  check_rho(rho, "zf_expected_sinr");
  check_ratio(q, "zf_expected_sinr");
  return rho * (q - 1.0);
}

double mf_expected_sinr(double rho, int num_users, double q) {
  check_rho(rho, "mf_expected_sinr");
  check_ratio(q, "mf_expected_sinr");
  if (num_users < 1)
    throw std::invalid_argument("mf_expected_sinr: need at least one user");
  const double k = num_users;
  return rho * q / (rho * (k - 1.0) / k + 1.0);
}

double rvq_error_exact(double codebook_size, int num_antennas) {
  check_antennas(num_antennas, "rvq_error_exact");
  if (!(codebook_size >= 1.0))
    throw std::invalid_argument(
        "rvq_error_exact: codebook size must be >= 1");
  const double r = num_antennas / (num_antennas - 1.0);
  const double log_value = std::log(codebook_size) + std::lgamma(r) -
                           lgamma_ratio(codebook_size, r);
  return std::exp(log_value);
}

double rvq_error_bound(double feedback_bits, int num_antennas) {
  check_antennas(num_antennas, "rvq_error_bound");
  if (feedback_bits < 0.0)
    throw std::invalid_argument("rvq_error_bound: bits must be >= 0");
  return std::exp2(-feedback_bits / (num_antennas - 1.0));
}

double rvq_mf_expected_sinr(double rho, int num_users, double q, double xi) {
  check_rho(rho, "rvq_mf_expected_sinr");
  check_ratio(q, "rvq_mf_expected_sinr");
  if (num_users < 1)
    throw std::invalid_argument(
        "rvq_mf_expected_sinr: need at least one user");
  if (!(xi >= 0.0 && xi <= 1.0))
    throw std::invalid_argument(
        "rvq_mf_expected_sinr: codebook error must be in [0, 1]");
  const double k = num_users;
  return rho * q * (1.0 - xi) / (rho / k * (k - 1.0) + 1.0);
}

double bits_required_for_loss(int num_antennas, double z_db) {
  check_antennas(num_antennas, "bits_required_for_loss");
  if (!(z_db > 0.0))
    throw std::invalid_argument(
        "bits_required_for_loss: target loss must be positive");
  return -(num_antennas - 1.0) *
         std::log2(1.0 - std::pow(10.0, -z_db / 10.0));
}

double bits_required_unit_sinr(int num_antennas, int num_users) {
  check_antennas(num_antennas, "bits_required_unit_sinr");
  if (num_users < 1 || num_users > num_antennas)
    throw std::invalid_argument(
        "bits_required_unit_sinr: users must satisfy 1 <= K <= M");
  return -(num_antennas - 1.0) *
         std::log2(1.0 - (num_users - 1.0) / num_antennas);
}

RvqMonteCarlo rvq_monte_carlo(int num_antennas, int feedback_bits, int trials,
                              std::mt19937_64& rng) {
  if (num_antennas < 2 || num_antennas > 8)
    throw std::invalid_argument(
        "rvq_monte_carlo: brute-force search only supports 2..8 antennas");
  if (feedback_bits < 0 || feedback_bits > 12)
    throw std::invalid_argument(
        "rvq_monte_carlo: brute-force search only supports 0..12 bits");
  if (trials < 2)
    throw std::invalid_argument("rvq_monte_carlo: need at least 2 trials");

  const std::size_t codebook = std::size_t{1} << feedback_bits;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int t = 0; t < trials; ++t) {
    arma::cx_rowvec direction = complex_gaussian_vector(num_antennas, rng);
    direction /= arma::norm(direction, 2);
    double best = 0.0;
    for (std::size_t c = 0; c < codebook; ++c) {
      arma::cx_rowvec codeword = complex_gaussian_vector(num_antennas, rng);
      codeword /= arma::norm(codeword, 2);
      const double gain = std::norm(arma::cdot(codeword, direction));
      if (gain > best) best = gain;
    }
    sum += best;
    sum_sq += best * best;
  }
  const double mean = sum / trials;
  const double variance =
      std::max(0.0, (sum_sq / trials - mean * mean) * trials / (trials - 1.0));
  return {mean, std::sqrt(variance / trials), trials};
}

RvqReport make_rvq_report(int num_antennas, int num_users, double rho_db,
                          double z_db) {
  check_antennas(num_antennas, "rvq report");
  if (num_users < 1 || num_users > num_antennas)
    throw std::invalid_argument(
        "rvq report: users must satisfy 1 <= K <= M");
  RvqReport r;
  r.num_antennas = num_antennas;
  r.num_users = num_users;
  r.q = static_cast<double>(num_antennas) / num_users;
  r.rho_db = rho_db;
  r.z_db = z_db;
  const double rho = std::pow(10.0, rho_db / 10.0);
  r.sinr_zf = zf_expected_sinr(rho, r.q);
  r.sinr_mf = mf_expected_sinr(rho, num_users, r.q);
  r.bits_loss = bits_required_for_loss(num_antennas, z_db);
  r.bits_loss_ceil = std::ceil(r.bits_loss);
  r.codebook_loss = std::exp2(r.bits_loss_ceil);
  r.xi_loss = rvq_error_exact(r.codebook_loss, num_antennas);
  r.sinr_mf_rvq = rvq_mf_expected_sinr(rho, num_users, r.q, r.xi_loss);
  r.bits_unit = bits_required_unit_sinr(num_antennas, num_users);
  r.bits_unit_ceil = std::ceil(r.bits_unit);
  r.codebook_unit = std::exp2(r.bits_unit_ceil);
  return r;
}

std::string rvq_report_text(const RvqReport& r) {
  using detail::g9;
  std::ostringstream os;
  os << "antennas = " << r.num_antennas << '\n'
     << "users = " << r.num_users << '\n'
     << "antenna_user_ratio = " << g9(r.q) << '\n'
     << "snr_db = " << g9(r.rho_db) << '\n'
     << "target_loss_db = " << g9(r.z_db) << '\n'
     << "sinr_zf = " << g9(r.sinr_zf) << '\n'
     << "sinr_zf_db = " << g9(to_db(r.sinr_zf)) << '\n'
     << "sinr_mf = " << g9(r.sinr_mf) << '\n'
     << "sinr_mf_db = " << g9(to_db(r.sinr_mf)) << '\n'
     << "bits_for_loss = " << g9(r.bits_loss) << '\n'
     << "bits_for_loss_ceil = " << g9(r.bits_loss_ceil) << '\n'
     << "codebook_for_loss = " << g9(r.codebook_loss) << '\n'
     << "codebook_error_at_loss_budget = " << g9(r.xi_loss) << '\n'
     << "sinr_mf_rvq = " << g9(r.sinr_mf_rvq) << '\n'
     << "sinr_mf_rvq_db = " << g9(to_db(r.sinr_mf_rvq)) << '\n'
     << "bits_for_unit_sinr = " << g9(r.bits_unit) << '\n'
     << "bits_for_unit_sinr_ceil = " << g9(r.bits_unit_ceil) << '\n'
     << "codebook_for_unit_sinr = " << g9(r.codebook_unit) << '\n';
  return os.str();
}

std::string rvq_report_csv(const RvqReport& r) {
  using detail::g9;
  std::ostringstream os;
  os << "antennas,users,q,snr_db,z_db,sinr_zf,sinr_mf,bits_loss,"
        "bits_loss_ceil,codebook_loss,xi_loss,sinr_mf_rvq,bits_unit,"
        "bits_unit_ceil,codebook_unit\n"
     << r.num_antennas << ',' << r.num_users << ',' << g9(r.q) << ','
     << g9(r.rho_db) << ',' << g9(r.z_db) << ',' << g9(r.sinr_zf) << ','
     << g9(r.sinr_mf) << ',' << g9(r.bits_loss) << ',' << g9(r.bits_loss_ceil)
     << ',' << g9(r.codebook_loss) << ',' << g9(r.xi_loss) << ','
     << g9(r.sinr_mf_rvq) << ',' << g9(r.bits_unit) << ','
     << g9(r.bits_unit_ceil) << ',' << g9(r.codebook_unit) << '\n';
  return os.str();
}

}  // namespace tcqlf
