#include "tcqlf/precoding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tcqlf {

namespace {

constexpr double k_condition_floor = 1e-10;
constexpr double k_unit_tol = 1e-9;

void check_channel_matrix(const arma::cx_mat& channels, const char* who) {
  if (channels.n_rows < 1)
    throw std::invalid_argument(std::string(who) + ": need at least one user");
  if (channels.n_cols < channels.n_rows)
    throw std::invalid_argument(std::string(who) +
                                ": need at least as many antennas as users");
}

arma::cx_mat normalized_columns(arma::cx_mat m, const char* who) {
  for (arma::uword k = 0; k < m.n_cols; ++k) {
    const double n = arma::norm(m.col(k), 2);
    if (n == 0.0 || !std::isfinite(n))
      throw std::runtime_error(std::string(who) + ": direction for user " +
                               std::to_string(k) + " has no power");
    m.col(k) /= n;
  }
  return m;
}

}  // namespace

arma::cx_mat zf_precoders(const arma::cx_mat& channels) {
  check_channel_matrix(channels, "zf_precoders");
  const arma::cx_mat gram = channels * channels.t();
  arma::cx_mat raw;
  if (arma::rcond(gram) >= k_condition_floor) {
    arma::cx_mat inv;
    if (!arma::inv_sympd(inv, gram))
      throw std::runtime_error(
          "zf_precoders: failed to invert the user Gram matrix");
    raw = channels.t() * inv;
  } else {
    // Coincident quantized directions make the Gram matrix singular. Fall
    // back to the minimum-norm least-squares solution: colliding users end
    // up sharing one beam and eat the resulting interference, which is the
    // honest outcome of feeding back identical directions.
    arma::cx_mat pseudo;
    if (!arma::pinv(pseudo, gram))
      throw std::runtime_error(
          "zf_precoders: pseudo-inverse of the user Gram matrix failed");
    raw = channels.t() * pseudo;
  }
  return normalized_columns(raw, "zf_precoders");
}

arma::cx_mat mf_precoders(const arma::cx_mat& channels) {
  check_channel_matrix(channels, "mf_precoders");
  return normalized_columns(channels.t(), "mf_precoders");
}

arma::vec sinr_per_user(const arma::cx_mat& true_channels,
                        const arma::cx_mat& precoders, double rho) {
  const arma::uword num_users = true_channels.n_rows;
  if (precoders.n_cols != num_users ||
      precoders.n_rows != true_channels.n_cols)
    throw std::invalid_argument(
        "sinr_per_user: precoder shape does not match the channel matrix");
  if (!(rho > 0.0))
    throw std::invalid_argument("sinr_per_user: rho must be positive");
  for (arma::uword k = 0; k < num_users; ++k)
    if (std::abs(arma::norm(precoders.col(k), 2) - 1.0) > k_unit_tol)
      throw std::invalid_argument(
          "sinr_per_user: precoding column " + std::to_string(k) +
          " must have unit power");

  const double per_user_power = rho / static_cast<double>(num_users);
  const arma::cx_mat cross = true_channels * precoders;  // (k, j): h_k w_j
  arma::vec sinr(num_users);
  for (arma::uword k = 0; k < num_users; ++k) {
    double interference = 0.0;
    for (arma::uword j = 0; j < num_users; ++j)
      if (j != k) interference += std::norm(cross(k, j));
    sinr(k) = per_user_power * std::norm(cross(k, k)) /
              (per_user_power * interference + 1.0);
  }
  return sinr;
}

double spectral_efficiency(const arma::vec& sinrs) {
  double sum = 0.0;
  for (arma::uword k = 0; k < sinrs.n_elem; ++k) {
    if (!(sinrs(k) >= 0.0) || !std::isfinite(sinrs(k)))
      throw std::invalid_argument(
          "spectral_efficiency: SINR values must be finite and >= 0");
    sum += std::log2(1.0 + sinrs(k));
  }
  return sum;
}

double beamforming_gain(const arma::cx_rowvec& h,
                        const arma::cx_rowvec& h_tilde) {
  if (h.n_elem != h_tilde.n_elem || h.n_elem == 0)
    throw std::invalid_argument(
        "beamforming_gain: vectors must share a nonzero length");
  if (std::abs(arma::norm(h_tilde, 2) - 1.0) > k_unit_tol)
    throw std::invalid_argument(
        "beamforming_gain: the fed-back direction must have unit norm");
  const std::complex<double> inner =
      arma::as_scalar(h * h_tilde.t());  // .t() is the conjugate transpose
  return std::norm(inner);
}

double to_db(double linear) {
  if (!(linear >= 0.0))
    throw std::invalid_argument("to_db: value must be >= 0");
  return 10.0 * std::log10(linear);
}

}  // namespace tcqlf
