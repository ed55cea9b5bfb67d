#pragma once

#include <random>
#include <string>

namespace tcqlf {

// Closed forms for random vector quantization (RVQ) of the channel
// direction, used to size the feedback budget that codebook lookup would
// need before any trellis search enters the picture.

// Expected ZF SINR with perfectly fed-back directions, rho*(q-1), where
// q = M/K is the antenna-to-user ratio.
double zf_expected_sinr(double rho, double q);

// Expected MF SINR with perfectly fed-back directions,
// rho*q / (rho*(K-1)/K + 1).
double mf_expected_sinr(double rho, int num_users, double q);

// Mean squared chordal error of a size-Nc random codebook on M antennas:
// Nc * Beta(Nc, M/(M-1)). Evaluated through log-gamma, so astronomically
// large codebooks are fine.
double rvq_error_exact(double codebook_size, int num_antennas);

// Upper bound 2^(-b/(M-1)) on the mean squared chordal error at b bits.
double rvq_error_bound(double feedback_bits, int num_antennas);

// Expected MF SINR under an RVQ codebook with mean squared error xi:
// rho*q*(1-xi) / (rho/K*(K-1) + 1).
double rvq_mf_expected_sinr(double rho, int num_users, double q, double xi);

// Feedback bits needed to keep the mean beamforming-gain loss within z dB:
// -(M-1) log2(1 - 10^(-z/10)).
double bits_required_for_loss(int num_antennas, double z_db);

// Feedback bits at which the codebook error bound drops to (K-1)/M, the
// point where quantization error falls below the multiuser interference
// floor: -(M-1) log2(1 - (K-1)/M). Zero for a single user.
double bits_required_unit_sinr(int num_antennas, int num_users);

struct RvqMonteCarlo {
  double mean_gain;  // empirical E[max_c |hbar c^H|^2] = 1 - xi
  double std_error;
  int trials;
};

// Brute-force codebook search oracle. Bounded to num_antennas <= 8 and
// feedback_bits <= 12; anything larger is exactly the regime the closed
// forms exist for.
RvqMonteCarlo rvq_monte_carlo(int num_antennas, int feedback_bits,
                              int trials, std::mt19937_64& rng);

// Feedback-budget summary for one (M, K, rho, z) scenario.
struct RvqReport {
  int num_antennas = 0;
  int num_users = 0;
  double q = 0;
  double rho_db = 0;
  double z_db = 0;
  double sinr_zf = 0;        // perfect directions, linear
  double sinr_mf = 0;        // perfect directions, linear
  double bits_loss = 0;      // budget for a z dB beamforming loss
  double bits_loss_ceil = 0;
  double codebook_loss = 0;  // 2^ceil, as a double
  double xi_loss = 0;        // exact codebook error at that integer budget
  double sinr_mf_rvq = 0;    // MF SINR under that codebook, linear
  double bits_unit = 0;      // budget reaching the interference floor
  double bits_unit_ceil = 0;
  double codebook_unit = 0;
};

RvqReport make_rvq_report(int num_antennas, int num_users, double rho_db,
                          double z_db);

// Flat key = value block, one field per line.
std::string rvq_report_text(const RvqReport& report);

// Two CSV lines: header and row.
std::string rvq_report_csv(const RvqReport& report);

}  // namespace tcqlf
