#pragma once

#include <armadillo>

namespace tcqlf {

// Zero-forcing directions: columns of H^H (H H^H)^{-1}, each normalized to
// unit power. `channels` holds one user direction per row (K x M, K <= M).
// A singular user set (coincident quantized directions) falls back to the
// minimum-norm least-squares solution, so colliding users share one beam
// instead of aborting the run.
arma::cx_mat zf_precoders(const arma::cx_mat& channels);

// Matched-filter directions: conjugated user rows as unit-power columns.
arma::cx_mat mf_precoders(const arma::cx_mat& channels);

// Per-user SINR under uniform power allocation rho/K and unit-power
// precoding columns: rho/K |h_k w_k|^2 over (rho/K sum_{j!=k} |h_k w_j|^2
// + 1). `true_channels` is K x M, `precoders` M x K.
arma::vec sinr_per_user(const arma::cx_mat& true_channels,
                        const arma::cx_mat& precoders, double rho);

// Sum rate sum_k log2(1 + sinr_k) in bps/Hz.
double spectral_efficiency(const arma::vec& sinrs);

// |h h_tilde^H|^2 for a unit-norm direction h_tilde.
double beamforming_gain(const arma::cx_rowvec& h,
                        const arma::cx_rowvec& h_tilde);

// 10*log10(x); x = 0 maps to -infinity.
double to_db(double linear);

}  // namespace tcqlf
