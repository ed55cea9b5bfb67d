#pragma once

#include <armadillo>
#include <cstdint>
#include <span>
#include <vector>

#include "tcqlf/constellation.hpp"
#include "tcqlf/trellis.hpp"

namespace tcqlf {

// Channel direction h/||h||. Throws on an all-zero input.
arma::cx_rowvec normalize_cdi(const arma::cx_rowvec& h);

struct QuantizationResult {
  std::vector<std::uint8_t> bits;  // bits_per_stage entries per antenna, 0/1
  std::vector<int> symbols;        // selected symbol per stage
  double metric;                   // squared distance to the unnormalized output
  arma::cx_rowvec reconstructed;   // unit-norm reconstruction
};

// Minimum-distance path search over the trellis, one stage per antenna.
// The path always starts in state 0, so no state information needs to be
// fed back. `cdi` must have unit norm and stages.size() == cdi.n_elem.
// Metric ties are broken toward the smaller predecessor state, final-state
// ties toward the smaller terminal state.
QuantizationResult viterbi_quantize(const arma::cx_rowvec& cdi,
                                    const Trellis& trellis,
                                    std::span<const StageConstellation> stages);

// Receiver-side reconstruction from the feedback bits: re-encode, map each
// symbol through its stage constellation, normalize. Identical to the
// quantizer's reconstruction for the same stages.
arma::cx_rowvec reconstruct(std::span<const std::uint8_t> bits,
                            const Trellis& trellis,
                            std::span<const StageConstellation> stages);

// Snapshot quantizer: every stage uses the base PSK constellation scaled by
// 1/sqrt(M) around zero. Used for spatially correlated channels and as the
// memoryless baseline in temporal runs.
QuantizationResult quantize_spatial(const arma::cx_rowvec& h,
                                    const Trellis& trellis);

// One end of a differential feedback link. The user-side instance selects
// feedback bits, the base-station instance replays them; both apply the
// same deterministic center/scale update, which keeps the two ends
// synchronized without any extra signaling. Stage m of interval n is the
// base constellation scaled by delta and translated to the point selected
// at stage m of interval n-1 (the origin at interval 0).
class DifferentialSession {
 public:
  DifferentialSession(const Trellis& trellis, int num_antennas,
                      double epsilon);

  // Quantizes one channel snapshot and advances the session.
  QuantizationResult user_step(const arma::cx_rowvec& h);

  // Replays feedback bits and advances the session; returns the unit-norm
  // reconstruction.
  arma::cx_rowvec bs_step(std::span<const std::uint8_t> bits);

  std::vector<StageConstellation> current_stages() const;
  const arma::cx_rowvec& centers() const { return centers_; }
  double scale() const;
  std::uint64_t interval_index() const { return interval_; }

 private:
  arma::cx_rowvec apply_path(std::span<const int> symbols,
                             std::span<const StageConstellation> stages);

  Trellis trellis_;
  std::vector<std::complex<double>> base_;
  arma::cx_rowvec centers_;
  ScaleParams scales_;
  std::uint64_t interval_ = 0;
};

}  // namespace tcqlf
