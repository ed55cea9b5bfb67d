#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tcqlf {

// One labeled branch of a trellis section: consuming one input value emits
// `symbol` and moves the encoder to `next_state`.
struct TrellisEdge {
  int symbol;
  int next_state;
};

// Time-invariant trellis of a rate-b/(b+1) convolutional encoder over an
// L-point symbol alphabet. The transition table is shared by the encoder
// and the path-search decoder, so both sides always walk the same graph.
class Trellis {
 public:
  int num_states() const { return static_cast<int>(edges_.size()); }
  int alphabet_size() const { return alphabet_size_; }
  int bits_per_stage() const { return bits_per_stage_; }
  int inputs_per_state() const { return 1 << bits_per_stage_; }

  // Branches out of `state`, ordered by input value.
  std::span<const TrellisEdge> transitions(int state) const;

 private:
  friend Trellis qpsk_trellis();
  friend Trellis psk8_trellis();
  Trellis(int alphabet_size, int bits_per_stage,
          std::vector<std::vector<TrellisEdge>> edges);

  int alphabet_size_;
  int bits_per_stage_;
  std::vector<std::vector<TrellisEdge>> edges_;
};

// 4-state trellis over the QPSK alphabet, one input bit per stage. Even
// states emit the even symbols {0, 2}, odd states the odd symbols {1, 3}.
Trellis qpsk_trellis();

// 8-state trellis over the 8PSK alphabet, two input bits per stage, built
// from a systematic recursive encoder so each state emits one of the two
// QPSK-subset cosets.
Trellis psk8_trellis();

// Walks the trellis from `start_state`, consuming bits_per_stage bits per
// stage (most significant bit of each input group first), and returns the
// emitted symbol sequence.
std::vector<int> conv_encode(const Trellis& trellis,
                             std::span<const std::uint8_t> bits,
                             int start_state = 0);

// Feedback-word packing: bit i of the stream lands in bit (7 - i%8) of
// byte i/8; the final byte is zero-padded.
std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits);
std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes,
                                      std::size_t bit_count);

}  // namespace tcqlf
