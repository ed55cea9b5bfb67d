#include "tcqlf/trellis.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace tcqlf {

namespace {

// Structural checks shared by both factories: full outgoing fan, distinct
// symbols per state, valid ranges, and every state reachable from state 0.
void check_structure(int alphabet_size, int bits_per_stage,
                     const std::vector<std::vector<TrellisEdge>>& edges) {
  const int num_states = static_cast<int>(edges.size());
  const int fan = 1 << bits_per_stage;
  for (int s = 0; s < num_states; ++s) {
    if (static_cast<int>(edges[s].size()) != fan)
      throw std::invalid_argument("trellis: state " + std::to_string(s) +
                                  " must have " + std::to_string(fan) +
                                  " outgoing transitions");
    std::set<int> symbols;
    for (const TrellisEdge& e : edges[s]) {
      if (e.symbol < 0 || e.symbol >= alphabet_size)
        throw std::invalid_argument("trellis: symbol out of range");
      if (e.next_state < 0 || e.next_state >= num_states)
        throw std::invalid_argument("trellis: next state out of range");
      symbols.insert(e.symbol);
    }
    if (static_cast<int>(symbols.size()) != fan)
      throw std::invalid_argument("trellis: state " + std::to_string(s) +
                                  " emits duplicate symbols");
  }
  std::vector<bool> seen(num_states, false);
  std::vector<int> frontier{0};
  seen[0] = true;
  while (!frontier.empty()) {
    int s = frontier.back();
    frontier.pop_back();
    for (const TrellisEdge& e : edges[s]) {
      if (!seen[e.next_state]) {
        seen[e.next_state] = true;
        frontier.push_back(e.next_state);
      }
    }
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }))
    throw std::invalid_argument("trellis: not all states reachable from 0");
}

}  // namespace

Trellis::Trellis(int alphabet_size, int bits_per_stage,
                 std::vector<std::vector<TrellisEdge>> edges)
    : alphabet_size_(alphabet_size),
      bits_per_stage_(bits_per_stage),
      edges_(std::move(edges)) {
  check_structure(alphabet_size_, bits_per_stage_, edges_);
}

std::span<const TrellisEdge> Trellis::transitions(int state) const {
  if (state < 0 || state >= num_states())
    throw std::invalid_argument("trellis: state " + std::to_string(state) +
                                " out of range");
  return edges_[static_cast<std::size_t>(state)];
}

Trellis qpsk_trellis() {
  // Even states emit {0, 2}, odd states {1, 3}; input bit 0 keeps the
  // subset representative, input bit 1 its partner.
  std::vector<std::vector<TrellisEdge>> edges = {
      {{0, 0}, {2, 1}},  // state 0
      {{1, 2}, {3, 3}},  // state 1
      {{2, 0}, {0, 1}},  // state 2
      {{3, 2}, {1, 3}},  // state 3
  };
  return Trellis(4, 1, std::move(edges));
}

Trellis psk8_trellis() {
  // Systematic recursive encoder with parity y0[n] = y0[n-3] ^ b1[n-1]
  // ^ b2[n-2]. State bits (s1, s2, s3) hold the pending parity sums:
  // y0 = s3, next state = (s3, s1 ^ b2, s2 ^ b1), symbol = 4*b2 + 2*b1
  // + y0. Each state therefore emits one full QPSK-subset coset.
  std::vector<std::vector<TrellisEdge>> edges(8);
  for (int s = 0; s < 8; ++s) {
    const int s1 = (s >> 2) & 1;
    const int s2 = (s >> 1) & 1;
    const int s3 = s & 1;
    for (int v = 0; v < 4; ++v) {
      const int b2 = (v >> 1) & 1;
      const int b1 = v & 1;
      const int symbol = 4 * b2 + 2 * b1 + s3;
      const int next = (s3 << 2) | ((s1 ^ b2) << 1) | (s2 ^ b1);
      edges[static_cast<std::size_t>(s)].push_back({symbol, next});
    }
  }
  return Trellis(8, 2, std::move(edges));
}

std::vector<int> conv_encode(const Trellis& trellis,
                             std::span<const std::uint8_t> bits,
                             int start_state) {
  const int bps = trellis.bits_per_stage();
  if (start_state < 0 || start_state >= trellis.num_states())
    throw std::invalid_argument("conv_encode: start state out of range");
  if (bits.size() % static_cast<std::size_t>(bps) != 0)
    throw std::invalid_argument(
        "conv_encode: bit count " + std::to_string(bits.size()) +
        " is not a multiple of " + std::to_string(bps));
  const std::size_t stages = bits.size() / static_cast<std::size_t>(bps);
  std::vector<int> symbols(stages);
  int state = start_state;
  for (std::size_t m = 0; m < stages; ++m) {
    int input = 0;
    for (int b = 0; b < bps; ++b) {
      const std::uint8_t bit = bits[m * static_cast<std::size_t>(bps) +
                                    static_cast<std::size_t>(b)];
      if (bit > 1)
        throw std::invalid_argument("conv_encode: bits must be 0 or 1");
      input = (input << 1) | bit;
    }
    const TrellisEdge& e = trellis.transitions(state)[static_cast<std::size_t>(input)];
    symbols[m] = e.symbol;
    state = e.next_state;
  }
  return symbols;
}

std::vector<std::uint8_t> pack_bits(std::span<const std::uint8_t> bits) {
  std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] > 1)
      throw std::invalid_argument("pack_bits: bits must be 0 or 1");
    if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(1u << (7 - i % 8));
  }
  return bytes;
}

std::vector<std::uint8_t> unpack_bits(std::span<const std::uint8_t> bytes,
                                      std::size_t bit_count) {
  if (bit_count > bytes.size() * 8)
    throw std::invalid_argument("unpack_bits: bit count exceeds input");
  std::vector<std::uint8_t> bits(bit_count);
  for (std::size_t i = 0; i < bit_count; ++i)
    bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1;
  return bits;
}

}  // namespace tcqlf
