#include "tcqlf/quantizer.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

namespace tcqlf {

namespace {

constexpr double k_unit_norm_tol = 1e-9;

void check_unit_norm(const arma::cx_rowvec& v, const char* who) {
  if (std::abs(arma::norm(v, 2) - 1.0) > k_unit_norm_tol)
    throw std::invalid_argument(std::string(who) +
                                ": input must have unit norm");
}

std::vector<StageConstellation> uniform_stages(const Trellis& trellis,
                                               std::size_t stages,
                                               double scale) {
  const StageConstellation stage = transform_constellation(
      psk_points(trellis.alphabet_size()), {0.0, 0.0}, scale);
  return std::vector<StageConstellation>(stages, stage);
}

arma::cx_rowvec map_path(std::span<const int> symbols,
                         std::span<const StageConstellation> stages) {
  arma::cx_rowvec out(symbols.size());
  for (std::size_t m = 0; m < symbols.size(); ++m)
    out(m) = stages[m][static_cast<std::size_t>(symbols[m])];
  return out;
}

}  // namespace

arma::cx_rowvec normalize_cdi(const arma::cx_rowvec& h) {
  if (h.n_elem == 0)
    throw std::invalid_argument("normalize_cdi: empty channel vector");
  const double n = arma::norm(h, 2);
  if (n == 0.0 || !std::isfinite(n))
    throw std::invalid_argument(
        "normalize_cdi: channel vector has no direction");
  return h / n;
}

QuantizationResult viterbi_quantize(
    const arma::cx_rowvec& cdi, const Trellis& trellis,
    std::span<const StageConstellation> stages) {
  const std::size_t num_stages = cdi.n_elem;
  if (num_stages == 0)
    throw std::invalid_argument("viterbi_quantize: empty input");
  if (stages.size() != num_stages)
    throw std::invalid_argument(
        "viterbi_quantize: need one stage constellation per antenna");
  check_unit_norm(cdi, "viterbi_quantize");

  const int num_states = trellis.num_states();
  const int alphabet = trellis.alphabet_size();
  const int fan = trellis.inputs_per_state();
  constexpr double inf = std::numeric_limits<double>::infinity();

  // Path always starts in state 0; strict < keeps the survivor with the
  // smallest predecessor state on metric ties.
  std::vector<double> metric(static_cast<std::size_t>(num_states), inf);
  std::vector<double> next(static_cast<std::size_t>(num_states), inf);
  metric[0] = 0.0;

  struct Survivor {
    std::int16_t prev;
    std::int16_t input;
  };
  std::vector<Survivor> survivors(num_stages *
                                  static_cast<std::size_t>(num_states));
  std::vector<double> point_cost(static_cast<std::size_t>(alphabet));

  for (std::size_t m = 0; m < num_stages; ++m) {
    const StageConstellation& stage = stages[m];
    if (static_cast<int>(stage.size()) != alphabet)
      throw std::invalid_argument(
          "viterbi_quantize: stage constellation size mismatch at stage " +
          std::to_string(m));
    for (int p = 0; p < alphabet; ++p)
      point_cost[static_cast<std::size_t>(p)] =
          std::norm(cdi(m) - stage[static_cast<std::size_t>(p)]);

    std::fill(next.begin(), next.end(), inf);
    for (int s = 0; s < num_states; ++s) {
      const double base = metric[static_cast<std::size_t>(s)];
      if (!(base < inf)) continue;
      const auto edges = trellis.transitions(s);
      for (int v = 0; v < fan; ++v) {
        const TrellisEdge& e = edges[static_cast<std::size_t>(v)];
        const double cand =
            base + point_cost[static_cast<std::size_t>(e.symbol)];
        if (cand < next[static_cast<std::size_t>(e.next_state)]) {
          next[static_cast<std::size_t>(e.next_state)] = cand;
          survivors[m * static_cast<std::size_t>(num_states) +
                    static_cast<std::size_t>(e.next_state)] = {
              static_cast<std::int16_t>(s), static_cast<std::int16_t>(v)};
        }
      }
    }
    std::swap(metric, next);
  }

  int best_state = 0;
  for (int s = 1; s < num_states; ++s)
    if (metric[static_cast<std::size_t>(s)] <
        metric[static_cast<std::size_t>(best_state)])
      best_state = s;

  const int bps = trellis.bits_per_stage();
  std::vector<std::uint8_t> bits(num_stages * static_cast<std::size_t>(bps));
  int state = best_state;
  for (std::size_t m = num_stages; m-- > 0;) {
    const Survivor& sv = survivors[m * static_cast<std::size_t>(num_states) +
                                   static_cast<std::size_t>(state)];
    for (int b = 0; b < bps; ++b)
      bits[m * static_cast<std::size_t>(bps) + static_cast<std::size_t>(b)] =
          static_cast<std::uint8_t>((sv.input >> (bps - 1 - b)) & 1);
    state = sv.prev;
  }

  QuantizationResult result;
  result.bits = std::move(bits);
  result.symbols = conv_encode(trellis, result.bits, 0);
  result.metric = metric[static_cast<std::size_t>(best_state)];
  result.reconstructed = normalize_cdi(map_path(result.symbols, stages));
  return result;
}

arma::cx_rowvec reconstruct(std::span<const std::uint8_t> bits,
                            const Trellis& trellis,
                            std::span<const StageConstellation> stages) {
  if (bits.size() !=
      stages.size() * static_cast<std::size_t>(trellis.bits_per_stage()))
    throw std::invalid_argument(
        "reconstruct: bit count does not match stage count");
  const std::vector<int> symbols = conv_encode(trellis, bits, 0);
  return normalize_cdi(map_path(symbols, stages));
}

QuantizationResult quantize_spatial(const arma::cx_rowvec& h,
                                    const Trellis& trellis) {
  const arma::cx_rowvec cdi = normalize_cdi(h);
  const auto stages = uniform_stages(
      trellis, cdi.n_elem, spatial_scale(static_cast<int>(cdi.n_elem)));
  return viterbi_quantize(cdi, trellis, stages);
}

namespace {
int checked_antennas(int num_antennas) {
  if (num_antennas < 1)
    throw std::invalid_argument(
        "differential session: antenna count must be >= 1");
  return num_antennas;
}
}  // namespace

DifferentialSession::DifferentialSession(const Trellis& trellis,
                                         int num_antennas, double epsilon)
    : trellis_(trellis),
      base_(psk_points(trellis.alphabet_size())),
      centers_(static_cast<arma::uword>(checked_antennas(num_antennas)),
               arma::fill::zeros),
      scales_(temporal_scales(epsilon, num_antennas)) {}

double DifferentialSession::scale() const {
  return interval_ == 0 ? scales_.first_interval : scales_.tracking;
}

std::vector<StageConstellation> DifferentialSession::current_stages() const {
  const double s = scale();
  std::vector<StageConstellation> stages(centers_.n_elem);
  for (std::size_t m = 0; m < centers_.n_elem; ++m)
    stages[m] = transform_constellation(base_, centers_(m), s);
  return stages;
}

arma::cx_rowvec DifferentialSession::apply_path(
    std::span<const int> symbols, std::span<const StageConstellation> stages) {
  const arma::cx_rowvec out = map_path(symbols, stages);
  for (std::size_t m = 0; m < centers_.n_elem; ++m) centers_(m) = out(m);
  ++interval_;
  return normalize_cdi(out);
}

QuantizationResult DifferentialSession::user_step(const arma::cx_rowvec& h) {
  if (h.n_elem != centers_.n_elem)
    throw std::invalid_argument(
        "differential session: snapshot size does not match session");
  const auto stages = current_stages();
  QuantizationResult result =
      viterbi_quantize(normalize_cdi(h), trellis_, stages);
  apply_path(result.symbols, stages);
  return result;
}

arma::cx_rowvec DifferentialSession::bs_step(
    std::span<const std::uint8_t> bits) {
  if (bits.size() != centers_.n_elem *
                         static_cast<std::size_t>(trellis_.bits_per_stage()))
    throw std::invalid_argument(
        "differential session: feedback word length mismatch");
  const auto stages = current_stages();
  const std::vector<int> symbols = conv_encode(trellis_, bits, 0);
  return apply_path(symbols, stages);
}

}  // namespace tcqlf
