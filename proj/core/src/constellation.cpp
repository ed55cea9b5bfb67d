#include "tcqlf/constellation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tcqlf {

std::vector<std::complex<double>> psk_points(int alphabet_size) {
  if (alphabet_size != 4 && alphabet_size != 8)
    throw std::invalid_argument("psk_points: alphabet size " +
                                std::to_string(alphabet_size) +
                                " not supported (use 4 or 8)");
  std::vector<std::complex<double>> points(
      static_cast<std::size_t>(alphabet_size));
  for (int k = 0; k < alphabet_size; ++k) {
    const double angle = 2.0 * std::numbers::pi * k / alphabet_size;
    points[static_cast<std::size_t>(k)] = {std::cos(angle), std::sin(angle)};
  }
  return points;
}

double initial_scale(int num_antennas) {
  if (num_antennas < 1)
    throw std::invalid_argument("initial_scale: antenna count must be >= 1");
  return 1.0 / std::sqrt(static_cast<double>(num_antennas));
}

double differential_scale(double epsilon, int num_antennas) {
  if (num_antennas < 1)
    throw std::invalid_argument(
        "differential_scale: antenna count must be >= 1");
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw std::invalid_argument(
        "differential_scale: fading coefficient must be in [0, 1]");
  return std::sqrt(std::numbers::pi * (1.0 - epsilon) /
                   (2.0 * num_antennas));
}

double spatial_scale(int num_antennas) { return initial_scale(num_antennas); }

ScaleParams temporal_scales(double epsilon, int num_antennas) {
  return {initial_scale(num_antennas),
          differential_scale(epsilon, num_antennas)};
}

std::complex<double> transform_point(std::complex<double> base,
                                     std::complex<double> center,
                                     double scale) {
  return scale * base + center;
}

StageConstellation transform_constellation(
    const std::vector<std::complex<double>>& base,
    std::complex<double> center, double scale) {
  StageConstellation out(base.size());
  for (std::size_t i = 0; i < base.size(); ++i)
    out[i] = transform_point(base[i], center, scale);
  return out;
}

}  // namespace tcqlf
