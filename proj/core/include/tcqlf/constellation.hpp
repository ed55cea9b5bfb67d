#pragma once

#include <complex>
#include <vector>

namespace tcqlf {

// Source points of one quantizer stage.
using StageConstellation = std::vector<std::complex<double>>;

// L equally spaced unit-magnitude points, index k at angle 2*pi*k/L.
// Supported sizes are 4 (QPSK) and 8 (8PSK).
std::vector<std::complex<double>> psk_points(int alphabet_size);

// Per-antenna scale of the first feedback interval, 1/sqrt(M). Entries of a
// normalized M-antenna channel concentrate on magnitude 1/sqrt(M).
double initial_scale(int num_antennas);

// Per-antenna scale of later feedback intervals,
// sqrt(pi*(1-epsilon)/(2*M)): the mean per-entry variation of the
// normalized channel between consecutive intervals under channel hardening.
double differential_scale(double epsilon, int num_antennas);

// Scale used when quantizing a single snapshot of a spatially correlated
// channel, 1/sqrt(M).
double spatial_scale(int num_antennas);

// Scales used by one temporally correlated scenario.
struct ScaleParams {
  double first_interval;  // 1/sqrt(M)
  double tracking;        // sqrt(pi*(1-epsilon)/(2*M))
};

ScaleParams temporal_scales(double epsilon, int num_antennas);

// Translation and scaling of a base point: scale*base + center.
std::complex<double> transform_point(std::complex<double> base,
                                     std::complex<double> center,
                                     double scale);

StageConstellation transform_constellation(
    const std::vector<std::complex<double>>& base,
    std::complex<double> center, double scale);

}  // namespace tcqlf
