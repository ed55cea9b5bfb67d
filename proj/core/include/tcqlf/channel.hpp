#pragma once

#include <armadillo>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tcqlf {

// First-order fading coefficient J0(2*pi*(v*fc/c)*T), clamped to [0, 1].
// speed in m/s, carrier in Hz, feedback interval in seconds.
double temporal_coefficient(double speed_mps, double carrier_hz,
                            double interval_s);

// Standard complex Gaussian CN(0,1): independent real and imaginary parts
// with variance 1/2 each.
std::complex<double> complex_gaussian(std::mt19937_64& rng);
arma::cx_rowvec complex_gaussian_vector(int n, std::mt19937_64& rng);

// First-order Gauss-Markov fading h[t] = eps*h[t-1] + sqrt(1-eps^2)*g[t]
// with i.i.d. CN(0,1) entries, stationary under CN(0,1) marginals.
class GaussMarkovProcess {
 public:
  GaussMarkovProcess(int num_antennas, double epsilon, std::uint64_t seed);

  const arma::cx_rowvec& current() const { return h_; }
  double epsilon() const { return epsilon_; }

  // Advances one feedback interval and returns the new snapshot.
  const arma::cx_rowvec& step();

 private:
  double epsilon_;
  double innovation_;
  arma::cx_rowvec h_;
  std::mt19937_64 rng_;
};

enum class ArrayTopology { ula, ura };

// Exponential antenna correlation R_ij = zt^d(i,j) together with its
// symmetric positive square root. d is |i-j| on a uniform linear array and
// the Euclidean grid distance on a row-major sqrt(M) x sqrt(M) planar
// array. Eigenvalues within a small negative tolerance are clamped to zero
// so the fully correlated case zt=1 stays representable.
struct SpatialModel {
  int num_antennas;
  double zt;
  ArrayTopology topology;
  arma::mat correlation;
  arma::cx_mat correlation_root;
};

SpatialModel exp_correlation_model(int num_antennas, double zt,
                                   ArrayTopology topology);

// One correlated snapshot g * R^(1/2) with g i.i.d. CN(0,1).
arma::cx_rowvec spatial_channel(const SpatialModel& model,
                                std::mt19937_64& rng);

// Binary channel trace: fixed header (magic, version, antenna count,
// record count) followed by little-endian float64 interleaved re/im pairs,
// one record per feedback interval.
std::vector<arma::cx_rowvec> load_channel_trace(const std::string& path);
void save_channel_trace(const std::string& path,
                        const std::vector<arma::cx_rowvec>& records);

}  // namespace tcqlf
