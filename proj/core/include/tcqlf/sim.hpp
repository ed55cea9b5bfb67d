#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tcqlf/channel.hpp"
#include "tcqlf/errors.hpp"

namespace tcqlf {

enum class Scheme { perfect_cdi, memoryless_tcq, differential_tcq, spatial_tcq };
enum class ConstellationKind { qpsk, psk8 };
enum class ChannelKind { gauss_markov, spatial, trace };

struct ExperimentConfig {
  Scheme scheme = Scheme::differential_tcq;
  ConstellationKind constellation = ConstellationKind::qpsk;
  int num_antennas = 100;
  int num_users = 10;
  double rho_db = 10.0;

  ChannelKind channel = ChannelKind::gauss_markov;
  // Either a direct fading coefficient or a speed it is derived from.
  std::optional<double> epsilon;
  std::optional<double> speed_kmh;
  double carrier_hz = 2.5e9;
  double interval_s = 5e-3;

  double zt = 0.9;
  ArrayTopology topology = ArrayTopology::ula;

  std::string trace_path;

  int intervals = 100;
  int trials = 200;
  std::uint64_t seed = 1;

  // Optional per-sample SINR dump (for CDFs), empty to disable.
  std::string sinr_dump_path;
};

// Throws config_error on an inconsistent scenario.
void validate_temporal(const ExperimentConfig& cfg);
void validate_spatial(const ExperimentConfig& cfg);

// Fading coefficient of a temporal scenario: cfg.epsilon when given, else
// derived from speed, carrier and feedback interval.
double resolved_epsilon(const ExperimentConfig& cfg);

// 16 hex digits over the canonical scenario serialization.
std::string config_hash(const ExperimentConfig& cfg);

// Per-interval aggregate over trials x users.
struct ResultRecord {
  int interval = 0;
  // Mean over trials x users of the per-realization gain in dB. Averaging
  // in the dB domain keeps heavy-tailed channel norms (near-rank-1 spatial
  // correlation) from dominating the reported curve.
  double bf_gain_db = 0;
  double se_zf = 0;  // mean sum spectral efficiency, bps/Hz
  double se_mf = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Temporally correlated (or trace-driven) link simulation: one record per
// feedback interval. Trials run on a worker pool; every (trial, user) pair
// draws from its own RNG stream and partial results reduce in trial order,
// so output is identical for any worker count.
std::vector<ResultRecord> run_temporal_experiment(const ExperimentConfig& cfg);

// Spatially correlated snapshot simulation: a single record.
std::vector<ResultRecord> run_spatial_experiment(const ExperimentConfig& cfg);

// Fixed column order: interval, bf_gain_db, se_zf, se_mf, seed,
// config_hash; floats carry 9 significant digits.
void emit_csv(std::ostream& out, const std::vector<ResultRecord>& records);
void emit_csv(const std::string& path, const std::vector<ResultRecord>& records);
std::vector<ResultRecord> parse_csv(std::istream& in);
std::vector<ResultRecord> parse_csv_file(const std::string& path);

// Worker count: TCQSIM_WORKERS when set (>= 1), else hardware concurrency.
int worker_count();

}  // namespace tcqlf
