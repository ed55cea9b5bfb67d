#include "tcqlf/sim.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "detail_format.hpp"
#include "tcqlf/precoding.hpp"
#include "tcqlf/quantizer.hpp"
#include "tcqlf/rng.hpp"

namespace tcqlf {

namespace {

constexpr char k_csv_header[] = "interval,bf_gain_db,se_zf,se_mf,seed,config_hash";

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::perfect_cdi: return "perfect_cdi";
    case Scheme::memoryless_tcq: return "memoryless_tcq";
    case Scheme::differential_tcq: return "differential_tcq";
    case Scheme::spatial_tcq: return "spatial_tcq";
  }
  return "unknown";
}

const char* constellation_name(ConstellationKind c) {
  return c == ConstellationKind::qpsk ? "qpsk" : "8psk";
}

const char* channel_name(ChannelKind c) {
  switch (c) {
    case ChannelKind::gauss_markov: return "gauss_markov";
    case ChannelKind::spatial: return "spatial";
    case ChannelKind::trace: return "trace";
  }
  return "unknown";
}

const char* topology_name(ArrayTopology t) {
  return t == ArrayTopology::ula ? "ula" : "ura";
}

void validate_common(const ExperimentConfig& cfg) {
  if (cfg.num_antennas < 1)
    throw config_error("antenna count must be >= 1");
  if (cfg.num_users < 1) throw config_error("user count must be >= 1");
  if (cfg.num_users > cfg.num_antennas)
    throw config_error("user count must not exceed the antenna count");
  if (cfg.trials < 1) throw config_error("trial count must be >= 1");
  if (cfg.intervals < 1) throw config_error("interval count must be >= 1");
  if (!std::isfinite(cfg.rho_db)) throw config_error("snr must be finite");
  if (cfg.epsilon && cfg.speed_kmh)
    throw config_error("give either a fading coefficient or a speed, not both");
}

Trellis trellis_for(const ExperimentConfig& cfg) {
  return cfg.constellation == ConstellationKind::qpsk ? qpsk_trellis()
                                                      : psk8_trellis();
}

// Runs body(0..trials-1) on the worker pool. Each trial writes only its own
// slot, so scheduling cannot influence results.
void parallel_for_trials(int trials, const std::function<void(int)>& body) {
  const int workers = std::min(worker_count(), trials);
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) body(t);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const int t = next.fetch_add(1);
      if (t >= trials) return;
      try {
        body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct TrialPartial {
  std::vector<double> bf;     // per interval, summed over users
  std::vector<double> se_zf;  // per interval
  std::vector<double> se_mf;
  std::vector<double> sinr_zf;  // K per interval when dumping
  std::vector<double> sinr_mf;
};

void write_sinr_dump(const ExperimentConfig& cfg,
                     const std::vector<TrialPartial>& partials) {
  std::ofstream out(cfg.sinr_dump_path);
  if (!out)
    throw std::runtime_error("sinr dump: cannot write " + cfg.sinr_dump_path);
  out << "trial,interval,user,sinr_zf,sinr_mf\n";
  for (std::size_t trial = 0; trial < partials.size(); ++trial) {
    const TrialPartial& p = partials[trial];
    const std::size_t intervals = p.se_zf.size();
    const std::size_t users = intervals ? p.sinr_zf.size() / intervals : 0;
    for (std::size_t t = 0; t < intervals; ++t)
      for (std::size_t u = 0; u < users; ++u)
        out << trial << ',' << t << ',' << u << ','
            << detail::g9(p.sinr_zf[t * users + u]) << ','
            << detail::g9(p.sinr_mf[t * users + u]) << '\n';
  }
  if (!out)
    throw std::runtime_error("sinr dump: write failed for " +
                             cfg.sinr_dump_path);
}

std::vector<ResultRecord> reduce_records(
    const ExperimentConfig& cfg, const std::vector<TrialPartial>& partials,
    int intervals) {
  const std::string hash = config_hash(cfg);
  const double trials = cfg.trials;
  const double samples = trials * cfg.num_users;
  std::vector<ResultRecord> records(static_cast<std::size_t>(intervals));
  for (int t = 0; t < intervals; ++t) {
    double bf = 0.0, zf = 0.0, mf = 0.0;
    for (const TrialPartial& p : partials) {
      bf += p.bf[static_cast<std::size_t>(t)];
      zf += p.se_zf[static_cast<std::size_t>(t)];
      mf += p.se_mf[static_cast<std::size_t>(t)];
    }
    ResultRecord& r = records[static_cast<std::size_t>(t)];
    r.interval = t;
    r.bf_gain_db = bf / samples;
    r.se_zf = zf / trials;
    r.se_mf = mf / trials;
    r.seed = cfg.seed;
    r.config_hash = hash;
  }
  return records;
}

}  // namespace

void validate_temporal(const ExperimentConfig& cfg) {
  validate_common(cfg);
  if (cfg.channel == ChannelKind::spatial)
    throw config_error(
        "temporal experiment needs a gauss_markov channel or a trace");
  if (cfg.scheme == Scheme::spatial_tcq)
    throw config_error(
        "spatial_tcq quantizes single snapshots; use memoryless_tcq or "
        "differential_tcq in temporal runs");
  if (cfg.channel == ChannelKind::gauss_markov ||
      cfg.scheme == Scheme::differential_tcq)
    resolved_epsilon(cfg);  // throws when unresolvable
  if (cfg.channel == ChannelKind::trace && cfg.trace_path.empty())
    throw config_error("trace channel needs a trace path");
}

void validate_spatial(const ExperimentConfig& cfg) {
  validate_common(cfg);
  if (cfg.channel != ChannelKind::spatial)
    throw config_error("spatial experiment needs a spatial channel");
  if (cfg.scheme != Scheme::perfect_cdi && cfg.scheme != Scheme::spatial_tcq)
    throw config_error(
        "spatial experiments support spatial_tcq or perfect_cdi");
  if (!(cfg.zt >= 0.0 && cfg.zt <= 1.0))
    throw config_error("transmit correlation must be in [0, 1]");
  if (cfg.topology == ArrayTopology::ura) {
    const int side =
        static_cast<int>(std::lround(std::sqrt(cfg.num_antennas)));
    if (side * side != cfg.num_antennas)
      throw config_error("planar array needs a square antenna count");
  }
}

double resolved_epsilon(const ExperimentConfig& cfg) {
  if (cfg.epsilon) {
    if (!(*cfg.epsilon >= 0.0 && *cfg.epsilon <= 1.0))
      throw config_error("fading coefficient must be in [0, 1]");
    return *cfg.epsilon;
  }
  if (cfg.speed_kmh) {
    if (!(*cfg.speed_kmh >= 0.0)) throw config_error("speed must be >= 0");
    if (!(cfg.carrier_hz > 0.0) || !(cfg.interval_s > 0.0))
      throw config_error("carrier and feedback interval must be positive");
    return temporal_coefficient(*cfg.speed_kmh / 3.6, cfg.carrier_hz,
                                cfg.interval_s);
  }
  throw config_error(
      "temporal scenario needs a fading coefficient or a speed");
}

std::string config_hash(const ExperimentConfig& cfg) {
  using detail::g9;
  std::ostringstream os;
  os << "scheme=" << scheme_name(cfg.scheme)
     << "\nconstellation=" << constellation_name(cfg.constellation)
     << "\nantennas=" << cfg.num_antennas << "\nusers=" << cfg.num_users
     << "\nsnr_db=" << g9(cfg.rho_db)
     << "\nchannel=" << channel_name(cfg.channel);
  switch (cfg.channel) {
    case ChannelKind::gauss_markov:
      os << "\nepsilon=" << g9(resolved_epsilon(cfg));
      break;
    case ChannelKind::spatial:
      os << "\nzt=" << g9(cfg.zt)
         << "\ntopology=" << topology_name(cfg.topology);
      break;
    case ChannelKind::trace:
      os << "\ntrace=" << cfg.trace_path;
      if (cfg.scheme == Scheme::differential_tcq)
        os << "\nepsilon=" << g9(resolved_epsilon(cfg));
      break;
  }
  os << "\nintervals=" << cfg.intervals << "\ntrials=" << cfg.trials
     << "\nseed=" << cfg.seed << '\n';
  const std::string text = os.str();

  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::vector<ResultRecord> run_temporal_experiment(
    const ExperimentConfig& cfg) {
  validate_temporal(cfg);
  const int num_antennas = cfg.num_antennas;
  const int num_users = cfg.num_users;
  const int intervals = cfg.intervals;
  const double rho = std::pow(10.0, cfg.rho_db / 10.0);
  const Trellis trellis = trellis_for(cfg);
  const bool differential = cfg.scheme == Scheme::differential_tcq;
  const bool use_trace = cfg.channel == ChannelKind::trace;
  const double eps = (cfg.channel == ChannelKind::gauss_markov || differential)
                         ? resolved_epsilon(cfg)
                         : 0.0;

  std::vector<arma::cx_rowvec> trace;
  if (use_trace) {
    trace = load_channel_trace(cfg.trace_path);
    const std::size_t needed = static_cast<std::size_t>(cfg.trials) *
                               static_cast<std::size_t>(num_users) *
                               static_cast<std::size_t>(intervals);
    if (trace.size() < needed)
      throw config_error(
          "trace provides " + std::to_string(trace.size()) +
          " records but trials x users x intervals = " +
          std::to_string(needed) + " are needed");
    if (static_cast<int>(trace.front().n_elem) != num_antennas)
      throw config_error(
          "trace records carry " + std::to_string(trace.front().n_elem) +
          " antennas but the scenario is configured for " +
          std::to_string(num_antennas));
  }

  const bool dump = !cfg.sinr_dump_path.empty();
  std::vector<TrialPartial> partials(static_cast<std::size_t>(cfg.trials));

  parallel_for_trials(cfg.trials, [&](int trial) {
    TrialPartial p;
    p.bf.assign(static_cast<std::size_t>(intervals), 0.0);
    p.se_zf.assign(static_cast<std::size_t>(intervals), 0.0);
    p.se_mf.assign(static_cast<std::size_t>(intervals), 0.0);
    if (dump) {
      p.sinr_zf.assign(static_cast<std::size_t>(intervals) *
                           static_cast<std::size_t>(num_users),
                       0.0);
      p.sinr_mf = p.sinr_zf;
    }

    std::vector<GaussMarkovProcess> processes;
    if (!use_trace) {
      processes.reserve(static_cast<std::size_t>(num_users));
      for (int u = 0; u < num_users; ++u)
        processes.emplace_back(
            num_antennas, eps,
            stream_seed(cfg.seed, static_cast<std::uint64_t>(trial) *
                                          static_cast<std::uint64_t>(num_users) +
                                      static_cast<std::uint64_t>(u)));
    }
    std::vector<DifferentialSession> user_sessions;
    std::vector<DifferentialSession> bs_sessions;
    if (differential) {
      user_sessions.reserve(static_cast<std::size_t>(num_users));
      bs_sessions.reserve(static_cast<std::size_t>(num_users));
      for (int u = 0; u < num_users; ++u) {
        user_sessions.emplace_back(trellis, num_antennas, eps);
        bs_sessions.emplace_back(trellis, num_antennas, eps);
      }
    }

    arma::cx_mat true_channels(static_cast<arma::uword>(num_users),
                               static_cast<arma::uword>(num_antennas));
    arma::cx_mat quantized(static_cast<arma::uword>(num_users),
                           static_cast<arma::uword>(num_antennas));
    for (int t = 0; t < intervals; ++t) {
      for (int u = 0; u < num_users; ++u) {
        const arma::cx_rowvec h =
            use_trace
                ? trace[(static_cast<std::size_t>(trial) *
                             static_cast<std::size_t>(num_users) +
                         static_cast<std::size_t>(u)) *
                            static_cast<std::size_t>(intervals) +
                        static_cast<std::size_t>(t)]
                : (t == 0 ? processes[static_cast<std::size_t>(u)].current()
                          : processes[static_cast<std::size_t>(u)].step());
        arma::cx_rowvec direction;
        switch (cfg.scheme) {
          case Scheme::perfect_cdi:
            direction = normalize_cdi(h);
            break;
          case Scheme::memoryless_tcq:
            direction = quantize_spatial(h, trellis).reconstructed;
            break;
          case Scheme::differential_tcq: {
            const QuantizationResult q =
                user_sessions[static_cast<std::size_t>(u)].user_step(h);
            direction =
                bs_sessions[static_cast<std::size_t>(u)].bs_step(q.bits);
            break;
          }
          case Scheme::spatial_tcq:
            throw config_error("spatial_tcq is not a temporal scheme");
        }
        p.bf[static_cast<std::size_t>(t)] +=
            to_db(beamforming_gain(h, direction));
        true_channels.row(static_cast<arma::uword>(u)) = h;
        quantized.row(static_cast<arma::uword>(u)) = direction;
      }
      const arma::vec sinr_zf =
          sinr_per_user(true_channels, zf_precoders(quantized), rho);
      const arma::vec sinr_mf =
          sinr_per_user(true_channels, mf_precoders(quantized), rho);
      p.se_zf[static_cast<std::size_t>(t)] = spectral_efficiency(sinr_zf);
      p.se_mf[static_cast<std::size_t>(t)] = spectral_efficiency(sinr_mf);
      if (dump)
        for (int u = 0; u < num_users; ++u) {
          p.sinr_zf[static_cast<std::size_t>(t) *
                        static_cast<std::size_t>(num_users) +
                    static_cast<std::size_t>(u)] =
              sinr_zf(static_cast<arma::uword>(u));
          p.sinr_mf[static_cast<std::size_t>(t) *
                        static_cast<std::size_t>(num_users) +
                    static_cast<std::size_t>(u)] =
              sinr_mf(static_cast<arma::uword>(u));
        }
    }
    partials[static_cast<std::size_t>(trial)] = std::move(p);
  });

  if (dump) write_sinr_dump(cfg, partials);
  return reduce_records(cfg, partials, intervals);
}

std::vector<ResultRecord> run_spatial_experiment(const ExperimentConfig& cfg) {
  validate_spatial(cfg);
  const int num_antennas = cfg.num_antennas;
  const int num_users = cfg.num_users;
  const double rho = std::pow(10.0, cfg.rho_db / 10.0);
  const Trellis trellis = trellis_for(cfg);
  const SpatialModel model =
      exp_correlation_model(num_antennas, cfg.zt, cfg.topology);

  const bool dump = !cfg.sinr_dump_path.empty();
  std::vector<TrialPartial> partials(static_cast<std::size_t>(cfg.trials));

  parallel_for_trials(cfg.trials, [&](int trial) {
    TrialPartial p;
    p.bf.assign(1, 0.0);
    p.se_zf.assign(1, 0.0);
    p.se_mf.assign(1, 0.0);
    if (dump) {
      p.sinr_zf.assign(static_cast<std::size_t>(num_users), 0.0);
      p.sinr_mf = p.sinr_zf;
    }
    arma::cx_mat true_channels(static_cast<arma::uword>(num_users),
                               static_cast<arma::uword>(num_antennas));
    arma::cx_mat quantized(static_cast<arma::uword>(num_users),
                           static_cast<arma::uword>(num_antennas));
    for (int u = 0; u < num_users; ++u) {
      std::mt19937_64 rng = make_stream(
          cfg.seed, static_cast<std::uint64_t>(trial) *
                            static_cast<std::uint64_t>(num_users) +
                        static_cast<std::uint64_t>(u));
      const arma::cx_rowvec h = spatial_channel(model, rng);
      const arma::cx_rowvec direction =
          cfg.scheme == Scheme::perfect_cdi
              ? normalize_cdi(h)
              : quantize_spatial(h, trellis).reconstructed;
      p.bf[0] += to_db(beamforming_gain(h, direction));
      true_channels.row(static_cast<arma::uword>(u)) = h;
      quantized.row(static_cast<arma::uword>(u)) = direction;
    }
    const arma::vec sinr_zf =
        sinr_per_user(true_channels, zf_precoders(quantized), rho);
    const arma::vec sinr_mf =
        sinr_per_user(true_channels, mf_precoders(quantized), rho);
    p.se_zf[0] = spectral_efficiency(sinr_zf);
    p.se_mf[0] = spectral_efficiency(sinr_mf);
    if (dump)
      for (int u = 0; u < num_users; ++u) {
        p.sinr_zf[static_cast<std::size_t>(u)] =
            sinr_zf(static_cast<arma::uword>(u));
        p.sinr_mf[static_cast<std::size_t>(u)] =
            sinr_mf(static_cast<arma::uword>(u));
      }
    partials[static_cast<std::size_t>(trial)] = std::move(p);
  });

  if (dump) write_sinr_dump(cfg, partials);
  return reduce_records(cfg, partials, 1);
}

void emit_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << k_csv_header << '\n';
  for (const ResultRecord& r : records)
    out << r.interval << ',' << detail::g9(r.bf_gain_db) << ','
        << detail::g9(r.se_zf) << ',' << detail::g9(r.se_mf) << ',' << r.seed
        << ',' << r.config_hash << '\n';
}

void emit_csv(const std::string& path,
              const std::vector<ResultRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("results csv: cannot write " + path);
  emit_csv(out, records);
  if (!out) throw std::runtime_error("results csv: write failed for " + path);
}

std::vector<ResultRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw parse_error("results csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != k_csv_header)
    throw parse_error("results csv: unexpected header '" + line + "'");

  std::vector<ResultRecord> records;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(
          start, comma == std::string::npos ? comma : comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6)
      throw parse_error("results csv: line " + std::to_string(lineno) +
                        ": expected 6 fields, got " +
                        std::to_string(fields.size()));
    ResultRecord r;
    try {
      std::size_t pos = 0;
      r.interval = std::stoi(fields[0], &pos);
      if (pos != fields[0].size()) throw std::invalid_argument(fields[0]);
      r.bf_gain_db = std::stod(fields[1], &pos);
      if (pos != fields[1].size()) throw std::invalid_argument(fields[1]);
      r.se_zf = std::stod(fields[2], &pos);
      if (pos != fields[2].size()) throw std::invalid_argument(fields[2]);
      r.se_mf = std::stod(fields[3], &pos);
      if (pos != fields[3].size()) throw std::invalid_argument(fields[3]);
      r.seed = std::stoull(fields[4], &pos);
      if (pos != fields[4].size()) throw std::invalid_argument(fields[4]);
    } catch (const std::exception&) {
      throw parse_error("results csv: line " + std::to_string(lineno) +
                        ": malformed numeric field");
    }
    r.config_hash = fields[5];
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<ResultRecord> parse_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("results csv: cannot open " + path);
  return parse_csv(in);
}

int worker_count() {
  if (const char* env = std::getenv("TCQSIM_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1 || v > 4096)
      throw config_error("TCQSIM_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace tcqlf
