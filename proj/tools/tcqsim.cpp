// tcqsim: link-level simulator for trellis-coded limited feedback.
//
// Subcommands:
//   temporal      Gauss-Markov (or trace-driven) fading, per-interval CSV.
//   spatial       correlated single-snapshot fading, one-row CSV.
//   rvq-report    closed-form feedback budget analysis.
//   trace-convert channel traces between binary and CSV form.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 malformed input
// file, 4 runtime failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <tcqlf/channel.hpp>
#include <tcqlf/errors.hpp>
#include <tcqlf/rng.hpp>
#include <tcqlf/rvq.hpp>
#include <tcqlf/sim.hpp>

namespace {

tcqlf::Scheme parse_scheme(const std::string& name) {
  if (name == "perfect_cdi") return tcqlf::Scheme::perfect_cdi;
  if (name == "memoryless_tcq") return tcqlf::Scheme::memoryless_tcq;
  if (name == "differential_tcq") return tcqlf::Scheme::differential_tcq;
  if (name == "spatial_tcq") return tcqlf::Scheme::spatial_tcq;
  throw tcqlf::config_error("unknown scheme '" + name + "'");
}

tcqlf::ConstellationKind parse_constellation(const std::string& name) {
  if (name == "qpsk") return tcqlf::ConstellationKind::qpsk;
  if (name == "8psk") return tcqlf::ConstellationKind::psk8;
  throw tcqlf::config_error("unknown constellation '" + name + "'");
}

tcqlf::ArrayTopology parse_topology(const std::string& name) {
  if (name == "ula") return tcqlf::ArrayTopology::ula;
  if (name == "ura") return tcqlf::ArrayTopology::ura;
  throw tcqlf::config_error("unknown topology '" + name + "'");
}

// Shared option state for the two simulation subcommands.
struct RunArgs {
  tcqlf::ExperimentConfig cfg;
  int ratio = 0;  // --q: antennas per user, exclusive with --K
  std::string scheme;
  std::string constellation = "qpsk";
  std::string topology = "ula";
  std::string out;
};

void add_common_run_options(CLI::App& sub, RunArgs& args) {
  sub.fallthrough();  // lets the top-level --config follow the subcommand
  sub.add_option("--M", args.cfg.num_antennas, "transmit antennas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* users = sub.add_option("--K", args.cfg.num_users, "served users")
                    ->check(CLI::PositiveNumber);
  sub.add_option("--q", args.ratio, "antennas per user (K = M/q)")
      ->check(CLI::PositiveNumber)
      ->excludes(users);
  sub.add_option("--snr-db", args.cfg.rho_db, "transmit SNR in dB")
      ->capture_default_str();
  sub.add_option("--constellation", args.constellation,
                 "per-stage constellation")
      ->check(CLI::IsMember({"qpsk", "8psk"}))
      ->capture_default_str();
  sub.add_option("--trials", args.cfg.trials, "Monte Carlo trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub.add_option("--seed", args.cfg.seed, "master RNG seed")
      ->capture_default_str();
  sub.add_option("--out", args.out, "results CSV path (default: stdout)");
  sub.add_option("--dump-sinr", args.cfg.sinr_dump_path,
                 "write per-sample SINRs (trial,interval,user,...) to this "
                 "CSV for distribution plots");
}

// Applies --q / string enums after parsing; shared by temporal and spatial.
void finalize_run_args(RunArgs& args) {
  if (args.ratio > 0) {
    if (args.cfg.num_antennas % args.ratio != 0)
      throw tcqlf::config_error(
          "--q must divide --M (got M=" +
          std::to_string(args.cfg.num_antennas) + ", q=" +
          std::to_string(args.ratio) + ")");
    args.cfg.num_users = args.cfg.num_antennas / args.ratio;
  }
  args.cfg.scheme = parse_scheme(args.scheme);
  args.cfg.constellation = parse_constellation(args.constellation);
  args.cfg.topology = parse_topology(args.topology);
}

void write_results(const RunArgs& args,
                   const std::vector<tcqlf::ResultRecord>& records) {
  if (args.out.empty())
    tcqlf::emit_csv(std::cout, records);
  else
    tcqlf::emit_csv(args.out, records);
}

int run_temporal(RunArgs& args) {
  finalize_run_args(args);
  if (!args.cfg.trace_path.empty()) args.cfg.channel = tcqlf::ChannelKind::trace;
  write_results(args, tcqlf::run_temporal_experiment(args.cfg));
  return 0;
}

int run_spatial(RunArgs& args) {
  finalize_run_args(args);
  args.cfg.channel = tcqlf::ChannelKind::spatial;
  args.cfg.intervals = 1;
  write_results(args, tcqlf::run_spatial_experiment(args.cfg));
  return 0;
}

struct ReportArgs {
  int num_antennas = 100;
  int num_users = 0;
  int ratio = 0;
  double snr_db = 10.0;
  double z_db = 3.0;
  std::string format = "text";
  std::string out;
  int mc_trials = 0;
  int mc_bits = 4;
};

int run_rvq_report(const ReportArgs& args) {
  int users = args.num_users;
  if (args.ratio > 0) {
    if (args.num_antennas % args.ratio != 0)
      throw tcqlf::config_error("--q must divide --M");
    users = args.num_antennas / args.ratio;
  }
  if (users <= 0)
    throw tcqlf::config_error("rvq-report needs --K or --q");

  const tcqlf::RvqReport report =
      tcqlf::make_rvq_report(args.num_antennas, users, args.snr_db, args.z_db);
  std::string text = args.format == "csv" ? tcqlf::rvq_report_csv(report)
                                          : tcqlf::rvq_report_text(report);
  if (args.mc_trials > 0) {
    if (args.format == "csv")
      throw tcqlf::config_error("--mc-trials is available in text format only");
    std::mt19937_64 rng = tcqlf::make_stream(1, 0);
    const tcqlf::RvqMonteCarlo mc = tcqlf::rvq_monte_carlo(
        args.num_antennas, args.mc_bits, args.mc_trials, rng);
    const double closed_form =
        1.0 - tcqlf::rvq_error_exact(std::exp2(args.mc_bits),
                                     args.num_antennas);
    std::ostringstream os;
    os << text << "mc_bits = " << args.mc_bits << '\n'
       << "mc_trials = " << mc.trials << '\n'
       << "mc_mean_gain = " << mc.mean_gain << '\n'
       << "mc_std_error = " << mc.std_error << '\n'
       << "closed_form_gain = " << closed_form << '\n';
    text = os.str();
  }

  if (args.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.out);
    if (!out) throw std::runtime_error("cannot write " + args.out);
    out << text;
    if (!out) throw std::runtime_error("write failed for " + args.out);
  }
  return 0;
}

// Trace CSV: one record per line, re0,im0,re1,im1,... with 17 significant
// digits so binary -> csv -> binary round-trips bit-exactly.
std::vector<arma::cx_rowvec> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tcqlf::parse_error("trace csv: cannot open " + path);
  std::vector<arma::cx_rowvec> records;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(
          start, comma == std::string::npos ? comma : comma - start);
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != field.size() || field.empty())
        throw tcqlf::parse_error("trace csv: line " + std::to_string(lineno) +
                                 ": malformed value '" + field + "'");
      values.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (values.size() % 2 != 0)
      throw tcqlf::parse_error(
          "trace csv: line " + std::to_string(lineno) +
          ": expected an even number of fields (re,im pairs)");
    if (!records.empty() && values.size() != 2 * records.front().n_elem)
      throw tcqlf::parse_error(
          "trace csv: line " + std::to_string(lineno) + ": expected " +
          std::to_string(2 * records.front().n_elem) + " fields, got " +
          std::to_string(values.size()));
    arma::cx_rowvec rec(values.size() / 2);
    for (arma::uword m = 0; m < rec.n_elem; ++m)
      rec(m) = {values[2 * m], values[2 * m + 1]};
    records.push_back(std::move(rec));
  }
  if (records.empty())
    throw tcqlf::parse_error("trace csv: no records in " + path);
  return records;
}

void write_trace_csv(const std::string& path,
                     const std::vector<arma::cx_rowvec>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("trace csv: cannot write " + path);
  char buf[32];
  for (const arma::cx_rowvec& rec : records) {
    for (arma::uword m = 0; m < rec.n_elem; ++m) {
      if (m) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", rec(m).real());
      out << buf << ',';
      std::snprintf(buf, sizeof buf, "%.17g", rec(m).imag());
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("trace csv: write failed for " + path);
}

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string to;
  int num_antennas = 0;  // optional cross-check
};

int run_trace_convert(const ConvertArgs& args) {
  std::vector<arma::cx_rowvec> records;
  if (args.to == "bin")
    records = read_trace_csv(args.in);
  else
    records = tcqlf::load_channel_trace(args.in);
  if (args.num_antennas > 0 &&
      records.front().n_elem != static_cast<arma::uword>(args.num_antennas))
    throw tcqlf::config_error(
        "trace carries " + std::to_string(records.front().n_elem) +
        " antennas but --M " + std::to_string(args.num_antennas) +
        " was requested");
  if (args.to == "bin")
    tcqlf::save_channel_trace(args.out, records);
  else
    write_trace_csv(args.out, records);
  std::cerr << "wrote " << records.size() << " records ("
            << records.front().n_elem << " antennas) to " << args.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"link-level simulator for trellis-coded limited feedback"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "scenario file with key=value lines under a [temporal], "
                 "[spatial] or [rvq-report] section; flags override it");

  RunArgs temporal_args;
  temporal_args.scheme = "differential_tcq";
  CLI::App* temporal = app.add_subcommand(
      "temporal", "correlated-fading tracking run, one CSV row per interval");
  add_common_run_options(*temporal, temporal_args);
  temporal->add_option("--scheme", temporal_args.scheme, "feedback scheme")
      ->check(CLI::IsMember({"perfect_cdi", "memoryless_tcq",
                             "differential_tcq"}))
      ->capture_default_str();
  temporal->add_option("--intervals", temporal_args.cfg.intervals,
                       "feedback intervals per trial")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  temporal->add_option("--epsilon", temporal_args.cfg.epsilon,
                       "fading coefficient in [0,1]");
  temporal->add_option("--speed-kmh", temporal_args.cfg.speed_kmh,
                       "user speed; fading coefficient derived via the "
                       "Jakes model");
  temporal->add_option("--carrier-hz", temporal_args.cfg.carrier_hz,
                       "carrier frequency")
      ->capture_default_str();
  temporal->add_option("--interval-s", temporal_args.cfg.interval_s,
                       "feedback interval duration")
      ->capture_default_str();
  temporal->add_option("--trace", temporal_args.cfg.trace_path,
                       "binary channel trace replacing the fading model");

  RunArgs spatial_args;
  spatial_args.scheme = "spatial_tcq";
  spatial_args.cfg.num_users = 1;
  spatial_args.cfg.trials = 1000;
  CLI::App* spatial = app.add_subcommand(
      "spatial", "correlated-snapshot run, a single aggregate CSV row");
  add_common_run_options(*spatial, spatial_args);
  spatial->add_option("--scheme", spatial_args.scheme, "feedback scheme")
      ->check(CLI::IsMember({"perfect_cdi", "spatial_tcq"}))
      ->capture_default_str();
  spatial->add_option("--zt", spatial_args.cfg.zt,
                      "transmit correlation coefficient in [0,1]")
      ->capture_default_str();
  spatial->add_option("--topology", spatial_args.topology, "array layout")
      ->check(CLI::IsMember({"ula", "ura"}))
      ->capture_default_str();

  ReportArgs report_args;
  CLI::App* report = app.add_subcommand(
      "rvq-report", "closed-form feedback budget analysis (no simulation)");
  report->fallthrough();
  report->add_option("--M", report_args.num_antennas, "transmit antennas")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  auto* report_users =
      report->add_option("--K", report_args.num_users, "served users")
          ->check(CLI::PositiveNumber);
  report->add_option("--q", report_args.ratio, "antennas per user (K = M/q)")
      ->check(CLI::PositiveNumber)
      ->excludes(report_users);
  report->add_option("--snr-db", report_args.snr_db, "transmit SNR in dB")
      ->capture_default_str();
  report->add_option("--z", report_args.z_db,
                     "tolerated beamforming-gain loss in dB")
      ->capture_default_str();
  report->add_option("--format", report_args.format, "output format")
      ->check(CLI::IsMember({"text", "csv"}))
      ->capture_default_str();
  report->add_option("--out", report_args.out,
                     "report path (default: stdout)");
  report->add_option("--mc-trials", report_args.mc_trials,
                     "append a Monte Carlo cross-check of the quantization "
                     "error (text format, M <= 8)")
      ->check(CLI::NonNegativeNumber);
  report->add_option("--mc-bits", report_args.mc_bits,
                     "codebook bits for the Monte Carlo cross-check")
      ->check(CLI::Range(0, 12))
      ->capture_default_str();

  ConvertArgs convert_args;
  CLI::App* convert = app.add_subcommand(
      "trace-convert", "convert channel traces between binary and CSV");
  convert->add_option("--in", convert_args.in, "input trace")->required();
  convert->add_option("--out", convert_args.out, "output trace")->required();
  convert->add_option("--to", convert_args.to, "target format")
      ->check(CLI::IsMember({"bin", "csv"}))
      ->required();
  convert->add_option("--M", convert_args.num_antennas,
                      "expected antenna count (cross-check)")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
    if (temporal->parsed()) return run_temporal(temporal_args);
    if (spatial->parsed()) return run_spatial(spatial_args);
    if (report->parsed()) return run_rvq_report(report_args);
    if (convert->parsed()) return run_trace_convert(convert_args);
    return 2;  // unreachable: a subcommand is required
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const tcqlf::config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const tcqlf::parse_error& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  }
}
