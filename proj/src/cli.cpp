#include "wibench/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "wibench/agents.hpp"
#include "wibench/analysis.hpp"
#include "wibench/report.hpp"

namespace wibench::cli {

uint64_t parse_size(const std::string& text) {
  size_t pos = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == 0) throw CLI::ValidationError("size", "expected digits in '" + text + "'");
  uint64_t n = std::stoull(text.substr(0, pos));
  std::string suffix = text.substr(pos);
  if (suffix.empty() || suffix == "B") return n;
  if (suffix == "KiB") return n << 10;
  if (suffix == "MiB") return n << 20;
  throw CLI::ValidationError("size", "unknown suffix '" + suffix + "' (use B/KiB/MiB)");
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string analysis_report_text(const analysis::AlignedTable& table,
                                 const analysis::CorrelationMatrix& matrix) {
  std::ostringstream out;
  out << "run: " << table.server_header.run_id;
  if (!table.server_header.device_label.empty())
    out << "  device: " << table.server_header.device_label;
  if (!table.server_header.distance_label.empty())
    out << "  distance: " << table.server_header.distance_label;
  out << "\n";
  out << "rows aligned: " << table.rows.size() << "  dropped: " << table.dropped << "\n\n";
  out << "Pearson correlation (lower triangle)\n";
  out << report::render_matrix(matrix);
  auto episodes = analysis::detect_throttle(table);
  out << "\nthrottle episodes: " << episodes.size() << "\n";
  for (const auto& e : episodes)
    out << "  seq " << e.start_seq << ".." << e.end_seq
        << "  peak_temp=" << model::format_fixed(e.peak_temp, 1)
        << "  load_drop=" << model::format_fixed(e.load_drop, 1) << "\n";
  return out.str();
}

// analyze one or more journal pairs; writes report/matrix/plot files
void do_analyze(const std::vector<std::string>& server_paths,
                const std::vector<std::string>& client_paths, const std::string& out_prefix,
                bool per_trial) {
  if (server_paths.size() != client_paths.size() || server_paths.empty())
    throw std::runtime_error("need matching --server/--client journal lists");
  std::vector<analysis::AlignedTable> tables;
  for (size_t i = 0; i < server_paths.size(); ++i)
    tables.push_back(analysis::align(model::Journal::read_file(server_paths[i]),
                                     model::Journal::read_file(client_paths[i])));

  analysis::CorrelationMatrix matrix;
  analysis::AlignedTable pooled = analysis::pool_tables(tables);
  if (per_trial && tables.size() > 1) {
    matrix = analysis::aggregate_trials(tables).mean_matrix;
  } else {
    matrix = analysis::correlation_matrix(pooled);
  }
  write_text(out_prefix + "-report.txt", analysis_report_text(pooled, matrix));
  write_text(out_prefix + "-matrix.json", report::matrix_to_json(matrix));
  write_text(out_prefix + "-plot.csv", report::plot_csv(pooled));
  std::cout << analysis_report_text(pooled, matrix);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"wibench: throughput benchmark with synchronized device telemetry"};
  app.require_subcommand(1);
  app.set_config("--config")->envname("WIBENCH_CONFIG");

  // ---- serve ----
  auto* serve = app.add_subcommand("serve", "run the server agent (sensor sampling loop)");
  struct {
    std::string run_id = "run", device, distance, out = "server.csv";
    int64_t interval_ms = 5000, max_samples = 100000;
    uint16_t control_port = control::kDefaultPort;
    std::string trigger = control::kDefaultTrigger;
    std::string sensors_kind = "sim";
    std::string w1_file, cpu_temp_cmd = "vcgencmd measure_temp", ina_regs_file;
    double ambient = 25.0, load = 90.0, noise = 0.5;
    uint64_t seed = 0;
    double shunt_ohms = 0.1, max_amps = 0.2;
    bool quiet = false;
  } sv;
  serve->add_option("--run-id", sv.run_id);
  serve->add_option("--device", sv.device, "device label for the journal header");
  serve->add_option("--distance", sv.distance, "distance label for the journal header");
  serve->add_option("--out", sv.out, "journal output path");
  serve->add_option("--interval-ms", sv.interval_ms)->envname("WIBENCH_INTERVAL_MS");
  serve->add_option("--max-samples", sv.max_samples);
  serve->add_option("--control-port", sv.control_port)->envname("WIBENCH_CONTROL_PORT");
  serve->add_option("--trigger", sv.trigger)->envname("WIBENCH_TRIGGER");
  serve->add_option("--sensors", sv.sensors_kind, "sim or real")
      ->check(CLI::IsMember({"sim", "real"}));
  serve->add_option("--w1-file", sv.w1_file, "1-Wire slave file path (real sensors)");
  serve->add_option("--cpu-temp-cmd", sv.cpu_temp_cmd, "command emitting temp=<v>'C");
  serve->add_option("--ina-regs-file", sv.ina_regs_file,
                    "file with '<raw_bus> <raw_shunt>' register pair (real sensors)");
  serve->add_option("--ambient", sv.ambient, "simulated ambient temperature");
  serve->add_option("--load", sv.load, "simulated offered CPU load percent");
  serve->add_option("--noise", sv.noise, "simulated noise amplitude");
  serve->add_option("--seed", sv.seed);
  serve->add_option("--shunt-ohms", sv.shunt_ohms);
  serve->add_option("--max-amps", sv.max_amps);
  serve->add_flag("--quiet", sv.quiet, "suppress per-sample echo");

  // ---- measure ----
  auto* measure = app.add_subcommand("measure", "run the client agent (transfer + sampler)");
  struct {
    std::string run_id = "run", device, distance, out = "client.csv";
    int64_t interval_ms = 5000, max_samples = 100000;
    std::string control_host = "127.0.0.1";
    uint16_t control_port = control::kDefaultPort;
    std::string trigger = control::kDefaultTrigger;
    std::string backend = "ftp", host = "127.0.0.1", path, rate, size;
    uint16_t port = 21;
    std::string user = "anonymous", pass = "anonymous";
    int trials = 1;
    bool quiet = false;
  } me;
  measure->add_option("--run-id", me.run_id);
  measure->add_option("--device", me.device);
  measure->add_option("--distance", me.distance);
  measure->add_option("--out", me.out, "journal output path");
  measure->add_option("--interval-ms", me.interval_ms)->envname("WIBENCH_INTERVAL_MS");
  measure->add_option("--max-samples", me.max_samples);
  measure->add_option("--control-host", me.control_host)->envname("WIBENCH_CONTROL_HOST");
  measure->add_option("--control-port", me.control_port)->envname("WIBENCH_CONTROL_PORT");
  measure->add_option("--trigger", me.trigger)->envname("WIBENCH_TRIGGER");
  measure->add_option("--backend", me.backend)->check(CLI::IsMember({"ftp", "blob"}));
  measure->add_option("--host", me.host, "transfer server host");
  measure->add_option("--port", me.port, "transfer server port");
  measure->add_option("--path", me.path, "remote file path (ftp backend)");
  measure->add_option("--size", me.size, "expected size (blob backend), e.g. 655KiB");
  measure->add_option("--rate", me.rate, "client-side rate limit in bytes/s, e.g. 131KiB");
  measure->add_option("--user", me.user);
  measure->add_option("--pass", me.pass);
  measure->add_option("--trials", me.trials);
  measure->add_flag("--quiet", me.quiet);

  // ---- simulate ----
  auto* simulate = app.add_subcommand(
      "simulate", "hardware-free end-to-end run over loopback, then analyze");
  struct {
    uint64_t seed = 0;
    std::string file_size = "655KiB", rate = "131KiB";
    int64_t interval_ms = 5000, max_samples = 100000;
    double ambient = 25.0, load = 90.0, noise = 0.5;
    double alpha = 0.02, beta = 0.05, gamma = 0.5, t_throttle = 80.0, t_release = 70.0;
    std::string run_id = "sim", out_dir = ".";
    int trials = 1;
  } si;
  simulate->add_option("--seed", si.seed);
  simulate->add_option("--file-size", si.file_size);
  simulate->add_option("--rate", si.rate, "base transfer rate, bytes/s");
  simulate->add_option("--interval-ms", si.interval_ms)->envname("WIBENCH_INTERVAL_MS");
  simulate->add_option("--max-samples", si.max_samples);
  simulate->add_option("--ambient", si.ambient);
  simulate->add_option("--load", si.load);
  simulate->add_option("--noise", si.noise);
  simulate->add_option("--alpha", si.alpha, "thermal heating coefficient");
  simulate->add_option("--beta", si.beta, "thermal cooling coefficient");
  simulate->add_option("--gamma", si.gamma, "throttled service-rate multiplier");
  simulate->add_option("--t-throttle", si.t_throttle);
  simulate->add_option("--t-release", si.t_release);
  simulate->add_option("--run-id", si.run_id);
  simulate->add_option("--out-dir", si.out_dir);
  simulate->add_option("--trials", si.trials);

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "journals -> correlation report");
  struct {
    std::vector<std::string> server, client;
    std::string out_prefix = "analysis";
    bool per_trial = false;
  } an;
  analyze->add_option("--server", an.server, "server journal path(s)")->required();
  analyze->add_option("--client", an.client, "client journal path(s)")->required();
  analyze->add_option("--out-prefix", an.out_prefix);
  analyze->add_flag("--per-trial", an.per_trial,
                    "average per-trial matrices instead of pooling samples");

  // ---- report ----
  auto* rep = app.add_subcommand("report", "render a saved correlation matrix as text");
  struct {
    std::string matrix, matrix_b, out;
  } rp;
  rep->add_option("--matrix", rp.matrix, "matrix JSON from analyze")->required();
  rep->add_option("--matrix-b", rp.matrix_b, "second matrix for paired a/b cells");
  rep->add_option("--out", rp.out, "write rendering here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (serve->parsed()) {
      agents::RunConfig cfg;
      cfg.role = model::Role::Server;
      cfg.run_id = sv.run_id;
      cfg.device_label = sv.device;
      cfg.distance_label = sv.distance;
      cfg.journal_path = sv.out;
      cfg.interval_ms = sv.interval_ms;
      cfg.max_samples = sv.max_samples;
      cfg.control_port = sv.control_port;
      cfg.trigger = sv.trigger;
      cfg.quiet = sv.quiet;

      model::Journal j;
      if (sv.sensors_kind == "sim") {
        sensors::SimulatedSuite::Options so;
        so.ambient_c = sv.ambient;
        so.offered_load = sv.load;
        so.noise_amplitude = sv.noise;
        so.seed = sv.seed;
        so.dt_s = static_cast<double>(sv.interval_ms) / 1000.0;
        sensors::SimulatedSuite sim(so);
        agents::ServerAgentHooks hooks;
        hooks.advance = [&sim] { sim.step(); };
        j = agents::run_server_agent(cfg, sim.suite(), hooks);
      } else {
        if (sv.w1_file.empty() || sv.ina_regs_file.empty())
          throw std::runtime_error("real sensors need --w1-file and --ina-regs-file");
        sensors::SensorSuite suite;
        suite.read_ext_temp = sensors::w1_file_source(sv.w1_file);
        suite.read_cpu_temp = sensors::cpu_temp_command_source(sv.cpu_temp_cmd);
        suite.read_cpu_load = sensors::proc_stat_load_source();
        sensors::Ina219Config ina{sv.shunt_ohms, sv.max_amps, 16};
        std::string regs_file = sv.ina_regs_file;
        suite.read_power = [regs_file, ina] {
          std::ifstream f(regs_file);
          long bus = 0, shunt = 0;
          if (!f || !(f >> bus >> shunt))
            throw sensors::SourceUnavailable("cannot read registers from " + regs_file);
          return sensors::ina219_convert(static_cast<uint16_t>(bus),
                                         static_cast<int16_t>(shunt), ina);
        };
        j = agents::run_server_agent(cfg, suite);
      }
      if (j.aborted_reason) {
        std::cerr << "run aborted: " << *j.aborted_reason << "\n";
        return 2;
      }
      return 0;
    }

    if (measure->parsed()) {
      agents::RunConfig cfg;
      cfg.role = model::Role::Client;
      cfg.device_label = me.device;
      cfg.distance_label = me.distance;
      cfg.interval_ms = me.interval_ms;
      cfg.max_samples = me.max_samples;
      cfg.control_host = me.control_host;
      cfg.control_port = me.control_port;
      cfg.trigger = me.trigger;
      cfg.backend = me.backend == "ftp" ? agents::TransferBackend::Ftp
                                        : agents::TransferBackend::Blob;
      cfg.transfer_host = me.host;
      cfg.transfer_port = me.port;
      cfg.remote_path = me.path;
      cfg.ftp_user = me.user;
      cfg.ftp_pass = me.pass;
      cfg.quiet = me.quiet;
      if (!me.size.empty()) cfg.expected_size = parse_size(me.size);
      if (!me.rate.empty()) cfg.rate_limit_bps = static_cast<double>(parse_size(me.rate));
      cfg.trials = me.trials;

      bool any_abort = false;
      for (int t = 0; t < me.trials; ++t) {
        agents::RunConfig trial = cfg;
        if (me.trials > 1) {
          trial.run_id = me.run_id + "-t" + std::to_string(t);
          trial.journal_path = me.out + ".t" + std::to_string(t);
        } else {
          trial.run_id = me.run_id;
          trial.journal_path = me.out;
        }
        model::Journal j = agents::run_client_agent(trial);
        if (j.aborted_reason) {
          std::cerr << "trial " << t << " aborted: " << *j.aborted_reason << "\n";
          any_abort = true;
        }
      }
      return any_abort ? 2 : 0;
    }

    if (simulate->parsed()) {
      agents::SimulateOptions opts;
      opts.seed = si.seed;
      opts.file_size = parse_size(si.file_size);
      opts.rate_bps = static_cast<double>(parse_size(si.rate));
      opts.interval_ms = si.interval_ms;
      opts.max_samples = si.max_samples;
      opts.ambient_c = si.ambient;
      opts.offered_load = si.load;
      opts.noise_amplitude = si.noise;
      opts.sim_params = {si.alpha, si.beta, si.t_throttle, si.t_release, si.gamma};
      opts.run_id = si.run_id;

      std::filesystem::create_directories(si.out_dir);
      if (si.trials == 1) {
        agents::SimulationResult r = agents::run_simulation(opts);
        std::string sp = si.out_dir + "/" + si.run_id + "-server.csv";
        std::string cp = si.out_dir + "/" + si.run_id + "-client.csv";
        r.server_journal.write_file(sp);
        r.client_journal.write_file(cp);
        do_analyze({sp}, {cp}, si.out_dir + "/" + si.run_id, false);
      } else {
        auto outcomes = agents::run_trials(opts, si.trials, si.out_dir);
        std::vector<std::string> sps, cps;
        for (const auto& o : outcomes) {
          if (o.ok) {
            sps.push_back(o.server_path);
            cps.push_back(o.client_path);
          } else {
            std::cerr << "trial failed: " << o.error << "\n";
          }
        }
        if (sps.empty()) throw std::runtime_error("all trials failed");
        do_analyze(sps, cps, si.out_dir + "/" + si.run_id, true);
      }
      return 0;
    }

    if (analyze->parsed()) {
      do_analyze(an.server, an.client, an.out_prefix, an.per_trial);
      return 0;
    }

    if (rep->parsed()) {
      analysis::CorrelationMatrix a = report::matrix_from_json(read_text(rp.matrix));
      std::optional<analysis::CorrelationMatrix> b;
      if (!rp.matrix_b.empty()) b = report::matrix_from_json(read_text(rp.matrix_b));
      std::string text = report::render_matrix(a, b);
      if (rp.out.empty())
        std::cout << text;
      else
        write_text(rp.out, text);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace wibench::cli
