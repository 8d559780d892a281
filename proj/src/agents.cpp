#include "wibench/agents.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <thread>

namespace wibench::agents {

void RunConfig::validate() const {
  if (interval_ms < 10) throw AgentError("interval_ms must be >= 10");
  if (max_samples < 1) throw AgentError("max_samples must be >= 1");
  if (trials < 1) throw AgentError("trials must be >= 1");
  if (run_id.empty()) throw AgentError("run_id must be non-empty");
}

double sample_speed(uint64_t prev_total, uint64_t cur_total, double interval_s) {
  if (cur_total < prev_total) throw AgentError("byte counter went backwards");
  if (interval_s <= 0) throw AgentError("interval must be positive");
  return static_cast<double>(cur_total - prev_total) / interval_s;
}

namespace {

model::RunHeader make_header(const RunConfig& cfg, model::Role role) {
  model::RunHeader h;
  h.run_id = cfg.run_id;
  h.role = role;
  h.interval_ms = cfg.interval_ms;
  h.device_label = cfg.device_label;
  h.distance_label = cfg.distance_label;
  return h;
}

model::ClientSample make_client_sample(int64_t seq, int64_t interval_ms, uint64_t prev,
                                       uint64_t cur, uint64_t total_size) {
  model::ClientSample s;
  s.seq = seq;
  s.t_ms = seq * interval_ms;
  s.bytes_total = cur;
  s.bytes_delta = cur - prev;
  s.speed_bps = sample_speed(prev, cur, static_cast<double>(interval_ms) / 1000.0);
  if (total_size == 0)
    s.pct_complete = 100.0;
  else
    s.pct_complete = model::quantize(100.0 * static_cast<double>(cur) /
                                     static_cast<double>(total_size), 1);
  return s;
}

}  // namespace

model::Journal run_server_agent(const RunConfig& cfg, const sensors::SensorSuite& suite,
                                const ServerAgentHooks& hooks, std::atomic<bool>* stop) {
  cfg.validate();
  if (cfg.role != model::Role::Server) throw AgentError("run_server_agent needs role=server");

  model::Journal journal;
  journal.header = make_header(cfg, model::Role::Server);

  control::ControlListener listener(cfg.control_port, cfg.trigger);
  while (!listener.wait_start(std::chrono::milliseconds(100))) {
    if (stop && stop->load()) return journal;  // cancelled before the trigger
  }

  std::ostream* echo = hooks.echo ? hooks.echo : (cfg.quiet ? nullptr : &std::cout);
  auto anchor = std::chrono::steady_clock::now();
  for (int64_t k = 0; k < cfg.max_samples; ++k) {
    if (k > 0) {
      if (hooks.advance) hooks.advance();
      std::this_thread::sleep_until(anchor + std::chrono::milliseconds(k * cfg.interval_ms));
    }
    model::ServerSample s;
    try {
      s = sensors::suite_sample(suite, k, k * cfg.interval_ms);
    } catch (const sensors::SensorError& e) {
      journal.aborted_reason = e.what();
      break;
    }
    journal.append(s);
    if (echo) *echo << model::encode_row(s) << "\n";
    if (stop && stop->load()) break;
    if (listener.done_received()) break;
  }
  listener.stop();
  if (!cfg.journal_path.empty()) journal.write_file(cfg.journal_path);
  return journal;
}

model::Journal run_client_agent(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.role != model::Role::Client) throw AgentError("run_client_agent needs role=client");

  model::Journal journal;
  journal.header = make_header(cfg, model::Role::Client);

  transfer::ByteCounter counter;
  uint64_t remote_size = 0;
  std::thread worker;
  std::atomic<bool> transfer_done{false};
  std::string transfer_error;
  std::mutex err_mu;

  auto record_error = [&](const std::string& msg) {
    std::lock_guard<std::mutex> lk(err_mu);
    if (transfer_error.empty()) transfer_error = msg;
  };

  if (cfg.backend == TransferBackend::Ftp) {
    auto ftp = std::make_shared<transfer::FtpClient>();
    ftp->connect(cfg.transfer_host, cfg.transfer_port, cfg.ftp_user, cfg.ftp_pass);
    remote_size = ftp->size(cfg.remote_path);
    journal.header.file_size_bytes = remote_size;
    control::send_start(cfg.control_host, cfg.control_port, cfg.trigger);
    worker = std::thread([&, ftp] {
      try {
        ftp->retrieve(cfg.remote_path, nullptr, counter);
        ftp->quit();
      } catch (const std::exception& e) {
        record_error(e.what());
      }
      transfer_done.store(true);
    });
  } else {
    auto conn = std::make_shared<transfer::BlobConnection>(cfg.transfer_host, cfg.transfer_port);
    remote_size = conn->announced_size();
    if (cfg.expected_size != 0 && remote_size != cfg.expected_size) {
      throw transfer::SizeMismatch("server announces " + std::to_string(remote_size) +
                                   " bytes, expected " + std::to_string(cfg.expected_size));
    }
    journal.header.file_size_bytes = remote_size;
    control::send_start(cfg.control_host, cfg.control_port, cfg.trigger);
    worker = std::thread([&, conn] {
      try {
        auto start = std::chrono::steady_clock::now();
        uint64_t total = 0;
        while (total < remote_size) {
          uint64_t chunk = std::min<uint64_t>(transfer::kMaxChunk, remote_size - total);
          uint64_t got = conn->pull(chunk, counter);
          if (got == 0) throw transfer::TransferAborted("blob stream ended early");
          total += got;
          if (cfg.rate_limit_bps && *cfg.rate_limit_bps > 0) {
            auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                   std::chrono::duration<double>(
                                       static_cast<double>(total) / *cfg.rate_limit_bps));
            std::this_thread::sleep_until(due);
          }
        }
      } catch (const std::exception& e) {
        record_error(e.what());
      }
      transfer_done.store(true);
    });
  }

  // sampler owns the journal; one row per logical tick
  auto anchor = std::chrono::steady_clock::now();
  uint64_t prev = 0;
  for (int64_t k = 0; k < cfg.max_samples; ++k) {
    if (k > 0)
      std::this_thread::sleep_until(anchor + std::chrono::milliseconds(k * cfg.interval_ms));
    uint64_t snap = transfer::progress_snapshot(counter);
    journal.append(make_client_sample(k, cfg.interval_ms, prev, snap, remote_size));
    if (!cfg.quiet) std::cout << model::encode_row(journal.client_rows.back()) << "\n";
    prev = snap;
    if (snap == remote_size) break;
    if (transfer_done.load()) {
      // transfer stopped short; take one final snapshot row next loop if it
      // grew, otherwise record the abort
      uint64_t last = transfer::progress_snapshot(counter);
      if (last == remote_size) continue;
      std::lock_guard<std::mutex> lk(err_mu);
      journal.aborted_reason = transfer_error.empty() ? "transfer stopped short" : transfer_error;
      break;
    }
  }
  worker.join();
  {
    std::lock_guard<std::mutex> lk(err_mu);
    if (!transfer_error.empty() && !journal.aborted_reason)
      journal.aborted_reason = transfer_error;
  }
  if (cfg.send_done) {
    try {
      control::send_start(cfg.control_host, cfg.control_port, control::kDoneMessage);
    } catch (const net::NetError&) {
      // server may already be gone; the journal is still valid
    }
  }
  if (!cfg.journal_path.empty()) journal.write_file(cfg.journal_path);
  return journal;
}

// ---------------------------------------------------------------------------
// Deterministic simulation

namespace {

transfer::BlobGenerator pattern_generator(uint64_t seed) {
  return [seed](uint64_t off) {
    uint64_t v = (off * 2654435761ULL) ^ (seed * 0x9E3779B97F4A7C15ULL);
    return static_cast<char>(v >> 17);
  };
}

}  // namespace

SimulationResult run_simulation(const SimulateOptions& opts) {
  const double dt_s = static_cast<double>(opts.interval_ms) / 1000.0;

  transfer::BlobServer blob(opts.file_size, pattern_generator(opts.seed));
  control::ControlListener ctl(opts.control_port, control::kDefaultTrigger);

  sensors::SimulatedSuite::Options sim_opts;
  sim_opts.ambient_c = opts.ambient_c;
  sim_opts.offered_load = opts.offered_load;
  sim_opts.dt_s = dt_s;
  sim_opts.noise_amplitude = opts.noise_amplitude;
  sim_opts.seed = opts.seed;
  sim_opts.params = opts.sim_params;
  sensors::SimulatedSuite sim(sim_opts);
  sensors::SensorSuite suite = sim.suite();

  transfer::BlobConnection conn("127.0.0.1", blob.port());
  if (conn.announced_size() != opts.file_size)
    throw transfer::SizeMismatch("blob size mismatch");

  control::send_start("127.0.0.1", ctl.port(), control::kDefaultTrigger);
  control::StartEvent ev;
  if (!ctl.wait_start(std::chrono::milliseconds(2000), &ev))
    throw AgentError("start handshake did not complete");

  SimulationResult res;
  auto& sj = res.server_journal;
  auto& cj = res.client_journal;
  sj.header = {opts.run_id, model::Role::Server, opts.interval_ms, opts.device_label,
               opts.distance_label, std::nullopt};
  cj.header = {opts.run_id, model::Role::Client, opts.interval_ms, opts.device_label,
               opts.distance_label, opts.file_size};

  transfer::ByteCounter counter;
  // accumulated transfer budget in millibytes; integer so replay is exact
  int64_t budget_mb = 0;
  uint64_t prev = 0;
  for (int64_t k = 0; k < opts.max_samples; ++k) {
    if (k > 0) {
      sim.step();
      budget_mb += std::llround(opts.rate_bps * static_cast<double>(opts.interval_ms) *
                                sim.state().rate_factor);
      uint64_t target = std::min<uint64_t>(static_cast<uint64_t>(budget_mb / 1000),
                                           opts.file_size);
      uint64_t have = counter.get();
      if (target > have) {
        uint64_t got = conn.pull(target - have, counter);
        if (got != target - have) throw transfer::TransferAborted("blob stream ended early");
      }
    }
    sj.append(sensors::suite_sample(suite, k, k * opts.interval_ms));
    uint64_t snap = counter.get();
    cj.append(make_client_sample(k, opts.interval_ms, prev, snap, opts.file_size));
    prev = snap;
    if (snap == opts.file_size) break;
  }
  conn.close();

  control::send_start("127.0.0.1", ctl.port(), control::kDoneMessage);
  ctl.wait_done(std::chrono::milliseconds(1000));
  ctl.stop();
  blob.stop();

  res.throttle_on_seqs = sim.throttle_on_ticks();
  return res;
}

std::vector<TrialOutcome> run_trials(const SimulateOptions& base, int trials,
                                     const std::string& out_dir) {
  if (trials < 1) throw AgentError("trials must be >= 1");
  std::filesystem::create_directories(out_dir);
  std::vector<TrialOutcome> outcomes;
  for (int k = 0; k < trials; ++k) {
    SimulateOptions opts = base;
    opts.run_id = base.run_id + "-t" + std::to_string(k);
    opts.seed = base.seed + static_cast<uint64_t>(k);
    TrialOutcome out;
    out.server_path = out_dir + "/" + opts.run_id + "-server.csv";
    out.client_path = out_dir + "/" + opts.run_id + "-client.csv";
    try {
      SimulationResult r = run_simulation(opts);
      r.server_journal.write_file(out.server_path);
      r.client_journal.write_file(out.client_path);
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = e.what();
    }
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

}  // namespace wibench::agents
