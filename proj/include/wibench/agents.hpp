#ifndef WIBENCH_AGENTS_HPP_
#define WIBENCH_AGENTS_HPP_

#include <atomic>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wibench/control.hpp"
#include "wibench/model.hpp"
#include "wibench/sensors.hpp"
#include "wibench/transfer.hpp"

namespace wibench::agents {

struct AgentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TransferBackend { Ftp, Blob };

struct RunConfig {
  model::Role role = model::Role::Server;
  int64_t interval_ms = 5000;
  int64_t max_samples = 100000;
  int trials = 10;

  std::string run_id = "run";
  std::string device_label;
  std::string distance_label;
  std::string journal_path;

  // control channel
  std::string control_host = "127.0.0.1";
  uint16_t control_port = control::kDefaultPort;
  std::string trigger = control::kDefaultTrigger;
  bool send_done = true;

  // transfer (client role)
  TransferBackend backend = TransferBackend::Blob;
  std::string transfer_host = "127.0.0.1";
  uint16_t transfer_port = 0;
  std::string remote_path;              // ftp
  uint64_t expected_size = 0;           // blob
  std::optional<double> rate_limit_bps;
  std::string ftp_user = "anonymous";
  std::string ftp_pass = "anonymous";

  bool quiet = false;

  void validate() const;
};

// speed = bytes gained / interval
double sample_speed(uint64_t prev_total, uint64_t cur_total, double interval_s);

struct ServerAgentHooks {
  std::function<void()> advance;  // invoked once between ticks (simulator step)
  std::ostream* echo = nullptr;   // per-sample echo; defaults to std::cout unless quiet
};

// Blocks in the start handshake, then samples the suite every interval_ms
// (logical timestamps, wall-clock pacing). Stops on max_samples, the stop
// flag, or a client `done` message. Sensor failures abort the run and are
// recorded in the journal trailer.
model::Journal run_server_agent(const RunConfig& cfg, const sensors::SensorSuite& suite,
                                const ServerAgentHooks& hooks = {},
                                std::atomic<bool>* stop = nullptr);

// Obtains the remote size, fires the start trigger, then runs the transfer
// and the speed sampler concurrently until the byte counter reaches the
// remote size. Transfer failures leave an aborted trailer in the journal.
model::Journal run_client_agent(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// Hardware-free end-to-end run: loopback handshake, loopback blob transfer,
// simulated sensor suite, both journals produced by one deterministic
// tick-synchronous loop.

struct SimulateOptions {
  uint64_t seed = 0;
  uint64_t file_size = 670720;   // bytes
  double rate_bps = 134144.0;    // base transfer rate before throttling
  int64_t interval_ms = 5000;
  int64_t max_samples = 100000;
  double ambient_c = 25.0;
  double offered_load = 90.0;    // percent
  double noise_amplitude = 0.5;
  sensors::SimParams sim_params;
  std::string run_id = "sim";
  std::string device_label = "simulated";
  std::string distance_label = "loopback";
  uint16_t control_port = 0;     // 0 = ephemeral
};

struct SimulationResult {
  model::Journal server_journal;
  model::Journal client_journal;
  // ground truth: ticks at which the simulator engaged throttling
  std::vector<int64_t> throttle_on_seqs;
};

SimulationResult run_simulation(const SimulateOptions& opts);

struct TrialOutcome {
  std::string server_path;
  std::string client_path;
  bool ok = false;
  std::string error;
};

// Repeats the simulated handshake-measure cycle, one journal pair per trial,
// run ids suffixed "-t<k>". A failing trial is recorded and the rest continue.
std::vector<TrialOutcome> run_trials(const SimulateOptions& base, int trials,
                                     const std::string& out_dir);

}  // namespace wibench::agents

#endif
