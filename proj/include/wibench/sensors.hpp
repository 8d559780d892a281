#ifndef WIBENCH_SENSORS_HPP_
#define WIBENCH_SENSORS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "wibench/model.hpp"

namespace wibench::sensors {

struct SensorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingToken : SensorError {
  using SensorError::SensorError;
};
struct NumericParseError : SensorError {
  using SensorError::SensorError;
};
struct FormatError : SensorError {
  using SensorError::SensorError;
};
struct RangeError : SensorError {
  using SensorError::SensorError;
};
struct SourceUnavailable : SensorError {
  using SensorError::SensorError;
};

// Ambient temperature from the 1-Wire slave file contents. The reading is the
// integer after the last "t=" token, in millidegrees; result is quantized to
// 1 decimal (half-away-from-zero). Malformed input raises; callers wanting the
// legacy 0.0 sentinel wrap this themselves.
double parse_w1_slave(std::string_view text);

// CPU temperature from "temp=<real>'C" command output.
double parse_cpu_temp(std::string_view text);

struct Ina219Config {
  double shunt_ohms = 0.1;
  double max_expected_amps = 0.2;
  int bus_range_volts = 16;  // 16 or 32

  void validate() const;
};

struct PowerReading {
  double voltage = 0.0;  // volts
  double current = 0.0;  // amperes
};

// Register-level conversion: bus LSB 4 mV, shunt LSB 10 uV, current from the
// shunt drop and the configured shunt resistance. raw_bus is the already
// right-shifted voltage field.
PowerReading ina219_convert(uint16_t raw_bus, int16_t raw_shunt, const Ina219Config& cfg);

// ---------------------------------------------------------------------------
// Thermal / throttle simulator

struct SimParams {
  double alpha = 0.02;       // heating, degC per (second * load-percent)
  double beta = 0.05;        // cooling toward ambient, 1/s
  double t_throttle = 80.0;  // degC, throttle engage
  double t_release = 70.0;   // degC, throttle release
  double gamma = 0.5;        // service-rate multiplier while throttled
};

struct SimDeviceState {
  double temp_c = 25.0;
  double ambient_c = 25.0;
  double load_pct = 0.0;  // offered load last applied
  bool throttled = false;
  double rate_factor = 1.0;
  uint64_t rng_seed = 0;
};

// One Euler step of the thermal model with hysteresis:
// temp' = temp + dt*(alpha*offered_load - beta*(temp - ambient)).
SimDeviceState sim_step(const SimDeviceState& state, double offered_load, double dt_s,
                        const SimParams& params = {});

// ---------------------------------------------------------------------------
// Sensor suite

// Four pluggable sources; each throws a SensorError subtype on failure.
struct SensorSuite {
  std::function<double()> read_ext_temp;
  std::function<double()> read_cpu_temp;
  std::function<double()> read_cpu_load;
  std::function<PowerReading()> read_power;
};

// Reads all five factors for one tick. Per-source failures are rethrown as
// SensorError with the source name prepended; values are never fabricated.
model::ServerSample suite_sample(const SensorSuite& suite, int64_t seq, int64_t t_ms);

// File-backed ambient source (real device: <w1-root>/<device-id>/w1_slave).
std::function<double()> w1_file_source(std::string path);
// Command-output CPU temperature source ("vcgencmd measure_temp" style).
std::function<double()> cpu_temp_command_source(std::string command);
// Interval-averaged CPU load from /proc/stat deltas.
std::function<double()> proc_stat_load_source();

// Deterministic simulated backend. step() advances the thermal model by one
// tick; the returned SensorSuite reads the current state. Seeded noise keeps
// every factor non-constant so correlations stay defined.
class SimulatedSuite {
 public:
  struct Options {
    double ambient_c = 25.0;
    double offered_load = 90.0;  // percent
    double dt_s = 5.0;
    double noise_amplitude = 0.5;
    uint64_t seed = 0;
    SimParams params;
  };

  explicit SimulatedSuite(const Options& opts);

  void step();
  SensorSuite suite();

  const SimDeviceState& state() const { return state_; }
  // Ticks at which throttling engaged (false -> true transitions).
  const std::vector<int64_t>& throttle_on_ticks() const { return throttle_on_; }
  int64_t tick() const { return tick_; }

 private:
  double noise(double amplitude);

  Options opts_;
  SimDeviceState state_;
  std::mt19937_64 rng_;
  int64_t tick_ = 0;
  std::vector<int64_t> throttle_on_;
  double load_noise_ = 0.0;
  double ext_noise_ = 0.0;
  double volt_noise_ = 0.0;
  double curr_noise_ = 0.0;
};

}  // namespace wibench::sensors

#endif
