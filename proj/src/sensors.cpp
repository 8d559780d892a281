#include "wibench/sensors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>

namespace wibench::sensors {

double parse_w1_slave(std::string_view text) {
  size_t pos = text.rfind("t=");
  if (pos == std::string_view::npos) throw MissingToken("no 't=' token in w1_slave contents");
  std::string digits(text.substr(pos + 2));
  // trim at the first non-numeric character
  size_t end = 0;
  if (end < digits.size() && (digits[end] == '-' || digits[end] == '+')) ++end;
  while (end < digits.size() && std::isdigit(static_cast<unsigned char>(digits[end]))) ++end;
  digits.resize(end);
  if (digits.empty() || digits == "-" || digits == "+")
    throw NumericParseError("no integer after 't='");
  long long milli = std::strtoll(digits.c_str(), nullptr, 10);
  // exact half-away-from-zero to 1 decimal, in integer arithmetic
  long long deci = (2 * milli + (milli >= 0 ? 100 : -100)) / 200;
  return static_cast<double>(deci) / 10.0;
}

double parse_cpu_temp(std::string_view text) {
  std::string_view t = text;
  if (!t.empty() && t.back() == '\n') t.remove_suffix(1);
  constexpr std::string_view prefix = "temp=";
  constexpr std::string_view suffix = "'C";
  if (t.size() <= prefix.size() + suffix.size() || t.substr(0, prefix.size()) != prefix ||
      t.substr(t.size() - suffix.size()) != suffix)
    throw FormatError("expected temp=<value>'C, got: '" + std::string(text) + "'");
  std::string num(t.substr(prefix.size(), t.size() - prefix.size() - suffix.size()));
  char* end = nullptr;
  double v = std::strtod(num.c_str(), &end);
  if (num.empty() || end != num.c_str() + num.size())
    throw FormatError("bad temperature value: '" + num + "'");
  return model::quantize(v, 1);
}

void Ina219Config::validate() const {
  if (shunt_ohms <= 0) throw RangeError("shunt_ohms must be positive");
  if (max_expected_amps <= 0) throw RangeError("max_expected_amps must be positive");
  if (bus_range_volts != 16 && bus_range_volts != 32)
    throw RangeError("bus_range_volts must be 16 or 32");
}

PowerReading ina219_convert(uint16_t raw_bus, int16_t raw_shunt, const Ina219Config& cfg) {
  cfg.validate();
  PowerReading r;
  r.voltage = raw_bus * 0.004;    // 4 mV LSB
  double shunt_v = raw_shunt * 0.00001;  // 10 uV LSB
  r.current = shunt_v / cfg.shunt_ohms;
  if (r.voltage > cfg.bus_range_volts)
    throw RangeError("bus voltage " + std::to_string(r.voltage) + " V exceeds range " +
                     std::to_string(cfg.bus_range_volts) + " V");
  return r;
}

SimDeviceState sim_step(const SimDeviceState& state, double offered_load, double dt_s,
                        const SimParams& p) {
  SimDeviceState s = state;
  s.load_pct = offered_load;
  s.temp_c = state.temp_c +
             dt_s * (p.alpha * offered_load - p.beta * (state.temp_c - state.ambient_c));
  if (s.temp_c >= p.t_throttle) {
    s.throttled = true;
    s.rate_factor = p.gamma;
  } else if (s.temp_c <= p.t_release) {
    s.throttled = false;
    s.rate_factor = 1.0;
  }
  // inside the hysteresis band the previous throttle state persists
  return s;
}

model::ServerSample suite_sample(const SensorSuite& suite, int64_t seq, int64_t t_ms) {
  auto read = [](const char* name, auto&& fn) {
    try {
      return fn();
    } catch (const std::exception& e) {
      throw SensorError(std::string(name) + ": " + e.what());
    }
  };
  model::ServerSample s;
  s.seq = seq;
  s.t_ms = t_ms;
  s.ext_temp = model::quantize(read("temp_ext", suite.read_ext_temp), 1);
  s.cpu_temp = model::quantize(read("temp_cpu", suite.read_cpu_temp), 1);
  s.cpu_load = model::quantize(read("load", suite.read_cpu_load), 1);
  PowerReading p = read("power", suite.read_power);
  s.voltage = model::quantize(p.voltage, 3);
  s.current = model::quantize(p.current, 3);
  s.validate();
  return s;
}

std::function<double()> w1_file_source(std::string path) {
  return [path = std::move(path)]() {
    std::ifstream f(path);
    if (!f) throw SourceUnavailable("cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_w1_slave(ss.str());
  };
}

std::function<double()> cpu_temp_command_source(std::string command) {
  return [command = std::move(command)]() {
    FILE* p = ::popen(command.c_str(), "r");
    if (!p) throw SourceUnavailable("cannot run: " + command);
    std::string out;
    char buf[256];
    size_t n;
    while ((n = ::fread(buf, 1, sizeof(buf), p)) > 0) out.append(buf, n);
    ::pclose(p);
    return parse_cpu_temp(out);
  };
}

std::function<double()> proc_stat_load_source() {
  auto prev = std::make_shared<std::pair<uint64_t, uint64_t>>(0, 0);  // (idle, total)
  return [prev]() {
    std::ifstream f("/proc/stat");
    std::string cpu;
    if (!f || !(f >> cpu) || cpu != "cpu") throw SourceUnavailable("cannot read /proc/stat");
    uint64_t v, total = 0, idle = 0;
    for (int i = 0; f >> v; ++i) {
      total += v;
      if (i == 3 || i == 4) idle += v;  // idle + iowait
    }
    uint64_t d_total = total - prev->second;
    uint64_t d_idle = idle - prev->first;
    *prev = {idle, total};
    if (d_total == 0) return 0.0;
    return 100.0 * (1.0 - static_cast<double>(d_idle) / static_cast<double>(d_total));
  };
}

SimulatedSuite::SimulatedSuite(const Options& opts) : opts_(opts), rng_(opts.seed) {
  state_.temp_c = opts.ambient_c;
  state_.ambient_c = opts.ambient_c;
  state_.rng_seed = opts.seed;
  load_noise_ = noise(1.0);
  ext_noise_ = noise(1.0);
  volt_noise_ = noise(1.0);
  curr_noise_ = noise(1.0);
}

double SimulatedSuite::noise(double amplitude) {
  // top 53 bits -> uniform [0,1); avoids distribution objects so the byte
  // stream is identical across standard library implementations
  double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return (2.0 * u - 1.0) * amplitude;
}

void SimulatedSuite::step() {
  ++tick_;
  bool was = state_.throttled;
  double effective = opts_.offered_load * state_.rate_factor;
  state_ = sim_step(state_, effective, opts_.dt_s, opts_.params);
  if (!was && state_.throttled) throttle_on_.push_back(tick_);
  load_noise_ = noise(1.0);
  ext_noise_ = noise(1.0);
  volt_noise_ = noise(1.0);
  curr_noise_ = noise(1.0);
}

SensorSuite SimulatedSuite::suite() {
  SensorSuite s;
  s.read_ext_temp = [this] { return opts_.ambient_c + opts_.noise_amplitude * ext_noise_; };
  s.read_cpu_temp = [this] { return state_.temp_c; };
  s.read_cpu_load = [this] {
    double eff = opts_.offered_load * state_.rate_factor;
    return std::clamp(eff + opts_.noise_amplitude * load_noise_, 0.0, 100.0);
  };
  s.read_power = [this] {
    double eff = opts_.offered_load * state_.rate_factor;
    PowerReading p;
    p.voltage = 5.0 - 0.0005 * eff + 0.02 * opts_.noise_amplitude * volt_noise_;
    p.current = 0.1 + 0.002 * eff + 0.01 * opts_.noise_amplitude * curr_noise_;
    return p;
  };
  return s;
}

}  // namespace wibench::sensors
