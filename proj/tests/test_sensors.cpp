#include <doctest.h>

#include <cmath>

#include "wibench/sensors.hpp"

using namespace wibench::sensors;
namespace model = wibench::model;

namespace {

std::string w1_text(long long milli) {
  return "5f 01 4b 46 7f ff 0c 10 a0 : crc=a0 YES\n"
         "5f 01 4b 46 7f ff 0c 10 a0 t=" +
         std::to_string(milli) + "\n";
}

}  // namespace

TEST_CASE("parse_w1_slave reference values") {
  CHECK(parse_w1_slave(w1_text(23437)) == doctest::Approx(23.4));
  CHECK(parse_w1_slave(w1_text(0)) == 0.0);
  CHECK(parse_w1_slave(w1_text(-1250)) == doctest::Approx(-1.3));
  CHECK(parse_w1_slave(w1_text(125000)) == doctest::Approx(125.0));
  CHECK(parse_w1_slave(w1_text(-55000)) == doctest::Approx(-55.0));
}

TEST_CASE("parse_w1_slave malformed input") {
  CHECK_THROWS_AS(parse_w1_slave("5f 01 4b 46 7f ff 0c 10 a0 : crc=a0 YES\n"), MissingToken);
  CHECK_THROWS_AS(parse_w1_slave("... t=xyz"), NumericParseError);
  CHECK_THROWS_AS(parse_w1_slave(""), MissingToken);
}

TEST_CASE("parse_w1_slave matches rounding oracle over the DS18B20 range") {
  // independent oracle: llround is half-away-from-zero by definition
  for (long long m = -55000; m <= 125000; m += 37) {
    double got = parse_w1_slave(w1_text(m));
    double want = static_cast<double>(std::llround(static_cast<double>(m) / 100.0)) / 10.0;
    CHECK(got == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("parse_cpu_temp strips prefix and suffix") {
  CHECK(parse_cpu_temp("temp=47.2'C\n") == doctest::Approx(47.2));
  CHECK(parse_cpu_temp("temp=0.0'C\n") == 0.0);
  CHECK(parse_cpu_temp("temp=60.1'C") == doctest::Approx(60.1));
}

TEST_CASE("parse_cpu_temp rejects deviations") {
  CHECK_THROWS_AS(parse_cpu_temp("temperature 47"), FormatError);
  CHECK_THROWS_AS(parse_cpu_temp("temp='C\n"), FormatError);
  CHECK_THROWS_AS(parse_cpu_temp(""), FormatError);
}

TEST_CASE("ina219_convert reference arithmetic") {
  Ina219Config cfg;  // 0.1 ohm shunt, 16 V range
  auto r = ina219_convert(1253, 3400, cfg);
  CHECK(model::format_fixed(r.voltage, 3) == "5.012");
  CHECK(model::format_fixed(r.current, 3) == "0.340");

  auto z = ina219_convert(0, 0, cfg);
  CHECK(z.voltage == 0.0);
  CHECK(z.current == 0.0);

  auto neg = ina219_convert(1253, -500, cfg);
  CHECK(model::format_fixed(neg.current, 3) == "-0.050");
}

TEST_CASE("ina219_convert rejects out-of-range bus voltage") {
  Ina219Config cfg;
  CHECK_THROWS_AS(ina219_convert(4100, 0, cfg), RangeError);  // 16.4 V on a 16 V range
}

TEST_CASE("ina219_convert is linear in the shunt register") {
  Ina219Config cfg;
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    auto raw = static_cast<int16_t>(rng() % 16001 - 8000);
    double c1 = ina219_convert(100, raw, cfg).current;
    if (std::abs(raw) <= 16383 / 2) {
      double c2 = ina219_convert(100, static_cast<int16_t>(raw * 2), cfg).current;
      CHECK(c2 == doctest::Approx(2.0 * c1).epsilon(1e-12));
    }
  }
}

TEST_CASE("sim_step equilibrium at zero load") {
  SimDeviceState s;
  s.temp_c = 25.0;
  s.ambient_c = 25.0;
  auto s2 = sim_step(s, 0.0, 5.0);
  CHECK(s2.temp_c == 25.0);
  CHECK_FALSE(s2.throttled);
}

TEST_CASE("sim_step reference update") {
  SimDeviceState s;
  s.temp_c = 79.9;
  s.ambient_c = 25.0;
  auto s2 = sim_step(s, 100.0, 5.0);
  CHECK(s2.temp_c == doctest::Approx(76.175));
  CHECK_FALSE(s2.throttled);
}

TEST_CASE("sim_step throttles above threshold") {
  SimDeviceState s;
  s.temp_c = 85.0;
  s.ambient_c = 25.0;
  auto s2 = sim_step(s, 100.0, 1.0);
  CHECK(s2.throttled);
  CHECK(s2.rate_factor == 0.5);
}

TEST_CASE("sim_step converges to ambient plus alpha/beta times load") {
  SimDeviceState s;
  s.temp_c = 25.0;
  s.ambient_c = 25.0;
  double prev = s.temp_c;
  for (int i = 0; i < 200; ++i) {
    s = sim_step(s, 100.0, 5.0, SimParams{0.02, 0.05, 1000.0, -1000.0, 0.5});
    CHECK(s.temp_c >= prev);  // monotone approach from below
    prev = s.temp_c;
  }
  CHECK(std::fabs(s.temp_c - 65.0) < 0.65);  // within 1% of ambient + 40
}

TEST_CASE("throttle hysteresis holds inside the band") {
  SimDeviceState s;
  s.temp_c = 75.0;  // between release (70) and throttle (80)
  s.ambient_c = 25.0;
  s.throttled = true;
  s.rate_factor = 0.5;
  for (int i = 0; i < 10; ++i) {
    s = sim_step(s, 50.0, 1.0);
    if (s.temp_c > 70.0 && s.temp_c < 80.0) CHECK(s.throttled);
  }
}

TEST_CASE("suite_sample composes a deterministic sample") {
  SimulatedSuite::Options o;
  o.offered_load = 37.5;
  o.noise_amplitude = 0.0;
  SimulatedSuite sim(o);
  auto s = suite_sample(sim.suite(), 0, 0);
  CHECK(s.cpu_load == 37.5);  // simulator echoes configured offered load
  CHECK(s.ext_temp == 25.0);
  CHECK(s.cpu_temp == 25.0);
  CHECK(s.voltage > 0.0);
}

TEST_CASE("suite_sample surfaces the failing source by name") {
  SimulatedSuite::Options o;
  SimulatedSuite sim(o);
  auto suite = sim.suite();
  suite.read_ext_temp = []() -> double { throw SourceUnavailable("sensor unplugged"); };
  try {
    suite_sample(suite, 0, 0);
    FAIL("expected SensorError");
  } catch (const SensorError& e) {
    CHECK(std::string(e.what()).find("temp_ext") != std::string::npos);
  }
}

TEST_CASE("suite_sample stamps the logical clock") {
  SimulatedSuite::Options o;
  SimulatedSuite sim(o);
  auto s0 = suite_sample(sim.suite(), 0, 0);
  sim.step();
  auto s1 = suite_sample(sim.suite(), 1, 5000);
  CHECK(s1.t_ms - s0.t_ms == 5000);
}

TEST_CASE("saturated simulated load reads 100") {
  SimulatedSuite::Options o;
  o.offered_load = 100.0;
  o.noise_amplitude = 0.0;
  SimulatedSuite sim(o);
  CHECK(suite_sample(sim.suite(), 0, 0).cpu_load == 100.0);
  o.offered_load = 0.0;
  SimulatedSuite idle(o);
  CHECK(suite_sample(idle.suite(), 0, 0).cpu_load == 0.0);
}
