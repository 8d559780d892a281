// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4 and 5 drive the installed CLI binary end to end.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "wibench/agents.hpp"
#include "wibench/analysis.hpp"
#include "wibench/control.hpp"
#include "wibench/report.hpp"
#include "wibench/sensors.hpp"
#include "wibench/transfer.hpp"

namespace fs = std::filesystem;
using namespace wibench;

namespace {

int g_failures = 0;

void criterion(int num, const std::string& name, const std::function<void()>& body) {
  try {
    body();
    std::cout << "[PASS] criterion " << num << ": " << name << "\n";
  } catch (const std::exception& e) {
    ++g_failures;
    std::cout << "[FAIL] criterion " << num << ": " << name << " -- " << e.what() << "\n";
  }
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

double pearson_direct(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  return (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  require(bool(f), "cannot read " + p.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(WIBENCH_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  return std::system(cmd.c_str());
}

void check_simulation_artifacts(const fs::path& dir) {
  auto cj = model::Journal::read_file((dir / "sim-client.csv").string());
  auto sj = model::Journal::read_file((dir / "sim-server.csv").string());
  require(cj.client_rows.size() >= 95 && cj.client_rows.size() <= 115,
          "client row count " + std::to_string(cj.client_rows.size()) + " outside [95,115]");
  uint64_t sum = 0;
  for (const auto& r : cj.client_rows) sum += r.bytes_delta;
  require(sum == 670720, "sum(bytes_delta) = " + std::to_string(sum) + " != 670720");
  auto table = analysis::align(sj, cj);
  require(table.dropped == 0, "aligned with drops");
  auto matrix = report::matrix_from_json(slurp(dir / "sim-matrix.json"));
  for (size_t i = 0; i < analysis::kFactorCount; ++i) {
    require(matrix.r[i][i].has_value() && *matrix.r[i][i] == 1.0, "diagonal not 1");
    for (size_t j = 0; j < analysis::kFactorCount; ++j) {
      require(matrix.r[i][j].has_value() == matrix.r[j][i].has_value(), "asymmetric defineds");
      if (matrix.r[i][j]) {
        require(*matrix.r[i][j] == *matrix.r[j][i], "asymmetric matrix");
        require(std::fabs(*matrix.r[i][j]) <= 1.0, "|r| > 1");
      }
    }
  }
  require(fs::exists(dir / "sim-report.txt"), "report missing");
}

}  // namespace

int main() {
  fs::path work = fs::temp_directory_path() / "wibench-acceptance";
  fs::remove_all(work);
  fs::create_directories(work);

  criterion(1, "Pearson oracle equivalence", [] {
    std::vector<double> hx{1, 2, 3, 4}, hy{1, 3, 2, 4};
    auto hr = analysis::pearson(hx, hy);
    require(hr && std::fabs(*hr - 0.8) <= 1e-12, "hand-derived case not 0.8");

    auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(12345);
    auto u = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2e6 - 1e6; };
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      size_t n = 2 + rng() % 499;
      std::vector<double> x(n), y(n);
      for (size_t i = 0; i < n; ++i) {
        x[i] = u();
        y[i] = u();
      }
      auto r = analysis::pearson(x, y);
      require(r.has_value(), "unexpected zero variance");
      worst = std::max(worst, std::fabs(*r - pearson_direct(x, y)));
    }
    require(worst <= 1e-9, "max |dr| = " + std::to_string(worst));
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(secs < 5.0, "took " + std::to_string(secs) + " s");
  });

  criterion(2, "parser golden suite", [] {
    auto w1 = [](long long m) {
      return "5f 01 4b 46 7f ff 0c 10 a0 : crc=a0 YES\n5f 01 4b 46 7f ff 0c 10 a0 t=" +
             std::to_string(m) + "\n";
    };
    const std::vector<std::pair<long long, std::string>> golden = {
        {-55000, "-55.0"}, {-30125, "-30.1"}, {-10050, "-10.1"}, {-1250, "-1.3"},
        {-999, "-1.0"},    {-500, "-0.5"},    {-49, "0.0"},      {0, "0.0"},
        {1, "0.0"},        {49, "0.0"},       {50, "0.1"},       {149, "0.1"},
        {150, "0.2"},      {999, "1.0"},      {1049, "1.0"},     {1050, "1.1"},
        {23437, "23.4"},   {25000, "25.0"},   {74951, "75.0"},   {85250, "85.3"},
        {99999, "100.0"},  {125000, "125.0"}};
    for (const auto& [m, want] : golden) {
      std::string got = model::format_fixed(sensors::parse_w1_slave(w1(m)), 1);
      require(got == want, "t=" + std::to_string(m) + " -> " + got + ", want " + want);
    }
    bool threw = false;
    try {
      sensors::parse_w1_slave("5f 01 4b 46 7f ff 0c 10 a0 : crc=a0 YES\n");
    } catch (const sensors::MissingToken&) {
      threw = true;
    }
    require(threw, "missing t= accepted");
    threw = false;
    try {
      sensors::parse_w1_slave("... t=zz");
    } catch (const sensors::NumericParseError&) {
      threw = true;
    }
    require(threw, "non-numeric t= accepted");

    const std::vector<std::pair<std::string, std::string>> cpu_golden = {
        {"temp=47.2'C\n", "47.2"}, {"temp=0.0'C\n", "0.0"},  {"temp=85.0'C\n", "85.0"},
        {"temp=-5.5'C\n", "-5.5"}, {"temp=60.149'C\n", "60.1"}};
    for (const auto& [in, want] : cpu_golden) {
      std::string got = model::format_fixed(sensors::parse_cpu_temp(in), 1);
      require(got == want, "'" + in + "' -> " + got + ", want " + want);
    }
    threw = false;
    try {
      sensors::parse_cpu_temp("temperature 47");
    } catch (const sensors::FormatError&) {
      threw = true;
    }
    require(threw, "malformed cpu temp accepted");
  });

  criterion(3, "INA219 register arithmetic", [] {
    sensors::Ina219Config cfg;
    auto r = sensors::ina219_convert(1253, 3400, cfg);
    require(model::format_fixed(r.voltage, 3) == "5.012", "voltage mismatch");
    require(model::format_fixed(r.current, 3) == "0.340", "current mismatch");
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
      auto raw = static_cast<int16_t>(static_cast<int>(rng() % 16001) - 8000);
      double c1 = sensors::ina219_convert(100, raw, cfg).current;
      double c2 = sensors::ina219_convert(100, static_cast<int16_t>(2 * raw), cfg).current;
      require(std::fabs(c2 - 2.0 * c1) <= 1e-12, "linearity violated");
    }
  });

  const std::string sim_args =
      "simulate --seed 42 --file-size 655KiB --rate 131KiB --interval-ms 50 --run-id sim";
  fs::path dir_a = work / "run-a";
  fs::path dir_b = work / "run-b";

  criterion(4, "end-to-end simulation", [&] {
    auto t0 = std::chrono::steady_clock::now();
    int rc = run_cli(sim_args + " --out-dir " + dir_a.string(), work / "sim-a.log");
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    require(rc == 0, "CLI exit code " + std::to_string(rc));
    require(secs < 10.0, "took " + std::to_string(secs) + " s");
    check_simulation_artifacts(dir_a);
  });

  criterion(5, "determinism of repeated simulation", [&] {
    int rc = run_cli(sim_args + " --out-dir " + dir_b.string(), work / "sim-b.log");
    require(rc == 0, "CLI exit code " + std::to_string(rc));
    for (const char* name :
         {"sim-server.csv", "sim-client.csv", "sim-report.txt", "sim-matrix.json",
          "sim-plot.csv"}) {
      require(slurp(dir_a / name) == slurp(dir_b / name),
              std::string(name) + " differs between runs");
    }
  });

  criterion(6, "handshake conformance", [] {
    require(std::string(control::kDefaultTrigger).size() == 31, "trigger is not 31 bytes");
    control::ControlListener listener(0, control::kDefaultTrigger);
    control::send_start("127.0.0.1", listener.port(), "wrong payload");
    control::StartEvent ev;
    require(!listener.wait_start(std::chrono::milliseconds(150), &ev),
            "wrong payload fired a StartEvent");
    auto t0 = std::chrono::steady_clock::now();
    control::send_start("127.0.0.1", listener.port(), control::kDefaultTrigger);
    require(listener.wait_start(std::chrono::milliseconds(1000), &ev), "no StartEvent");
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    require(ms < 100, "StartEvent latency " + std::to_string(ms) + " ms");
    listener.stop();
  });

  criterion(7, "FTP subset interop", [&] {
    fs::path root = work / "ftp-root";
    fs::create_directories(root);
    for (uint64_t size : {0ull, 1ull, 65535ull, 65536ull, 1048576ull}) {
      std::string name = "f" + std::to_string(size);
      std::string data(size, '\0');
      std::mt19937_64 rng(size);
      for (auto& c : data) c = static_cast<char>(rng());
      std::ofstream(root / name, std::ios::binary).write(data.data(), data.size());

      transfer::StubFtpServer server(root.string());
      transfer::FtpClient client;
      client.connect("127.0.0.1", server.port());
      require(client.size(name) == size, "SIZE mismatch for " + name);
      std::string received;
      transfer::ByteCounter counter;
      uint64_t total = client.retrieve(
          name, [&received](const char* d, size_t n) { received.append(d, n); }, counter);
      client.quit();
      require(total == size && counter.get() == size, "counter conservation for " + name);
      require(received == data, "checksum mismatch for " + name);
    }
    // fault injection at 50%
    transfer::StubFtpServer faulty(root.string(), 0, 1048576 / 2);
    transfer::FtpClient client;
    client.connect("127.0.0.1", faulty.port());
    transfer::ByteCounter counter;
    bool aborted = false;
    try {
      client.retrieve("f1048576", nullptr, counter);
    } catch (const transfer::TransferAborted&) {
      aborted = true;
    }
    require(aborted, "fault did not abort");
    require(counter.get() == 1048576 / 2,
            "counter at " + std::to_string(counter.get()) + ", want 524288");
  });

  criterion(8, "throttle qualitative reproduction", [] {
    agents::SimulateOptions opts;
    opts.seed = 7;
    opts.file_size = 1ULL << 40;
    opts.rate_bps = 134144;
    opts.interval_ms = 5000;
    opts.max_samples = 120;
    opts.ambient_c = 45.0;
    opts.offered_load = 100.0;
    opts.run_id = "throttle";
    auto res = agents::run_simulation(opts);
    require(!res.throttle_on_seqs.empty(), "simulator never throttled");
    auto table = analysis::align(res.server_journal, res.client_journal);
    auto eps = analysis::detect_throttle(table);
    require(!eps.empty(), "no episode detected");
    require(eps[0].start_seq == res.throttle_on_seqs[0],
            "episode start " + std::to_string(eps[0].start_seq) + " != transition " +
                std::to_string(res.throttle_on_seqs[0]));
    // mean speed inside episodes (up to but excluding the recovery row) vs outside
    auto inside = [&eps](int64_t seq) {
      for (const auto& e : eps)
        if (seq >= e.start_seq && seq < e.end_seq) return true;
      return false;
    };
    double sum_in = 0, sum_out = 0;
    int n_in = 0, n_out = 0;
    for (const auto& row : table.rows) {
      if (inside(row.seq)) {
        sum_in += row.factors[0];
        ++n_in;
      } else {
        sum_out += row.factors[0];
        ++n_out;
      }
    }
    require(n_in > 0 && n_out > 0, "degenerate split");
    double ratio = (sum_in / n_in) / (sum_out / n_out);
    require(ratio <= 0.6, "inside/outside speed ratio " + std::to_string(ratio));
  });

  criterion(9, "matrix rendering fidelity", [] {
    analysis::CorrelationMatrix a, b;
    a.labels = analysis::kFactorLabels;
    b.labels = analysis::kFactorLabels;
    for (size_t i = 0; i < analysis::kFactorCount; ++i) {
      a.r[i][i] = 1.0;
      b.r[i][i] = 1.0;
    }
    a.r[1][0] = a.r[0][1] = 0.55;
    b.r[1][0] = b.r[0][1] = 0.38;
    std::string text = report::render_matrix(a, b);
    require(text.find("0.55/0.38") != std::string::npos, "paired cell missing");
    require(text.find("1.00/1.00") != std::string::npos, "paired diagonal missing");
    std::string single = report::render_matrix(a);
    require(single.find("1.00") != std::string::npos, "diagonal missing");
    require(single.find("n/a") != std::string::npos, "undefined cells not rendered as n/a");
  });

  std::cout << (g_failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES: " + std::to_string(g_failures))
            << "\n";
  return g_failures == 0 ? 0 : 1;
}
