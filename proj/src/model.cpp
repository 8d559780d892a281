#include "wibench/model.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace wibench::model {

long long scale_half_away(double value, int decimals) {
  double p = std::pow(10.0, decimals);
  double s = value * p;
  return static_cast<long long>(s >= 0 ? std::floor(s + 0.5) : std::ceil(s - 0.5));
}

double quantize(double value, int decimals) {
  return static_cast<double>(scale_half_away(value, decimals)) / std::pow(10.0, decimals);
}

std::string format_fixed(double value, int decimals) {
  long long n = scale_half_away(value, decimals);
  if (decimals == 0) return std::to_string(n);
  long long p = 1;
  for (int i = 0; i < decimals; ++i) p *= 10;
  long long whole = n / p;
  long long frac = std::llabs(n % p);
  std::string out;
  if (n < 0 && whole == 0) out += '-';
  out += std::to_string(whole);
  out += '.';
  std::string f = std::to_string(frac);
  out.append(static_cast<size_t>(decimals) - f.size(), '0');
  out += f;
  return out;
}

std::string to_string(Role r) { return r == Role::Server ? "server" : "client"; }

Role role_from_string(const std::string& s) {
  if (s == "server") return Role::Server;
  if (s == "client") return Role::Client;
  throw InvariantViolation("unknown role: " + s);
}

void ServerSample::validate() const {
  if (seq < 0) throw InvariantViolation("seq must be non-negative");
  if (cpu_load < 0.0 || cpu_load > 100.0) throw InvariantViolation("cpu_load outside [0,100]");
  if (voltage < 0.0) throw InvariantViolation("voltage must be non-negative");
  if (std::fabs(current) > 10.0) throw InvariantViolation("|current| exceeds 10 A sanity bound");
}

void ClientSample::validate() const {
  if (seq < 0) throw InvariantViolation("seq must be non-negative");
  if (pct_complete < 0.0 || pct_complete > 100.0) throw InvariantViolation("pct_complete outside [0,100]");
}

void RunHeader::validate() const {
  if (run_id.empty()) throw InvariantViolation("run_id must be non-empty");
  if (interval_ms <= 0) throw InvariantViolation("interval_ms must be positive");
  for (const std::string* s : {&run_id, &device_label, &distance_label})
    if (s->find(';') != std::string::npos || s->find('\n') != std::string::npos)
      throw InvariantViolation("header fields must not contain ';' or newlines");
}

std::string RunHeader::encode() const {
  validate();
  std::string out = "# run_id=" + run_id + ";role=" + to_string(role) +
                    ";interval_ms=" + std::to_string(interval_ms) + ";device=" + device_label +
                    ";distance=" + distance_label;
  if (file_size_bytes) out += ";file_size=" + std::to_string(*file_size_bytes);
  return out;
}

RunHeader RunHeader::decode(const std::string& line) {
  if (line.rfind("# ", 0) != 0) throw InvariantViolation("journal header must start with '# '");
  RunHeader h;
  std::stringstream ss(line.substr(2));
  std::string kv;
  bool role_seen = false;
  while (std::getline(ss, kv, ';')) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvariantViolation("malformed header entry: " + kv);
    std::string key = kv.substr(0, eq), val = kv.substr(eq + 1);
    if (key == "run_id") h.run_id = val;
    else if (key == "role") { h.role = role_from_string(val); role_seen = true; }
    else if (key == "interval_ms") h.interval_ms = std::stoll(val);
    else if (key == "device") h.device_label = val;
    else if (key == "distance") h.distance_label = val;
    else if (key == "file_size") h.file_size_bytes = std::stoull(val);
    else throw InvariantViolation("unknown header key: " + key);
  }
  if (!role_seen) throw InvariantViolation("header missing role");
  h.validate();
  return h;
}

std::string column_header(Role role) {
  return role == Role::Server ? "seq,t_ms,cpu_load,cpu_temp,ext_temp,voltage,current"
                              : "seq,t_ms,bytes_total,bytes_delta,speed_bps,pct_complete";
}

std::string encode_row(const ServerSample& s) {
  s.validate();
  std::string out = std::to_string(s.seq) + "," + std::to_string(s.t_ms) + "," +
                    format_fixed(s.cpu_load, 1) + "," + format_fixed(s.cpu_temp, 1) + "," +
                    format_fixed(s.ext_temp, 1) + "," + format_fixed(s.voltage, 3) + "," +
                    format_fixed(s.current, 3);
  return out;
}

std::string encode_row(const ClientSample& s) {
  s.validate();
  return std::to_string(s.seq) + "," + std::to_string(s.t_ms) + "," +
         std::to_string(s.bytes_total) + "," + std::to_string(s.bytes_delta) + "," +
         std::to_string(scale_half_away(s.speed_bps, 0)) + "," + format_fixed(s.pct_complete, 1);
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

int64_t parse_int(const std::string& f, int col) {
  char* end = nullptr;
  errno = 0;
  long long v = std::strtoll(f.c_str(), &end, 10);
  if (f.empty() || errno != 0 || end != f.c_str() + f.size())
    throw NumericParseError("not an integer: '" + f + "'", col);
  return v;
}

uint64_t parse_uint(const std::string& f, int col) {
  int64_t v = parse_int(f, col);
  if (v < 0) throw NumericParseError("negative value not allowed: '" + f + "'", col);
  return static_cast<uint64_t>(v);
}

double parse_real(const std::string& f, int col) {
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(f.c_str(), &end);
  if (f.empty() || errno != 0 || end != f.c_str() + f.size())
    throw NumericParseError("not a number: '" + f + "'", col);
  return v;
}

}  // namespace

ServerSample decode_server_row(const std::string& line) {
  auto f = split_fields(line);
  if (f.size() != 7)
    throw FieldCountMismatch("server row needs 7 fields, got " + std::to_string(f.size()),
                             static_cast<int>(f.size()));
  ServerSample s;
  s.seq = parse_int(f[0], 0);
  s.t_ms = parse_int(f[1], 1);
  s.cpu_load = parse_real(f[2], 2);
  s.cpu_temp = parse_real(f[3], 3);
  s.ext_temp = parse_real(f[4], 4);
  s.voltage = parse_real(f[5], 5);
  s.current = parse_real(f[6], 6);
  s.validate();
  return s;
}

ClientSample decode_client_row(const std::string& line) {
  auto f = split_fields(line);
  if (f.size() != 6)
    throw FieldCountMismatch("client row needs 6 fields, got " + std::to_string(f.size()),
                             static_cast<int>(f.size()));
  ClientSample s;
  s.seq = parse_int(f[0], 0);
  s.t_ms = parse_int(f[1], 1);
  s.bytes_total = parse_uint(f[2], 2);
  s.bytes_delta = parse_uint(f[3], 3);
  s.speed_bps = static_cast<double>(parse_int(f[4], 4));
  s.pct_complete = parse_real(f[5], 5);
  s.validate();
  return s;
}

void Journal::append(const ServerSample& s) {
  if (header.role != Role::Server) throw InvariantViolation("server row in client journal");
  server_rows.push_back(s);
}

void Journal::append(const ClientSample& s) {
  if (header.role != Role::Client) throw InvariantViolation("client row in server journal");
  client_rows.push_back(s);
}

void Journal::validate() const {
  header.validate();
  if (header.role == Role::Server) {
    for (size_t i = 0; i < server_rows.size(); ++i) {
      server_rows[i].validate();
      if (server_rows[i].seq != static_cast<int64_t>(i))
        throw InvariantViolation("server seq not contiguous at row " + std::to_string(i));
    }
  } else {
    uint64_t prev_total = 0;
    for (size_t i = 0; i < client_rows.size(); ++i) {
      const auto& r = client_rows[i];
      r.validate();
      if (r.seq != static_cast<int64_t>(i))
        throw InvariantViolation("client seq not contiguous at row " + std::to_string(i));
      if (i > 0) {
        if (r.bytes_total < prev_total)
          throw InvariantViolation("bytes_total decreased at row " + std::to_string(i));
        if (r.bytes_delta != r.bytes_total - prev_total)
          throw InvariantViolation("bytes_delta inconsistent at row " + std::to_string(i));
      }
      prev_total = r.bytes_total;
    }
  }
}

std::string Journal::encode() const {
  validate();
  std::string out = header.encode() + "\n" + column_header(header.role) + "\n";
  if (header.role == Role::Server)
    for (const auto& r : server_rows) out += encode_row(r) + "\n";
  else
    for (const auto& r : client_rows) out += encode_row(r) + "\n";
  if (aborted_reason) out += "# aborted=" + *aborted_reason + "\n";
  return out;
}

Journal Journal::decode(const std::string& text) {
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line)) throw InvariantViolation("empty journal");
  Journal j;
  j.header = RunHeader::decode(line);
  if (!std::getline(ss, line) || line != column_header(j.header.role))
    throw InvariantViolation("missing or wrong column header line");
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    if (line.rfind("# aborted=", 0) == 0) {
      j.aborted_reason = line.substr(10);
      continue;
    }
    if (j.header.role == Role::Server)
      j.server_rows.push_back(decode_server_row(line));
    else
      j.client_rows.push_back(decode_client_row(line));
  }
  j.validate();
  return j;
}

void Journal::write_file(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvariantViolation("cannot open journal file for writing: " + path);
  f << encode();
}

Journal Journal::read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvariantViolation("cannot open journal file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return decode(ss.str());
}

}  // namespace wibench::model
