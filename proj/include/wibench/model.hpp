#ifndef WIBENCH_MODEL_HPP_
#define WIBENCH_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wibench::model {

// Decimal quantization rule used everywhere in the harness:
// half-away-from-zero at the given number of decimals.
long long scale_half_away(double value, int decimals);
double quantize(double value, int decimals);
// Fixed-point rendering of the quantized value ("23.4", "-0.050", ...).
std::string format_fixed(double value, int decimals);

struct CsvError : std::runtime_error {
  int column;  // 0-based index of the offending field
  CsvError(const std::string& msg, int col) : std::runtime_error(msg), column(col) {}
};
struct FieldCountMismatch : CsvError {
  using CsvError::CsvError;
};
struct NumericParseError : CsvError {
  using CsvError::CsvError;
};
struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Role { Server, Client };
std::string to_string(Role r);
Role role_from_string(const std::string& s);

// One telemetry row: the five server-side factors at a sampling tick.
struct ServerSample {
  int64_t seq = 0;
  int64_t t_ms = 0;
  double cpu_load = 0.0;  // percent, 1 decimal
  double cpu_temp = 0.0;  // Celsius, 1 decimal
  double ext_temp = 0.0;  // Celsius, 1 decimal
  double voltage = 0.0;   // volts, 3 decimals
  double current = 0.0;   // amperes, 3 decimals

  void validate() const;
  bool operator==(const ServerSample&) const = default;
};

// One throughput row on the client side.
struct ClientSample {
  int64_t seq = 0;
  int64_t t_ms = 0;
  uint64_t bytes_total = 0;
  uint64_t bytes_delta = 0;
  double speed_bps = 0.0;     // encoded as integer bytes/s
  double pct_complete = 0.0;  // percent, 1 decimal

  void validate() const;
  bool operator==(const ClientSample&) const = default;
};

struct RunHeader {
  std::string run_id;
  Role role = Role::Server;
  int64_t interval_ms = 5000;
  std::string device_label;
  std::string distance_label;
  std::optional<uint64_t> file_size_bytes;  // client role only

  void validate() const;
  std::string encode() const;  // "# run_id=...;role=...;..."
  static RunHeader decode(const std::string& line);
  bool operator==(const RunHeader&) const = default;
};

std::string column_header(Role role);

std::string encode_row(const ServerSample& s);
std::string encode_row(const ClientSample& s);
ServerSample decode_server_row(const std::string& line);
ClientSample decode_client_row(const std::string& line);

// Ordered sample log for one agent in one run. Rows are homogeneous per role.
struct Journal {
  RunHeader header;
  std::vector<ServerSample> server_rows;
  std::vector<ClientSample> client_rows;
  std::optional<std::string> aborted_reason;  // trailer "# aborted=<reason>"

  size_t size() const {
    return header.role == Role::Server ? server_rows.size() : client_rows.size();
  }
  void append(const ServerSample& s);
  void append(const ClientSample& s);
  void validate() const;

  std::string encode() const;
  static Journal decode(const std::string& text);

  void write_file(const std::string& path) const;
  static Journal read_file(const std::string& path);
};

}  // namespace wibench::model

#endif
