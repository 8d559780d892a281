#ifndef WIBENCH_TRANSFER_HPP_
#define WIBENCH_TRANSFER_HPP_

#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>

#include "wibench/net.hpp"

namespace wibench::transfer {

inline constexpr size_t kMaxChunk = 64 * 1024;  // bytes between counter updates

struct TransferError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NoSuchFile : TransferError {
  using TransferError::TransferError;
};
struct NotSupported : TransferError {
  using TransferError::TransferError;
};
struct TransferAborted : TransferError {
  using TransferError::TransferError;
};
struct ProtocolError : TransferError {
  using TransferError::TransferError;
};
struct SizeMismatch : TransferError {
  using TransferError::TransferError;
};

// Single-writer / multi-reader cumulative byte counter shared between the
// transfer and the speed sampler.
class ByteCounter {
 public:
  uint64_t get() const { return v_.load(std::memory_order_acquire); }
  void add(uint64_t n) { v_.fetch_add(n, std::memory_order_acq_rel); }
  void reset() { v_.store(0, std::memory_order_release); }

 private:
  std::atomic<uint64_t> v_{0};
};

inline uint64_t progress_snapshot(const ByteCounter& c) { return c.get(); }

using ByteSink = std::function<void(const char* data, size_t len)>;

// ---------------------------------------------------------------------------
// FTP client subset: USER/PASS, TYPE I, SIZE, PASV, RETR, QUIT.

class FtpClient {
 public:
  FtpClient() = default;
  void connect(const std::string& host, uint16_t port, const std::string& user = "anonymous",
               const std::string& pass = "anonymous");
  uint64_t size(const std::string& path);
  // Streams RETR data to sink in chunks <= kMaxChunk, bumping counter per
  // chunk. Returns the byte total delivered.
  uint64_t retrieve(const std::string& path, const ByteSink& sink, ByteCounter& counter);
  void quit();

 private:
  std::string read_reply();        // full reply line(s); returns the last line
  int command(const std::string& line, std::string* reply = nullptr);

  net::Socket ctrl_;
  std::string host_;
};

// Minimal single-session FTP server for offline interop tests. Accept-all
// credentials, passive mode only. `fault_abort_at`, when set, drops the data
// connection after exactly that many payload bytes.
class StubFtpServer {
 public:
  StubFtpServer(std::string root, uint16_t port = 0,
                std::optional<uint64_t> fault_abort_at = std::nullopt);
  ~StubFtpServer();

  uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  void session_loop();
  void handle_session(net::Socket ctrl);

  std::string root_;
  std::optional<uint64_t> fault_abort_at_;
  net::Listener listener_;
  std::thread thread_;
  std::atomic<bool> stop_{false};
};

// ---------------------------------------------------------------------------
// Blob channel: 8-byte big-endian size header, then raw bytes. Deterministic
// substitute for FTP in simulation.

using BlobGenerator = std::function<char(uint64_t offset)>;

class BlobServer {
 public:
  BlobServer(uint64_t size, BlobGenerator gen, uint16_t port = 0);
  ~BlobServer();

  uint16_t port() const { return listener_.port(); }
  void stop();

 private:
  void loop();

  uint64_t size_;
  BlobGenerator gen_;
  net::Listener listener_;
  std::thread thread_;
  std::atomic<bool> stop_{false};
};

// Pull-style client connection: the caller paces the reads, which is what
// makes simulated runs deterministic.
class BlobConnection {
 public:
  BlobConnection(const std::string& host, uint16_t port);
  uint64_t announced_size() const { return size_; }
  // Reads up to n further bytes (blocking until they arrive or EOF); adds to
  // counter and forwards to sink when given. Returns bytes actually read.
  uint64_t pull(uint64_t n, ByteCounter& counter, const ByteSink* sink = nullptr);
  void close() { sock_.close(); }

 private:
  net::Socket sock_;
  uint64_t size_ = 0;
};

// One-shot fetch with optional client-side rate limiting (bytes/second).
uint64_t blob_fetch(const std::string& host, uint16_t port, uint64_t expected_size,
                    std::optional<double> rate_bps, ByteCounter& counter,
                    const ByteSink* sink = nullptr);

}  // namespace wibench::transfer

#endif
