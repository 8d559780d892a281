#ifndef WIBENCH_NET_HPP_
#define WIBENCH_NET_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace wibench::net {

struct NetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BindError : NetError {
  using NetError::NetError;
};
struct ConnectError : NetError {
  using NetError::NetError;
};

// Thin RAII wrapper over a POSIX socket fd.
class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(Socket&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Socket& operator=(Socket&& other) noexcept;
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  ~Socket();

  int fd() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void close();

  // Shuts down the write side; peer sees EOF.
  void shutdown_write();

  void send_all(const void* data, size_t len);
  // Reads until len bytes arrive or the peer closes. Returns bytes read.
  size_t recv_exact(void* data, size_t len);
  // Single recv(); returns 0 on orderly close.
  size_t recv_some(void* data, size_t len);

 private:
  int fd_ = -1;
};

// Listening TCP socket bound to 0.0.0.0:port (port 0 picks an ephemeral one).
class Listener {
 public:
  Listener() = default;
  explicit Listener(uint16_t port);
  uint16_t port() const { return port_; }
  bool valid() const { return sock_.valid(); }

  // Blocks up to timeout_ms (-1 = forever). Empty optional on timeout.
  // peer_out, when given, receives "ip:port" of the accepted connection.
  std::optional<Socket> accept(int timeout_ms, std::string* peer_out = nullptr);
  void close() { sock_.close(); }

 private:
  Socket sock_;
  uint16_t port_ = 0;
};

Socket connect_to(const std::string& host, uint16_t port, int timeout_ms = 5000);

}  // namespace wibench::net

#endif
