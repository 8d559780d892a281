#include "wibench/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace wibench::net {

namespace {
std::string errno_str(const char* what) {
  return std::string(what) + ": " + std::strerror(errno);
}
}  // namespace

Socket& Socket::operator=(Socket&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

Socket::~Socket() { close(); }

void Socket::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

void Socket::shutdown_write() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
}

void Socket::send_all(const void* data, size_t len) {
  const char* p = static_cast<const char*>(data);
  while (len > 0) {
    ssize_t n = ::send(fd_, p, len, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetError(errno_str("send"));
    }
    p += n;
    len -= static_cast<size_t>(n);
  }
}

size_t Socket::recv_exact(void* data, size_t len) {
  char* p = static_cast<char*>(data);
  size_t got = 0;
  while (got < len) {
    ssize_t n = ::recv(fd_, p + got, len - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetError(errno_str("recv"));
    }
    if (n == 0) break;
    got += static_cast<size_t>(n);
  }
  return got;
}

size_t Socket::recv_some(void* data, size_t len) {
  for (;;) {
    ssize_t n = ::recv(fd_, data, len, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw NetError(errno_str("recv"));
    }
    return static_cast<size_t>(n);
  }
}

Listener::Listener(uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw BindError(errno_str("socket"));
  Socket s(fd);
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_ANY);
  addr.sin_port = htons(port);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    throw BindError(errno_str("bind"));
  if (::listen(fd, 8) != 0) throw BindError(errno_str("listen"));
  socklen_t alen = sizeof(addr);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &alen);
  port_ = ntohs(addr.sin_port);
  sock_ = std::move(s);
}

std::optional<Socket> Listener::accept(int timeout_ms, std::string* peer_out) {
  pollfd pfd{sock_.fd(), POLLIN, 0};
  int r = ::poll(&pfd, 1, timeout_ms);
  if (r <= 0) return std::nullopt;
  sockaddr_in peer{};
  socklen_t plen = sizeof(peer);
  int cfd = ::accept(sock_.fd(), reinterpret_cast<sockaddr*>(&peer), &plen);
  if (cfd < 0) return std::nullopt;
  if (peer_out) {
    char buf[INET_ADDRSTRLEN] = {};
    ::inet_ntop(AF_INET, &peer.sin_addr, buf, sizeof(buf));
    *peer_out = std::string(buf) + ":" + std::to_string(ntohs(peer.sin_port));
  }
  return Socket(cfd);
}

Socket connect_to(const std::string& host, uint16_t port, int timeout_ms) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || !res)
    throw ConnectError("cannot resolve host " + host);
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0) {
    ::freeaddrinfo(res);
    throw ConnectError(errno_str("socket"));
  }
  Socket s(fd);
  int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) throw ConnectError("connect to " + host + ":" + std::to_string(port) + " failed: " + std::strerror(errno));
  (void)timeout_ms;  // blocking connect; callers use loopback or short-lived links
  return s;
}

}  // namespace wibench::net
