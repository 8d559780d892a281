#include "wibench/control.hpp"

#include <vector>

namespace wibench::control {

namespace {

std::string read_payload(net::Socket& conn) {
  std::vector<char> buf(kMaxPayload);
  size_t total = 0;
  // single short message per connection; connection close delimits it
  while (total < buf.size()) {
    size_t n = conn.recv_some(buf.data() + total, buf.size() - total);
    if (n == 0) break;
    total += n;
  }
  return std::string(buf.data(), total);
}

}  // namespace

StartEvent await_start(net::Listener& listener, const std::string& trigger,
                       const std::atomic<bool>* cancel) {
  for (;;) {
    if (cancel && cancel->load()) throw TriggerMismatch("cancelled");
    std::string peer;
    auto conn = listener.accept(100, &peer);
    if (!conn) continue;
    std::string payload = read_payload(*conn);
    conn->close();
    if (payload == trigger)
      return StartEvent{peer, std::chrono::steady_clock::now()};
    // wrong payload: log-and-continue semantics, the wait stays armed
  }
}

void send_start(const std::string& host, uint16_t port, const std::string& payload) {
  net::Socket s = net::connect_to(host, port);
  s.send_all(payload.data(), payload.size());
  s.shutdown_write();
  // wait for the peer to drain and close so the write is known delivered
  char tmp[16];
  while (s.recv_some(tmp, sizeof(tmp)) > 0) {
  }
}

ControlListener::ControlListener(uint16_t port, std::string trigger)
    : listener_(port), trigger_(std::move(trigger)) {
  thread_ = std::thread([this] { loop(); });
}

ControlListener::~ControlListener() { stop(); }

void ControlListener::loop() {
  while (!stop_.load()) {
    std::string peer;
    auto conn = listener_.accept(50, &peer);
    if (!conn) continue;
    std::string payload = read_payload(*conn);
    conn->close();
    std::lock_guard<std::mutex> lk(mu_);
    if (!started_) {
      if (payload == trigger_) {
        started_ = true;
        event_ = StartEvent{peer, std::chrono::steady_clock::now()};
        cv_.notify_all();
      }
      // wrong payload while idle: rejected, keep listening
    } else {
      if (payload == kDoneMessage) {
        done_ = true;
        cv_.notify_all();
      }
      // a second trigger mid-run is busy-rejected (dropped)
    }
  }
}

bool ControlListener::wait_start(std::chrono::milliseconds timeout, StartEvent* ev) {
  std::unique_lock<std::mutex> lk(mu_);
  if (!cv_.wait_for(lk, timeout, [this] { return started_; })) return false;
  if (ev) *ev = event_;
  return true;
}

bool ControlListener::done_received() {
  std::lock_guard<std::mutex> lk(mu_);
  return done_;
}

bool ControlListener::wait_done(std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lk(mu_);
  return cv_.wait_for(lk, timeout, [this] { return done_; });
}

void ControlListener::stop() {
  stop_.store(true);
  if (thread_.joinable()) thread_.join();
  listener_.close();
}

}  // namespace wibench::control
