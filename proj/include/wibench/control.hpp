#ifndef WIBENCH_CONTROL_HPP_
#define WIBENCH_CONTROL_HPP_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <string>
#include <thread>

#include "wibench/net.hpp"

namespace wibench::control {

// The trigger payload the client sends when the download begins.
inline constexpr const char* kDefaultTrigger = "download from FTP is running...";
inline constexpr uint16_t kDefaultPort = 5555;
inline constexpr const char* kDoneMessage = "done";
inline constexpr size_t kMaxPayload = 1024;  // one-shot recv buffer size

struct TriggerMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct StartEvent {
  std::string peer;
  std::chrono::steady_clock::time_point received_at;
};

// Blocks until a connection delivers exactly `trigger`; wrong payloads are
// dropped and listening continues. cancel, when set, aborts the wait and
// throws TriggerMismatch("cancelled").
StartEvent await_start(net::Listener& listener, const std::string& trigger,
                       const std::atomic<bool>* cancel = nullptr);

// Opens a stream, writes the payload as UTF-8, flushes and closes.
void send_start(const std::string& host, uint16_t port, const std::string& payload);

// Listener owning its accept loop on a background thread. State machine:
// Idle (waiting for the trigger) -> Running (trigger seen; further triggers
// answered as busy; a `done` payload ends the run).
class ControlListener {
 public:
  ControlListener(uint16_t port, std::string trigger);
  ~ControlListener();

  uint16_t port() const { return listener_.port(); }

  // Blocks until the trigger arrives or timeout. Returns false on timeout.
  bool wait_start(std::chrono::milliseconds timeout, StartEvent* ev = nullptr);
  // True once a `done` payload has been received.
  bool done_received();
  bool wait_done(std::chrono::milliseconds timeout);
  void stop();

 private:
  void loop();

  net::Listener listener_;
  std::string trigger_;
  std::thread thread_;
  std::atomic<bool> stop_{false};
  std::mutex mu_;
  std::condition_variable cv_;
  bool started_ = false;
  bool done_ = false;
  StartEvent event_;
};

}  // namespace wibench::control

#endif
