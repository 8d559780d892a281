#include <doctest.h>

#include <future>
#include <thread>

#include "wibench/control.hpp"

using namespace wibench::control;
namespace net = wibench::net;

TEST_CASE("loopback handshake fires a StartEvent") {
  net::Listener listener(0);
  auto fut = std::async(std::launch::async, [&] {
    return await_start(listener, kDefaultTrigger);
  });
  send_start("127.0.0.1", listener.port(), kDefaultTrigger);
  auto ev = fut.get();
  CHECK_FALSE(ev.peer.empty());
}

TEST_CASE("default trigger is 31 bytes") {
  CHECK(std::string(kDefaultTrigger).size() == 31);
  CHECK(std::string(kDefaultTrigger) == "download from FTP is running...");
}

TEST_CASE("wrong payload keeps the listener armed") {
  net::Listener listener(0);
  auto fut = std::async(std::launch::async, [&] {
    return await_start(listener, kDefaultTrigger);
  });
  send_start("127.0.0.1", listener.port(), "hello");
  CHECK(fut.wait_for(std::chrono::milliseconds(200)) == std::future_status::timeout);
  send_start("127.0.0.1", listener.port(), kDefaultTrigger);
  auto ev = fut.get();
  CHECK_FALSE(ev.peer.empty());
}

TEST_CASE("send_start to an unreachable endpoint raises ConnectError") {
  // port 1 on loopback is essentially never bound
  CHECK_THROWS_AS(send_start("127.0.0.1", 1, kDefaultTrigger), net::ConnectError);
}

TEST_CASE("double bind raises BindError") {
  net::Listener a(0);
  CHECK_THROWS_AS(net::Listener(a.port()), net::BindError);
}

TEST_CASE("a trigger of exactly 1024 bytes is delivered intact") {
  std::string big(kMaxPayload, 'x');
  net::Listener listener(0);
  auto fut = std::async(std::launch::async, [&] { return await_start(listener, big); });
  send_start("127.0.0.1", listener.port(), big);
  CHECK_NOTHROW(fut.get());
}

TEST_CASE("ControlListener: exactly-once start, busy mid-run, done") {
  ControlListener listener(0, kDefaultTrigger);

  send_start("127.0.0.1", listener.port(), "noise");  // rejected while idle
  StartEvent ev;
  CHECK_FALSE(listener.wait_start(std::chrono::milliseconds(100), &ev));

  auto t0 = std::chrono::steady_clock::now();
  send_start("127.0.0.1", listener.port(), kDefaultTrigger);
  REQUIRE(listener.wait_start(std::chrono::milliseconds(1000), &ev));
  auto latency = std::chrono::steady_clock::now() - t0;
  CHECK(latency < std::chrono::milliseconds(100));

  // second trigger mid-run: busy-rejected, does not count as done
  send_start("127.0.0.1", listener.port(), kDefaultTrigger);
  CHECK_FALSE(listener.wait_done(std::chrono::milliseconds(100)));

  send_start("127.0.0.1", listener.port(), kDoneMessage);
  CHECK(listener.wait_done(std::chrono::milliseconds(1000)));
  listener.stop();
}

TEST_CASE("synchronized start: both sides observe the event within 100 ms") {
  ControlListener listener(0, kDefaultTrigger);
  auto client_sent = std::chrono::steady_clock::now();
  send_start("127.0.0.1", listener.port(), kDefaultTrigger);
  StartEvent ev;
  REQUIRE(listener.wait_start(std::chrono::milliseconds(1000), &ev));
  auto skew = ev.received_at - client_sent;
  CHECK(std::chrono::abs(skew) < std::chrono::milliseconds(100));
  listener.stop();
}
