#include <doctest.h>

#include <random>

#include "wibench/model.hpp"

using namespace wibench::model;

TEST_CASE("format_fixed uses half-away-from-zero") {
  CHECK(format_fixed(23.437, 1) == "23.4");
  CHECK(format_fixed(-1.25, 1) == "-1.3");
  CHECK(format_fixed(1.25, 1) == "1.3");
  CHECK(format_fixed(0.0, 1) == "0.0");
  CHECK(format_fixed(-0.05, 3) == "-0.050");
  CHECK(format_fixed(5.012, 3) == "5.012");
  CHECK(format_fixed(134144.0, 0) == "134144");
}

TEST_CASE("encode_row server sample") {
  ServerSample s{0, 0, 25.0, 47.2, 23.4, 5.012, 0.340};
  CHECK(encode_row(s) == "0,0,25.0,47.2,23.4,5.012,0.340");
}

TEST_CASE("encode_row all-zero client sample") {
  ClientSample c{};
  CHECK(encode_row(c) == "0,0,0,0,0,0.0");
}

TEST_CASE("encode_row preserves negative current") {
  ServerSample s{0, 0, 25.0, 47.2, 23.4, 5.012, -0.050};
  CHECK(encode_row(s).find("-0.050") != std::string::npos);
}

TEST_CASE("decode_row inverts encode_row") {
  ServerSample expect{0, 0, 25.0, 47.2, 23.4, 5.012, 0.340};
  CHECK(decode_server_row("0,0,25.0,47.2,23.4,5.012,0.340") == expect);
}

TEST_CASE("decode_row rejects wrong field count") {
  CHECK_THROWS_AS(decode_server_row("0,0"), FieldCountMismatch);
}

TEST_CASE("decode_row reports the bad column") {
  try {
    decode_server_row("0,0,abc,47.2,23.4,5.012,0.340");
    FAIL("expected NumericParseError");
  } catch (const NumericParseError& e) {
    CHECK(e.column == 2);
  }
}

TEST_CASE("round-trip identity and quantization idempotence") {
  std::mt19937_64 rng(7);
  auto uniform = [&rng](double lo, double hi) {
    double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  };
  for (int i = 0; i < 500; ++i) {
    ServerSample s;
    s.seq = i;
    s.t_ms = i * 5000;
    s.cpu_load = uniform(0, 100);
    s.cpu_temp = uniform(-20, 120);
    s.ext_temp = uniform(-55, 125);
    s.voltage = uniform(0, 16);
    s.current = uniform(-2, 2);
    std::string line = encode_row(s);
    ServerSample d = decode_server_row(line);
    CHECK(encode_row(d) == line);  // quantization is idempotent
    CHECK(d.cpu_load == quantize(s.cpu_load, 1));
    CHECK(d.voltage == quantize(s.voltage, 3));
  }
  for (int i = 0; i < 500; ++i) {
    ClientSample c;
    c.seq = 0;
    c.bytes_total = rng() % (1u << 30);
    c.bytes_delta = 0;
    c.speed_bps = uniform(0, 1e9);
    c.pct_complete = uniform(0, 100);
    std::string line = encode_row(c);
    CHECK(encode_row(decode_client_row(line)) == line);
  }
}

TEST_CASE("journal header encodes and decodes bit-exact") {
  RunHeader h{"run-42", Role::Client, 5000, "RPi Zero W", "0.5m", 686817280};
  std::string line = h.encode();
  CHECK(line ==
        "# run_id=run-42;role=client;interval_ms=5000;device=RPi Zero W;distance=0.5m;"
        "file_size=686817280");
  CHECK(RunHeader::decode(line) == h);
}

TEST_CASE("journal file layout: header, columns, rows") {
  Journal j;
  j.header = RunHeader{"r1", Role::Server, 5000, "dev", "0.5m", std::nullopt};
  j.append(ServerSample{0, 0, 10.0, 40.0, 20.0, 5.0, 0.1});
  j.append(ServerSample{1, 5000, 11.0, 41.0, 20.0, 5.0, 0.1});
  std::string text = j.encode();
  CHECK(text ==
        "# run_id=r1;role=server;interval_ms=5000;device=dev;distance=0.5m\n"
        "seq,t_ms,cpu_load,cpu_temp,ext_temp,voltage,current\n"
        "0,0,10.0,40.0,20.0,5.000,0.100\n"
        "1,5000,11.0,41.0,20.0,5.000,0.100\n");
  Journal back = Journal::decode(text);
  CHECK(back.header == j.header);
  CHECK(back.server_rows == j.server_rows);
}

TEST_CASE("journal abort trailer survives a round trip") {
  Journal j;
  j.header = RunHeader{"r1", Role::Client, 100, "", "", 1000};
  j.append(ClientSample{0, 0, 0, 0, 0, 0});
  j.aborted_reason = "data connection lost";
  Journal back = Journal::decode(j.encode());
  REQUIRE(back.aborted_reason.has_value());
  CHECK(*back.aborted_reason == "data connection lost");
}

TEST_CASE("journal invariants reject broken sequences") {
  Journal j;
  j.header = RunHeader{"r1", Role::Client, 100, "", "", std::nullopt};
  j.client_rows.push_back(ClientSample{0, 0, 100, 0, 0, 1.0});
  j.client_rows.push_back(ClientSample{1, 100, 50, 0, 0, 0.5});  // bytes_total decreased
  CHECK_THROWS_AS(j.validate(), InvariantViolation);

  Journal k;
  k.header = RunHeader{"r1", Role::Server, 100, "", "", std::nullopt};
  k.server_rows.push_back(ServerSample{0, 0, 0, 0, 0, 0, 0});
  k.server_rows.push_back(ServerSample{2, 200, 0, 0, 0, 0, 0});  // seq gap
  CHECK_THROWS_AS(k.validate(), InvariantViolation);
}

TEST_CASE("sample invariants") {
  ServerSample s{0, 0, 101.0, 40.0, 20.0, 5.0, 0.1};
  CHECK_THROWS_AS(s.validate(), InvariantViolation);
  s.cpu_load = 50.0;
  s.current = 11.0;
  CHECK_THROWS_AS(s.validate(), InvariantViolation);
  s.current = -0.5;  // reverse flow is allowed
  CHECK_NOTHROW(s.validate());
}
