#include "wibench/transfer.hpp"

#include <sys/stat.h>

#include <chrono>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

namespace wibench::transfer {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// FTP client

namespace {

std::string read_line(net::Socket& s) {
  std::string line;
  char c;
  for (;;) {
    if (s.recv_exact(&c, 1) != 1) {
      if (line.empty()) throw net::NetError("connection closed");
      break;
    }
    if (c == '\n') break;
    if (c != '\r') line.push_back(c);
  }
  return line;
}

int reply_code(const std::string& line) {
  if (line.size() < 3) throw ProtocolError("short FTP reply: '" + line + "'");
  return std::atoi(line.substr(0, 3).c_str());
}

}  // namespace

std::string FtpClient::read_reply() {
  std::string line = read_line(ctrl_);
  if (line.size() >= 4 && line[3] == '-') {
    std::string code = line.substr(0, 3);
    std::string next;
    do {
      next = read_line(ctrl_);
    } while (!(next.size() >= 4 && next.substr(0, 3) == code && next[3] == ' '));
    return next;
  }
  return line;
}

int FtpClient::command(const std::string& line, std::string* reply) {
  std::string wire = line + "\r\n";
  ctrl_.send_all(wire.data(), wire.size());
  std::string r = read_reply();
  if (reply) *reply = r;
  return reply_code(r);
}

void FtpClient::connect(const std::string& host, uint16_t port, const std::string& user,
                        const std::string& pass) {
  host_ = host;
  ctrl_ = net::connect_to(host, port);
  if (reply_code(read_reply()) != 220) throw ProtocolError("no 220 greeting");
  int code = command("USER " + user);
  if (code == 331) code = command("PASS " + pass);
  if (code != 230) throw ProtocolError("login rejected");
  if (command("TYPE I") != 200) throw ProtocolError("cannot set binary type");
}

uint64_t FtpClient::size(const std::string& path) {
  std::string reply;
  int code = command("SIZE " + path, &reply);
  if (code == 550) throw NoSuchFile(reply);
  if (code == 502) throw NotSupported(reply);
  if (code != 213) throw ProtocolError("unexpected SIZE reply: " + reply);
  return std::strtoull(reply.c_str() + 4, nullptr, 10);
}

uint64_t FtpClient::retrieve(const std::string& path, const ByteSink& sink,
                             ByteCounter& counter) {
  std::string reply;
  if (command("PASV", &reply) != 227) throw ProtocolError("PASV rejected: " + reply);
  // 227 Entering Passive Mode (h1,h2,h3,h4,p1,p2)
  auto open_paren = reply.find('(');
  auto close_paren = reply.find(')');
  if (open_paren == std::string::npos || close_paren == std::string::npos)
    throw ProtocolError("unparseable PASV reply: " + reply);
  int h1, h2, h3, h4, p1, p2;
  if (std::sscanf(reply.c_str() + open_paren + 1, "%d,%d,%d,%d,%d,%d", &h1, &h2, &h3, &h4, &p1,
                  &p2) != 6)
    throw ProtocolError("unparseable PASV tuple: " + reply);
  uint16_t data_port = static_cast<uint16_t>(p1 * 256 + p2);
  net::Socket data = net::connect_to(host_, data_port);

  int code = command("RETR " + path, &reply);
  if (code == 550) throw NoSuchFile(reply);
  if (code != 150) throw ProtocolError("RETR rejected: " + reply);

  std::vector<char> buf(kMaxChunk);
  uint64_t total = 0;
  for (;;) {
    size_t n;
    try {
      n = data.recv_some(buf.data(), buf.size());
    } catch (const net::NetError& e) {
      throw TransferAborted(std::string("data connection error: ") + e.what());
    }
    if (n == 0) break;
    if (sink) sink(buf.data(), n);
    counter.add(n);
    total += n;
  }
  data.close();
  try {
    std::string fin = read_reply();
    if (reply_code(fin) != 226) throw TransferAborted("transfer not completed: " + fin);
  } catch (const net::NetError& e) {
    throw TransferAborted(std::string("control channel lost: ") + e.what());
  }
  return total;
}

void FtpClient::quit() {
  if (ctrl_.valid()) {
    try {
      command("QUIT");
    } catch (...) {
    }
    ctrl_.close();
  }
}

// ---------------------------------------------------------------------------
// Stub FTP server

StubFtpServer::StubFtpServer(std::string root, uint16_t port,
                             std::optional<uint64_t> fault_abort_at)
    : root_(std::move(root)), fault_abort_at_(fault_abort_at), listener_(port) {
  thread_ = std::thread([this] { session_loop(); });
}

StubFtpServer::~StubFtpServer() { stop(); }

void StubFtpServer::stop() {
  stop_.store(true);
  if (thread_.joinable()) thread_.join();
  listener_.close();
}

void StubFtpServer::session_loop() {
  while (!stop_.load()) {
    auto conn = listener_.accept(50);
    if (!conn) continue;
    try {
      handle_session(std::move(*conn));
    } catch (const std::exception&) {
      // a broken session must not take down the server
    }
  }
}

void StubFtpServer::handle_session(net::Socket ctrl) {
  auto reply = [&ctrl](const std::string& line) {
    std::string wire = line + "\r\n";
    ctrl.send_all(wire.data(), wire.size());
  };
  auto resolve = [this](const std::string& path) -> std::optional<fs::path> {
    if (path.find("..") != std::string::npos) return std::nullopt;
    fs::path p = fs::path(root_) / path;
    if (!fs::exists(p) || !fs::is_regular_file(p)) return std::nullopt;
    return p;
  };

  reply("220 wibench stub FTP ready");
  std::optional<net::Listener> pasv;
  for (;;) {
    std::string line = read_line(ctrl);  // throws when the client disconnects
    auto sp = line.find(' ');
    std::string verb = line.substr(0, sp);
    std::string arg = sp == std::string::npos ? "" : line.substr(sp + 1);
    for (auto& c : verb) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));

    if (verb.empty()) break;
    if (verb == "USER") {
      reply("331 Any password will do");
    } else if (verb == "PASS") {
      reply("230 Logged in");
    } else if (verb == "TYPE") {
      reply(arg == "I" ? "200 Binary mode" : "200 Type noted");
    } else if (verb == "PASV") {
      pasv.emplace(0);
      uint16_t p = pasv->port();
      reply("227 Entering Passive Mode (127,0,0,1," + std::to_string(p / 256) + "," +
            std::to_string(p % 256) + ")");
    } else if (verb == "SIZE") {
      auto p = resolve(arg);
      if (!p)
        reply("550 No such file");
      else
        reply("213 " + std::to_string(fs::file_size(*p)));
    } else if (verb == "RETR") {
      auto p = resolve(arg);
      if (!p) {
        reply("550 No such file");
        continue;
      }
      if (!pasv) {
        reply("425 Use PASV first");
        continue;
      }
      reply("150 Opening BINARY mode data connection");
      auto data = pasv->accept(5000);
      pasv.reset();
      if (!data) {
        reply("425 Data connection failed");
        continue;
      }
      std::ifstream f(*p, std::ios::binary);
      std::vector<char> buf(kMaxChunk);
      uint64_t sent = 0;
      bool faulted = false;
      while (f) {
        f.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        size_t n = static_cast<size_t>(f.gcount());
        if (n == 0) break;
        if (fault_abort_at_ && sent + n >= *fault_abort_at_) {
          size_t keep = static_cast<size_t>(*fault_abort_at_ - sent);
          if (keep > 0) data->send_all(buf.data(), keep);
          sent += keep;
          faulted = true;
          break;
        }
        data->send_all(buf.data(), n);
        sent += n;
      }
      data->close();
      reply(faulted ? "426 Transfer aborted" : "226 Transfer complete");
    } else if (verb == "QUIT") {
      reply("221 Bye");
      break;
    } else {
      reply("502 Command not implemented");
    }
  }
}

// ---------------------------------------------------------------------------
// Blob channel

BlobServer::BlobServer(uint64_t size, BlobGenerator gen, uint16_t port)
    : size_(size), gen_(std::move(gen)), listener_(port) {
  thread_ = std::thread([this] { loop(); });
}

BlobServer::~BlobServer() { stop(); }

void BlobServer::stop() {
  stop_.store(true);
  if (thread_.joinable()) thread_.join();
  listener_.close();
}

void BlobServer::loop() {
  while (!stop_.load()) {
    auto conn = listener_.accept(50);
    if (!conn) continue;
    try {
      unsigned char hdr[8];
      for (int i = 0; i < 8; ++i) hdr[i] = static_cast<unsigned char>(size_ >> (8 * (7 - i)));
      conn->send_all(hdr, sizeof(hdr));
      std::vector<char> buf(kMaxChunk);
      uint64_t off = 0;
      while (off < size_) {
        size_t n = static_cast<size_t>(std::min<uint64_t>(buf.size(), size_ - off));
        for (size_t i = 0; i < n; ++i) buf[i] = gen_(off + i);
        conn->send_all(buf.data(), n);
        off += n;
      }
      conn->shutdown_write();
    } catch (const net::NetError&) {
      // peer went away mid-stream; next connection starts fresh
    }
  }
}

BlobConnection::BlobConnection(const std::string& host, uint16_t port) {
  sock_ = net::connect_to(host, port);
  unsigned char hdr[8];
  if (sock_.recv_exact(hdr, sizeof(hdr)) != sizeof(hdr))
    throw ProtocolError("blob header truncated");
  size_ = 0;
  for (int i = 0; i < 8; ++i) size_ = (size_ << 8) | hdr[i];
}

uint64_t BlobConnection::pull(uint64_t n, ByteCounter& counter, const ByteSink* sink) {
  std::vector<char> buf(kMaxChunk);
  uint64_t got = 0;
  while (got < n) {
    size_t want = static_cast<size_t>(std::min<uint64_t>(buf.size(), n - got));
    size_t r = sock_.recv_exact(buf.data(), want);
    if (r == 0) break;
    if (sink && *sink) (*sink)(buf.data(), r);
    counter.add(r);
    got += r;
    if (r < want) break;  // EOF mid-read
  }
  return got;
}

uint64_t blob_fetch(const std::string& host, uint16_t port, uint64_t expected_size,
                    std::optional<double> rate_bps, ByteCounter& counter, const ByteSink* sink) {
  BlobConnection conn(host, port);
  if (conn.announced_size() != expected_size)
    throw SizeMismatch("server announces " + std::to_string(conn.announced_size()) +
                       " bytes, expected " + std::to_string(expected_size));
  auto start = std::chrono::steady_clock::now();
  uint64_t total = 0;
  while (total < expected_size) {
    uint64_t chunk = std::min<uint64_t>(kMaxChunk, expected_size - total);
    if (rate_bps) {
      // never read ahead of the pacing schedule
      chunk = std::min<uint64_t>(chunk, static_cast<uint64_t>(*rate_bps * 0.05) + 1);
    }
    uint64_t got = conn.pull(chunk, counter, sink);
    if (got == 0)
      throw TransferAborted("blob stream ended at " + std::to_string(total) + " of " +
                            std::to_string(expected_size) + " bytes");
    total += got;
    if (rate_bps && *rate_bps > 0) {
      auto due = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                             std::chrono::duration<double>(static_cast<double>(total) / *rate_bps));
      std::this_thread::sleep_until(due);
    }
  }
  return total;
}

}  // namespace wibench::transfer
