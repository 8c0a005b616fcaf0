#pragma once

// Network transports for SessionManager: plain HTTP request/response
// (POST /v1/message) and a bidirectional TCP stream of length-prefixed
// JSON messages. Needs cpp-httplib on the include path.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cstring>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>

#include "hunt/session.hpp"

namespace hunt {

/// Routes: POST /v1/message (JSON in, JSON out), GET /v1/sessions/<id>/log
/// (JSON-lines download once ended), GET /v1/health.
inline void mount_http(httplib::Server& server, SessionManager& mgr) {
  server.Post("/v1/message", [&mgr](const httplib::Request& req, httplib::Response& res) {
    const auto out = mgr.handle_text(req.body);
    res.status = out.value("kind", "") == "error" && out.value("code", "") == "ParseError" ? 400 : 200;
    res.set_content(out.dump(), "application/json");
  });
  server.Get(R"(/v1/sessions/([A-Za-z0-9_-]+)/log)", [&mgr](const httplib::Request& req, httplib::Response& res) {
    try {
      res.set_content(to_jsonl(mgr.export_log(req.matches[1])), "application/x-ndjson");
      res.set_header("Content-Disposition", "attachment; filename=\"" + std::string(req.matches[1]) + ".jsonl\"");
    } catch (const HuntError& e) {
      res.status = e.code() == ErrorCode::UnknownSession ? 404 : 409;
      res.set_content(nlohmann::json{{"v", kProtocolVersion}, {"kind", "error"}, {"code", std::string(to_string(e.code()))},
                                     {"message", e.what()}}
                          .dump(),
                      "application/json");
    }
  });
  server.Get("/v1/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(nlohmann::json{{"v", kProtocolVersion}, {"status", "ok"}}.dump(), "application/json");
  });
}

/// Length-prefixed JSON over TCP; one thread per connection, messages on a
/// connection handled in arrival order.
class StreamServer {
 public:
  explicit StreamServer(SessionManager& mgr) : mgr_(mgr) {}
  ~StreamServer() { stop(); }

  /// Binds and listens; port 0 picks a free port. Returns the bound port.
  int listen(const std::string& host, int port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    require(fd_ >= 0, ErrorCode::InvalidArgument, "socket() failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    require(::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) == 1, ErrorCode::InvalidArgument, "bad host " + host);
    require(::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0, ErrorCode::InvalidArgument,
            "cannot bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    require(::listen(fd_, 16) == 0, ErrorCode::InvalidArgument, "listen() failed");
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    return ntohs(addr.sin_port);
  }

  /// Accepts until stop() is called.
  void serve() {
    while (running_) {
      const int c = ::accept(fd_, nullptr, nullptr);
      if (c < 0) {
        if (!running_) break;
        continue;
      }
      std::lock_guard lk(mu_);
      clients_.push_back(c);
      workers_.emplace_back([this, c] { session_loop(c); });
    }
  }

  void stop() {
    if (!running_.exchange(false)) return;
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
    }
    std::vector<std::thread> ws;
    {
      std::lock_guard lk(mu_);
      for (int c : clients_) ::shutdown(c, SHUT_RDWR);
      ws.swap(workers_);
    }
    for (auto& t : ws)
      if (t.joinable()) t.join();
  }

 private:
  void session_loop(int c) {
    FrameDecoder dec;
    char buf[4096];
    for (;;) {
      const auto n = ::recv(c, buf, sizeof buf, 0);
      if (n <= 0) break;
      dec.feed(buf, static_cast<std::size_t>(n));
      try {
        while (auto msg = dec.next()) {
          const auto out = encode_frame(mgr_.handle_text(*msg).dump());
          if (!send_all(c, out)) goto done;
        }
      } catch (const HuntError& e) {
        send_all(c, encode_frame(nlohmann::json{{"v", kProtocolVersion}, {"kind", "error"},
                                                {"code", std::string(to_string(e.code()))}, {"message", e.what()}}
                                     .dump()));
        break;
      }
    }
  done:
    ::close(c);
  }

  static bool send_all(int c, const std::string& data) {
    std::size_t off = 0;
    while (off < data.size()) {
      const auto n = ::send(c, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n <= 0) return false;
      off += static_cast<std::size_t>(n);
    }
    return true;
  }

  SessionManager& mgr_;
  int fd_ = -1;
  std::atomic<bool> running_{true};
  std::mutex mu_;
  std::vector<int> clients_;
  std::vector<std::thread> workers_;
};

}  // namespace hunt
