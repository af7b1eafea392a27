#pragma once

// Newline-delimited JSON scorer protocol: the client-side Scorer, an
// endpoint that serves any Scorer, and a small TCP transport.

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstring>
#include <functional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "slicekit/error.hpp"
#include "slicekit/scorer.hpp"

namespace slicekit {

using Transport = std::function<std::string(const std::string&)>;

// Serves one request line at a time. Failures become error responses.
class ProtocolEndpoint {
 public:
  explicit ProtocolEndpoint(Scorer& scorer) : scorer_(scorer) {}

  std::string handle(const std::string& line) {
    using nlohmann::json;
    try {
      json msg = json::parse(line);
      if (!msg.is_object() || !msg.contains("type")) return error("message has no type");
      std::string type = msg.at("type").get<std::string>();
      if (type == "session") {
        auto input = msg.at("input_ids").get<std::vector<int>>();
        auto allowed = msg.at("allowed_ids").get<std::vector<int>>();
        std::string text = msg.value("input_text", std::string());
        std::int64_t id = scorer_.session(input, allowed, text);
        open_.insert(id);
        return json{{"type", "ok"}, {"session", id}}.dump();
      }
      if (type == "step") {
        std::int64_t id = msg.at("session").get<std::int64_t>();
        if (!open_.count(id)) return error("unknown session " + std::to_string(id));
        auto prefixes = msg.at("prefixes").get<std::vector<std::vector<int>>>();
        json items = json::array();
        for (const auto& v : scorer_.step(id, prefixes)) {
          json row = json::array();
          for (const auto& s : v) row.push_back({{"id", s.id}, {"logprob", s.logprob}});
          items.push_back(std::move(row));
        }
        return json{{"type", "scores"}, {"items", std::move(items)}}.dump();
      }
      if (type == "close") {
        std::int64_t id = msg.at("session").get<std::int64_t>();
        if (!open_.erase(id)) return error("unknown session " + std::to_string(id));
        scorer_.close(id);
        return json{{"type", "ok"}, {"session", id}}.dump();
      }
      return error("unknown message type '" + type + "'");
    } catch (const std::exception& e) {
      return error(e.what());
    }
  }

 private:
  static std::string error(const std::string& detail) {
    return nlohmann::json{{"type", "error"}, {"detail", detail}}.dump();
  }

  Scorer& scorer_;
  std::set<std::int64_t> open_;
};

// Scorer speaking the protocol over a request/response transport. Replies
// are validated: they must cover exactly the session's allowed ids.
class ProtocolScorer final : public Scorer {
 public:
  explicit ProtocolScorer(Transport transport) : transport_(std::move(transport)) {}

  std::int64_t session(const std::vector<int>& input_ids, const std::vector<int>& allowed_ids,
                       std::string_view input_text) override {
    nlohmann::json msg{{"type", "session"},
                       {"input_ids", input_ids},
                       {"allowed_ids", allowed_ids},
                       {"input_text", std::string(input_text)}};
    auto reply = call(msg, "ok");
    std::int64_t id = reply.at("session").get<std::int64_t>();
    allowed_[id] = std::set<int>(allowed_ids.begin(), allowed_ids.end());
    return id;
  }

  std::vector<ScoreVector> step(std::int64_t session,
                                const std::vector<std::vector<int>>& prefixes) override {
    auto it = allowed_.find(session);
    if (it == allowed_.end()) throw Error(ErrorCode::protocol, "unknown session " + std::to_string(session));
    nlohmann::json msg{{"type", "step"}, {"session", session}, {"prefixes", prefixes}};
    auto reply = call(msg, "scores");
    const auto& items = reply.at("items");
    if (!items.is_array() || items.size() != prefixes.size()) {
      throw Error(ErrorCode::protocol, "expected " + std::to_string(prefixes.size()) + " score rows");
    }
    std::vector<ScoreVector> out;
    out.reserve(items.size());
    for (const auto& row : items) {
      ScoreVector v;
      v.reserve(row.size());
      std::set<int> seen;
      for (const auto& e : row) {
        TokenScore s{e.at("id").get<int>(), e.at("logprob").get<double>()};
        if (!it->second.count(s.id)) {
          throw Error(ErrorCode::protocol, "score for id " + std::to_string(s.id) + " outside the allowed set");
        }
        if (!seen.insert(s.id).second) throw Error(ErrorCode::protocol, "duplicate id " + std::to_string(s.id));
        if (std::isnan(s.logprob)) throw Error(ErrorCode::protocol, "NaN score");
        v.push_back(s);
      }
      if (seen.size() != it->second.size()) throw Error(ErrorCode::protocol, "scores do not cover the allowed set");
      out.push_back(std::move(v));
    }
    return out;
  }

  void close(std::int64_t session) override {
    allowed_.erase(session);
    call(nlohmann::json{{"type", "close"}, {"session", session}}, "ok");
  }

 private:
  nlohmann::json call(const nlohmann::json& msg, const char* expect) {
    std::string line = transport_(msg.dump());
    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::protocol, std::string("malformed reply: ") + e.what());
    }
    std::string type = reply.value("type", std::string());
    if (type == "error") throw Error(ErrorCode::protocol, reply.value("detail", std::string("error")));
    if (type != expect) throw Error(ErrorCode::protocol, "expected '" + std::string(expect) + "', got '" + type + "'");
    return reply;
  }

  Transport transport_;
  std::map<std::int64_t, std::set<int>> allowed_;
};

namespace detail {

inline void send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n <= 0) throw Error(ErrorCode::io, std::string("send: ") + std::strerror(errno));
    off += static_cast<std::size_t>(n);
  }
}

// Line reader over a socket; keeps bytes past the newline for the next call.
class LineReader {
 public:
  explicit LineReader(int fd) : fd_(fd) {}

  bool read_line(std::string& line) {
    for (;;) {
      std::size_t nl = buf_.find('\n');
      if (nl != std::string::npos) {
        line = buf_.substr(0, nl);
        buf_.erase(0, nl + 1);
        return true;
      }
      char chunk[65536];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return false;
      buf_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  int fd_;
  std::string buf_;
};

}  // namespace detail

// Client connection; each call sends one line and waits for one line.
class TcpTransport {
 public:
  TcpTransport(const std::string& host, int port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res);
    if (rc != 0) throw Error(ErrorCode::io, "resolve " + host + ": " + ::gai_strerror(rc));
    for (addrinfo* p = res; p; p = p->ai_next) {
      int fd = ::socket(p->ai_family, p->ai_socktype, p->ai_protocol);
      if (fd < 0) continue;
      if (::connect(fd, p->ai_addr, p->ai_addrlen) == 0) {
        fd_ = fd;
        break;
      }
      ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw Error(ErrorCode::io, "cannot connect to " + host + ":" + std::to_string(port));
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    reader_ = std::make_unique<detail::LineReader>(fd_);
  }
  TcpTransport(const TcpTransport&) = delete;
  TcpTransport& operator=(const TcpTransport&) = delete;
  ~TcpTransport() {
    if (fd_ >= 0) ::close(fd_);
  }

  std::string operator()(const std::string& request) {
    detail::send_all(fd_, request + "\n");
    std::string line;
    if (!reader_->read_line(line)) throw Error(ErrorCode::io, "connection closed by scorer");
    return line;
  }

 private:
  int fd_ = -1;
  std::unique_ptr<detail::LineReader> reader_;
};

// "proto://HOST:PORT" -> (host, port).
inline std::pair<std::string, int> parse_proto_url(std::string_view url) {
  constexpr std::string_view scheme = "proto://";
  if (url.substr(0, scheme.size()) != scheme) {
    throw Error(ErrorCode::invalid_argument, "scorer url must start with proto://");
  }
  std::string_view rest = url.substr(scheme.size());
  std::size_t colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == rest.size()) {
    throw Error(ErrorCode::invalid_argument, "scorer url needs HOST:PORT");
  }
  int port = 0;
  for (char c : rest.substr(colon + 1)) {
    if (c < '0' || c > '9') throw Error(ErrorCode::invalid_argument, "bad port in scorer url");
    port = port * 10 + (c - '0');
    if (port > 65535) throw Error(ErrorCode::invalid_argument, "bad port in scorer url");
  }
  return {std::string(rest.substr(0, colon)), port};
}

inline std::unique_ptr<ProtocolScorer> connect_scorer(std::string_view url) {
  auto [host, port] = parse_proto_url(url);
  auto conn = std::make_shared<TcpTransport>(host, port);
  return std::make_unique<ProtocolScorer>([conn](const std::string& req) { return (*conn)(req); });
}

// Loopback server running an endpoint per connection, one connection at a
// time. Used by tests and local tooling.
class TcpScorerServer {
 public:
  explicit TcpScorerServer(Scorer& scorer) : scorer_(scorer) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw Error(ErrorCode::io, "socket failed");
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 4) != 0) {
      ::close(fd_);
      throw Error(ErrorCode::io, "cannot listen on loopback");
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    thread_ = std::thread([this] { serve(); });
  }
  TcpScorerServer(const TcpScorerServer&) = delete;
  TcpScorerServer& operator=(const TcpScorerServer&) = delete;
  ~TcpScorerServer() {
    stop_ = true;
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "proto://127.0.0.1:" + std::to_string(port_); }

 private:
  void serve() {
    while (!stop_) {
      int client = ::accept(fd_, nullptr, nullptr);
      if (client < 0) return;
      int one = 1;
      ::setsockopt(client, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      ProtocolEndpoint endpoint(scorer_);
      detail::LineReader reader(client);
      std::string line;
      try {
        while (!stop_ && reader.read_line(line)) detail::send_all(client, endpoint.handle(line) + "\n");
      } catch (const Error&) {
      }
      ::close(client);
    }
  }

  Scorer& scorer_;
  int fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stop_{false};
  std::thread thread_;
};

}  // namespace slicekit
