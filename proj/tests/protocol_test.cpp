#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "slicekit/slicekit.hpp"
#include "support/decode_fixtures.hpp"

using namespace slicekit;
using nlohmann::json;

namespace {

json ask(ProtocolEndpoint& ep, const json& msg) { return json::parse(ep.handle(msg.dump())); }

std::vector<int> range(int lo, int hi) {
  std::vector<int> v;
  for (int i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

// Endpoint whose step replies are rewritten before the client sees them.
Transport tampered(ProtocolEndpoint& ep, std::function<void(json&)> edit) {
  return [&ep, edit](const std::string& req) {
    json reply = json::parse(ep.handle(req));
    if (reply["type"] == "scores") edit(reply);
    return reply.dump();
  };
}

int outside_tokens(const DecodeResult& r, const SliceQuery& q, const Tokenizer& tok) {
  auto allowed = allowed_tokens(format_sft_input(q), tok);
  int n = 0;
  for (int id : r.ids) n += allowed.contains(id) ? 0 : 1;
  return n;
}

}  // namespace

TEST(Endpoint, SessionStepClose) {
  CharTokenizer tok;
  MockCopyScorer mock(tok, tok.encode("abc"), 0.0, NoiseKind::reorder, 1);
  ProtocolEndpoint ep(mock);
  auto allowed = range(90, 110);
  auto ok = ask(ep, {{"type", "session"}, {"input_ids", {97, 98, 99}}, {"allowed_ids", allowed}});
  ASSERT_EQ(ok["type"], "ok");
  auto id = ok["session"].get<std::int64_t>();
  auto scores = ask(ep, {{"type", "step"}, {"session", id}, {"prefixes", {{97, 98, 99}}}});
  ASSERT_EQ(scores["type"], "scores");
  ASSERT_EQ(scores["items"].size(), 1u);
  ASSERT_EQ(scores["items"][0].size(), allowed.size());
  std::set<int> ids;
  for (const auto& e : scores["items"][0]) ids.insert(e["id"].get<int>());
  EXPECT_EQ(ids, std::set<int>(allowed.begin(), allowed.end()));
  EXPECT_EQ(ask(ep, {{"type", "close"}, {"session", id}})["type"], "ok");
}

TEST(Endpoint, ErrorsKeepTheEndpointAlive) {
  CharTokenizer tok;
  MockCopyScorer mock(tok, {}, 0.0, NoiseKind::reorder, 1);
  ProtocolEndpoint ep(mock);
  EXPECT_EQ(ask(ep, {{"type", "close"}, {"session", 42}})["type"], "error");
  EXPECT_EQ(ask(ep, {{"type", "step"}, {"session", 42}, {"prefixes", json::array()}})["type"], "error");
  EXPECT_EQ(ask(ep, {{"type", "launch"}})["type"], "error");
  EXPECT_EQ(ask(ep, {{"session", 1}})["type"], "error");
  EXPECT_EQ(json::parse(ep.handle("{not json"))["type"], "error");
  EXPECT_EQ(ask(ep, {{"type", "session"}, {"input_ids", "oops"}})["type"], "error");
  auto ok = ask(ep, {{"type", "session"}, {"input_ids", {1}}, {"allowed_ids", {1, 2}}});
  EXPECT_EQ(ok["type"], "ok");
  auto err = ask(ep, {{"type", "close"}, {"session", 42}});
  EXPECT_TRUE(err.contains("detail"));
}

TEST(Client, RejectsRepliesOutsideTheContract) {
  CharTokenizer tok;
  MockCopyScorer mock(tok, {}, 0.0, NoiseKind::reorder, 1);
  ProtocolEndpoint ep(mock);
  auto run = [&](std::function<void(json&)> edit) {
    ProtocolScorer client(tampered(ep, edit));
    auto s = client.session({1}, {65, 66, 67}, "ABC");
    client.step(s, {{65}});
  };
  EXPECT_NO_THROW(run([](json&) {}));
  EXPECT_THROW(run([](json& r) { r["items"][0][0]["id"] = 300; }), Error);
  EXPECT_THROW(run([](json& r) { r["items"][0][1]["id"] = r["items"][0][0]["id"]; }), Error);
  EXPECT_THROW(run([](json& r) { r["items"][0].erase(0); }), Error);
  EXPECT_THROW(run([](json& r) { r["items"].push_back(r["items"][0]); }), Error);
  EXPECT_THROW(run([](json& r) { r = {{"type", "ok"}}; }), Error);
}

TEST(Client, ServerErrorsSurfaceAsProtocolErrors) {
  ProtocolScorer client([](const std::string&) { return std::string(R"({"type":"error","detail":"boom"})"); });
  try {
    client.session({1}, {1}, "");
    FAIL() << "expected protocol error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::protocol);
    EXPECT_NE(std::string(e.what()).find("boom"), std::string::npos);
  }
  ProtocolScorer garbled([](const std::string&) { return std::string("<html>"); });
  EXPECT_THROW(garbled.session({1}, {1}, ""), Error);
}

TEST(Client, UnnormalizedLogitsDecodeTheSame) {
  CharTokenizer tok;
  for (const auto& f : testkit::decode_fixtures(21, 10)) {
    auto target = testkit::gold_ids(tok, f.gold);
    MockCopyScorer a(tok, target, 0.3, NoiseKind::reorder, 4);
    MockCopyScorer b(tok, target, 0.3, NoiseKind::reorder, 4);
    ProtocolEndpoint ep(b);
    ProtocolScorer shifted(tampered(ep, [](json& r) {
      for (auto& row : r["items"]) {
        for (auto& e : row) e["logprob"] = e["logprob"].get<double>() + 7.5;
      }
    }));
    EXPECT_EQ(constrained_beam_search(f.query, a, tok).ids, constrained_beam_search(f.query, shifted, tok).ids);
  }
}

TEST(Url, Parsing) {
  EXPECT_EQ(parse_proto_url("proto://127.0.0.1:9000"), (std::pair<std::string, int>{"127.0.0.1", 9000}));
  EXPECT_EQ(parse_proto_url("proto://scorer.local:1"), (std::pair<std::string, int>{"scorer.local", 1}));
  for (auto bad : {"http://x:1", "proto://x", "proto://:1", "proto://x:", "proto://x:99999", "proto://x:8a"}) {
    EXPECT_THROW(parse_proto_url(bad), Error) << bad;
  }
}

TEST(Tcp, EndToEndMatchesInProcess) {
  CharTokenizer tok;
  auto fx = testkit::decode_fixtures(22, 20);
  for (std::size_t i = 0; i < fx.size(); ++i) {
    const auto& f = fx[i];
    auto target = testkit::gold_ids(tok, f.gold);
    MockCopyScorer local(tok, target, 0.3, NoiseKind::out_of_input, i);
    MockCopyScorer served(tok, target, 0.3, NoiseKind::out_of_input, i);
    TcpScorerServer server(served);
    auto remote = connect_scorer(server.url());
    auto want = constrained_beam_search(f.query, local, tok);
    auto got = constrained_beam_search(f.query, *remote, tok);
    EXPECT_EQ(got.ids, want.ids) << f.id;
    EXPECT_EQ(outside_tokens(got, f.query, tok), 0) << f.id;
  }
}

TEST(Tcp, ServerSurvivesBadRequests) {
  CharTokenizer tok;
  MockCopyScorer mock(tok, tok.encode("1: a = 1"), 0.0, NoiseKind::reorder, 1);
  TcpScorerServer server(mock);
  auto [host, port] = parse_proto_url(server.url());
  TcpTransport conn(host, port);
  EXPECT_EQ(json::parse(conn("{\"type\":\"close\",\"session\":7}"))["type"], "error");
  EXPECT_EQ(json::parse(conn("garbage"))["type"], "error");
  auto ok = json::parse(conn(R"({"type":"session","input_ids":[1],"allowed_ids":[49,58]})"));
  EXPECT_EQ(ok["type"], "ok");
}

TEST(Tcp, ConnectFailureIsReported) {
  int port = 0;
  {
    CharTokenizer tok;
    MockCopyScorer mock(tok, {}, 0.0, NoiseKind::reorder, 1);
    TcpScorerServer server(mock);
    port = server.port();
  }
  EXPECT_THROW(connect_scorer("proto://127.0.0.1:" + std::to_string(port)), Error);
}
