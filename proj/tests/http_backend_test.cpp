#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <thread>

// Eigen must precede httplib: resolv.h (pulled in by httplib) defines a
// macro named _res that mangles Eigen's product kernels.
#include "chroma/colorlib.hpp"
#include "chroma/error.hpp"
#include "chroma/estimator.hpp"
#include "chroma/http_backend.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

using namespace chroma;
using nlohmann::json;

namespace {

// Minimal OpenAI-shaped chat-completions server on loopback.
class FakeServer {
 public:
  FakeServer() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                httplib::Response& res) {
      last_auth = req.get_header_value("Authorization");
      json body;
      try {
        body = json::parse(req.body);
      } catch (...) {
        res.status = 400;
        return;
      }
      last_request = body;
      if (!body.contains("model") || !body.contains("messages") ||
          body["messages"].size() != 2 || body["messages"][0]["role"] != "system" ||
          body["messages"][1]["role"] != "user") {
        res.status = 400;
        return;
      }
      const json reply = {
          {"choices",
           json::array({json{{"message", json{{"role", "assistant"},
                                               {"content", content}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/flaky", [this](const httplib::Request& req, httplib::Response& res) {
      if (fails_left.fetch_sub(1) > 0) {
        res.status = 500;
        res.set_content("try later", "text/plain");
        return;
      }
      // same handler as the happy path once the failures run out
      json body = json::parse(req.body);
      const json reply = {
          {"choices",
           json::array({json{{"message", json{{"content", content}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    server_.Post("/teapot", [](const httplib::Request&, httplib::Response& res) {
      res.status = 418;
      res.set_content("no", "text/plain");
    });
    server_.Post("/garbled", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("this is not json", "application/json");
    });

    port_ = server_.bind_to_any_port("127.0.0.1");
    REQUIRE(port_ > 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FakeServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

  std::string content = "0.417";
  std::string last_auth;
  json last_request;
  std::atomic<int> fails_left{0};

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_CASE("http backend round trip") {
  FakeServer server;
  auto backend = make_http_backend({server.url("/v1/chat/completions"), "sk-test"});
  const std::string raw = backend->complete("gpt-4", 0.0, "system text", "user text");
  CHECK(raw == "0.417");
  CHECK(server.last_auth == "Bearer sk-test");
  CHECK(server.last_request["model"] == "gpt-4");
  CHECK(server.last_request["temperature"] == 0.0);
  CHECK(server.last_request["messages"][0]["content"] == "system text");
  CHECK(server.last_request["messages"][1]["content"] == "user text");
  CHECK_FALSE(backend->capabilities().deterministic_at_zero);
}

TEST_CASE("http backend error classification") {
  FakeServer server;

  SUBCASE("server errors are retryable") {
    server.fails_left = 1000;
    auto backend = make_http_backend({server.url("/flaky"), "k"});
    try {
      backend->complete("m", 0.0, "s", "u");
      FAIL("expected TransportError");
    } catch (const TransportError& e) {
      CHECK(e.retryable());
      CHECK(std::string(e.what()).find("500") != std::string::npos);
    }
  }

  SUBCASE("client errors are not retryable") {
    auto backend = make_http_backend({server.url("/teapot"), "k"});
    try {
      backend->complete("m", 0.0, "s", "u");
      FAIL("expected TransportError");
    } catch (const TransportError& e) {
      CHECK_FALSE(e.retryable());
    }
  }

  SUBCASE("malformed payloads are retryable transport errors") {
    auto backend = make_http_backend({server.url("/garbled"), "k"});
    CHECK_THROWS_AS(backend->complete("m", 0.0, "s", "u"), TransportError);
  }

  SUBCASE("connection refused surfaces as a retryable error") {
    auto backend = make_http_backend({"http://127.0.0.1:1/nope", "k"});
    CHECK_THROWS_AS(backend->complete("m", 0.0, "s", "u"), TransportError);
  }
}

TEST_CASE("estimate_distribution retries through transient failures") {
  FakeServer server;
  server.content = "0.600";
  server.fails_left = 2;  // within one color's three-attempt budget
  auto backend = make_http_backend({server.url("/flaky"), "k"});

  const ColorLibrary lib = generate_grid_library(
      25.0, {50.0}, [](const LabColor&) { return true; }, 25.0);
  REQUIRE(lib.size() == 9);

  EstimateOptions opts;
  opts.retry.max_attempts = 3;
  opts.retry.initial_delay = std::chrono::milliseconds{1};
  opts.parallelism = 1;  // deterministic failure layout
  const EstimateResult res = estimate_distribution(
      RatingProtocol::single_deterministic(), "apple", lib, *backend, opts);
  for (int i = 0; i < 9; ++i) CHECK(res.distribution.values[i] == 0.6);
  int retried = 0;
  for (const auto& rec : res.records) retried += rec.attempts > 1;
  CHECK(retried > 0);
}

TEST_CASE("http_config_from_env") {
  unsetenv("CHROMA_ASSOC_API_URL");
  unsetenv("CHROMA_ASSOC_API_KEY");
  CHECK_THROWS_AS(http_config_from_env(), ConfigError);
  setenv("CHROMA_ASSOC_API_URL", "http://example.test/v1/chat/completions", 1);
  CHECK_THROWS_AS(http_config_from_env(), ConfigError);
  setenv("CHROMA_ASSOC_API_KEY", "sk-abc", 1);
  const HttpBackendConfig cfg = http_config_from_env();
  CHECK(cfg.url == "http://example.test/v1/chat/completions");
  CHECK(cfg.api_key == "sk-abc");
  unsetenv("CHROMA_ASSOC_API_URL");
  unsetenv("CHROMA_ASSOC_API_KEY");
}
