/*
 * Copyright 2026 The OncoRAG Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <catch_amalgamated.hpp>

#include <atomic>
#include <chrono>
#include <thread>

#include "common/error.hpp"
#include "common/http.hpp"
#include "embed/embed.hpp"
#include "httplib.h"
#include "json.hpp"
#include "prompt/generator.hpp"

using namespace oncorag;
using nlohmann::json;

namespace {

// httplib server on a free loopback port, stopped on destruction.
class LocalServer {
public:
    explicit LocalServer(httplib::Server::Handler handler) {
        server_.Post("/", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~LocalServer() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/"; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

}  // namespace

TEST_CASE("external embedder posts texts and reads vectors", "[live]") {
    std::atomic<int> calls{0};
    LocalServer srv([&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = json::parse(req.body);
        json vectors = json::array();
        for (std::size_t i = 0; i < body["texts"].size(); ++i) {
            json v = json::array();
            for (int d = 0; d < 8; ++d) v.push_back(d == static_cast<int>(i) ? 3.0 : 0.0);
            vectors.push_back(v);
        }
        res.set_content(json{{"vectors", vectors}}.dump(), "application/json");
    });
    embed::EmbedderSpec spec;
    spec.kind = embed::EmbedderKind::external;
    spec.dim = 8;
    spec.endpoint = srv.url();
    const auto e = embed::make_embedder(spec);
    const std::vector<std::string> texts = {"a", "b"};
    const auto out = e->embed_batch(texts);
    REQUIRE(out.size() == 2);
    CHECK(out[1].values[1] != 0.0);
    CHECK(calls == 1);

    spec.dim = 16;
    CHECK_THROWS_AS(embed::make_embedder(spec)->embed("a"), Error);
}

TEST_CASE("http generator round trip", "[live]") {
    json seen;
    LocalServer srv([&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        res.set_content(R"({"text":"Neutral"})", "application/json");
    });
    prompt::HttpGenerator gen(srv.url(), {2000, 0});
    prompt::GenerationRequest req;
    req.prompt = "P";
    req.max_tokens = 7;
    const auto r = gen.generate(req);
    CHECK(r.text == "Neutral");
    CHECK(seen["prompt"] == "P");
    CHECK(seen["max_tokens"] == 7);
    CHECK(seen["temperature"] == 0.0);
}

TEST_CASE("timeout with retries=2 makes three attempts then fails", "[live]") {
    std::atomic<int> calls{0};
    LocalServer srv([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        std::this_thread::sleep_for(std::chrono::milliseconds(400));
        res.set_content("{}", "application/json");
    });
    try {
        http::post_json(srv.url(), "{}", {100, 2});
        FAIL("expected a transport error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::transport);
    }
    CHECK(calls == 3);
}

TEST_CASE("non-2xx responses are retried and surface as transport errors", "[live]") {
    std::atomic<int> calls{0};
    LocalServer srv([&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.status = 503;
    });
    prompt::HttpGenerator gen(srv.url(), {1000, 1});
    try {
        gen.generate({});
        FAIL("expected a transport error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::transport);
    }
    CHECK(calls == 2);
}
