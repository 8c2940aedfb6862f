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

#include <atomic>
#include <cstdio>
#include <iostream>

#include "handles.hpp"
#include "httplib.h"
#include "json.hpp"

namespace oncorag_cli {

namespace {

std::atomic<unsigned long> g_error_seq{0};

void reply_error(httplib::Response& res, oncorag_status status, const std::string& message) {
    nlohmann::json body = {{"error", message}, {"status", oncorag_status_name(status)}};
    if (status == ONCORAG_E_INVALID_ARGUMENT || status == ONCORAG_E_PARSE) {
        res.status = 400;
    } else if (status == ONCORAG_E_NOT_FOUND) {
        res.status = 404;
    } else {
        char id[32];
        std::snprintf(id, sizeof id, "err-%06lu", ++g_error_seq);
        body["error_id"] = id;
        res.status = 500;
        std::cerr << "[" << id << "] " << message << "\n";
    }
    res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void respond(httplib::Response& res, Fn&& fn) {
    try {
        res.set_content(call_json(fn), "application/json");
        res.status = 200;
    } catch (const ApiError& e) {
        reply_error(res, e.status, e.what());
    } catch (const std::exception& e) {
        reply_error(res, ONCORAG_E_INTERNAL, e.what());
    }
}

}  // namespace

int serve(const oncorag_engine* engine, oncorag_engine* mutable_engine, const std::string& host, int port) {
    httplib::Server server;

    server.Post("/query", [&](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&](char** out) { return oncorag_query(engine, req.body.c_str(), out); });
    });
    server.Post("/answer", [&](const httplib::Request& req, httplib::Response& res) {
        respond(res, [&](char** out) { return oncorag_answer(engine, req.body.c_str(), out); });
    });
    server.Post("/kg/link", [&](const httplib::Request& req, httplib::Response& res) {
        auto body = nlohmann::json::parse(req.body, nullptr, false);
        if (body.is_discarded() || !body.is_object() || !body.contains("mention") || !body["mention"].is_string()) {
            reply_error(res, ONCORAG_E_PARSE, "body must be {\"mention\": string, \"m\": integer?}");
            return;
        }
        std::size_t m = 0;
        if (body.contains("m")) {
            if (!body["m"].is_number_unsigned() || body["m"].get<std::size_t>() == 0) {
                reply_error(res, ONCORAG_E_INVALID_ARGUMENT, "m must be a positive integer");
                return;
            }
            m = body["m"].get<std::size_t>();
        }
        const auto mention = body["mention"].get<std::string>();
        respond(res, [&](char** out) { return oncorag_kg_link(engine, mention.c_str(), m, out); });
    });
    server.Get("/healthz", [&](const httplib::Request&, httplib::Response& res) {
        respond(res, [&](char** out) { return oncorag_health(engine, out); });
    });
    server.Post("/admin/reload", [&](const httplib::Request&, httplib::Response& res) {
        respond(res, [&](char** out) {
            const auto status = oncorag_engine_reload(mutable_engine);
            if (status != ONCORAG_OK) return status;
            return oncorag_health(engine, out);
        });
    });

    int bound = port;
    if (port == 0) {
        bound = server.bind_to_any_port(host);
    } else if (!server.bind_to_port(host, port)) {
        bound = -1;
    }
    if (bound < 0) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 2;
    }
    std::cout << "listening " << host << ":" << bound << std::endl;
    return server.listen_after_bind() ? 0 : 2;
}

}  // namespace oncorag_cli
