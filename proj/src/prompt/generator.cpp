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

#include "prompt/generator.hpp"

#include <chrono>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"
#include "json.hpp"

namespace oncorag::prompt {

std::string input_hash(std::string_view input) { return text::hex64(text::fnv1a64(input)); }

StubGenerator StubGenerator::load(const std::filesystem::path& fixtures) {
    StubGenerator gen;
    io::for_each_jsonl(fixtures, [&](std::size_t line, const nlohmann::json& obj) {
        try {
            gen.add(task_from_string(obj.at("task").get<std::string>()), obj.at("input_hash").get<std::string>(),
                    obj.at("text").get<std::string>());
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::parse, fixtures.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return gen;
}

void StubGenerator::add(TaskKind task, std::string hash, std::string text) {
    fixtures_[{to_string(task), std::move(hash)}] = std::move(text);
}

GenerationResponse StubGenerator::generate(const GenerationRequest& request) const {
    const std::string hash = input_hash(request.input);
    const auto it = fixtures_.find({to_string(request.task), hash});
    if (it == fixtures_.end()) {
        fail(ErrorCode::not_found, std::string("no stub fixture for task ") + to_string(request.task) + ", input_hash " + hash);
    }
    return {it->second, 0.0, "stub", request.correlation_id};
}

HttpGenerator::HttpGenerator(std::string endpoint, http::PostOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    if (endpoint_.empty()) fail(ErrorCode::invalid_argument, "generator endpoint is empty");
}

GenerationResponse HttpGenerator::generate(const GenerationRequest& request) const {
    const nlohmann::json body = {
        {"prompt", request.prompt}, {"max_tokens", request.max_tokens}, {"temperature", request.temperature}};
    const auto start = std::chrono::steady_clock::now();
    const std::string raw = http::post_json(endpoint_, body.dump(), options_);
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::transport, std::string("generator returned invalid JSON: ") + e.what());
    }
    if (!response.is_object() || !response.contains("text") || !response["text"].is_string()) {
        fail(ErrorCode::transport, "generator response lacks a string \"text\"");
    }
    return {response["text"].get<std::string>(), elapsed, endpoint_, request.correlation_id};
}

}  // namespace oncorag::prompt
