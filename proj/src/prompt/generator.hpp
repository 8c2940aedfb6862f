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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "common/http.hpp"
#include "prompt/tasks.hpp"

namespace oncorag::prompt {

struct GenerationRequest {
    TaskKind task = TaskKind::ner_bio;
    std::string input;   // raw example input; keys stub fixtures
    std::string prompt;  // rendered prompt sent to a live service
    int max_tokens = 512;
    double temperature = 0.0;
    std::uint64_t correlation_id = 0;
};

struct GenerationResponse {
    std::string text;
    double latency_ms = 0.0;
    std::string provider;
    std::uint64_t correlation_id = 0;
};

// FNV-1a-64 of the input, as 16 hex digits.
std::string input_hash(std::string_view input);

class Generator {
public:
    virtual ~Generator() = default;
    virtual GenerationResponse generate(const GenerationRequest& request) const = 0;
};

// Canned responses from JSONL rows {"task", "input_hash", "text"}.
class StubGenerator final : public Generator {
public:
    StubGenerator() = default;
    static StubGenerator load(const std::filesystem::path& fixtures);

    void add(TaskKind task, std::string hash, std::string text);
    std::size_t size() const noexcept { return fixtures_.size(); }

    GenerationResponse generate(const GenerationRequest& request) const override;

private:
    std::map<std::pair<std::string, std::string>, std::string> fixtures_;
};

// POSTs {"prompt", "max_tokens", "temperature"} and reads {"text"}.
class HttpGenerator final : public Generator {
public:
    HttpGenerator(std::string endpoint, http::PostOptions options);

    GenerationResponse generate(const GenerationRequest& request) const override;

private:
    std::string endpoint_;
    http::PostOptions options_;
};

}  // namespace oncorag::prompt
