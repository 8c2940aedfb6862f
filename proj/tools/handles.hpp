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

#include <memory>
#include <stdexcept>
#include <string>

#include "oncorag/oncorag.h"

namespace oncorag_cli {

// Carries a failed C API status up to main().
struct ApiError : std::runtime_error {
    oncorag_status status;
    ApiError(oncorag_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

inline void check(oncorag_status status) {
    if (status != ONCORAG_OK) throw ApiError(status, oncorag_last_error());
}

struct ConfigDeleter {
    void operator()(oncorag_config* c) const { oncorag_config_free(c); }
};
struct EngineDeleter {
    void operator()(oncorag_engine* e) const { oncorag_engine_close(e); }
};
using ConfigPtr = std::unique_ptr<oncorag_config, ConfigDeleter>;
using EnginePtr = std::unique_ptr<oncorag_engine, EngineDeleter>;

// Takes ownership of a string returned by the library.
inline std::string take(char* s) {
    std::string out = s ? s : "";
    oncorag_free(s);
    return out;
}

inline std::string config_get(const oncorag_config* config, const char* key) {
    char* out = nullptr;
    check(oncorag_config_get(config, key, &out));
    return take(out);
}

// Runs a JSON-returning call and hands back its result.
template <typename Fn>
std::string call_json(Fn&& fn) {
    char* out = nullptr;
    check(fn(&out));
    return take(out);
}

int serve(const oncorag_engine* engine, oncorag_engine* mutable_engine, const std::string& host, int port);

}  // namespace oncorag_cli
