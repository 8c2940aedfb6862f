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

#include "oncorag/oncorag.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "app/engine.hpp"
#include "app/settings.hpp"
#include "common/error.hpp"
#include "evalharness/experiment.hpp"
#include "json.hpp"

struct oncorag_config {
    oncorag::app::Settings settings;
};

struct oncorag_engine {
    oncorag::app::Engine engine;
};

namespace {

thread_local std::string g_last_error;

oncorag_status record(oncorag_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
oncorag_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ONCORAG_OK;
    } catch (const oncorag::Error& e) {
        return record(static_cast<oncorag_status>(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return record(ONCORAG_E_PARSE, e.what());
    } catch (const std::bad_alloc&) {
        return record(ONCORAG_E_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return record(ONCORAG_E_INTERNAL, e.what());
    } catch (...) {
        return record(ONCORAG_E_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out == nullptr) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void emit(const nlohmann::json& j, char** out) { *out = dup_string(j.dump()); }

void need(const void* p, const char* what) {
    if (p == nullptr) oncorag::fail(oncorag::ErrorCode::invalid_argument, std::string(what) + " must not be NULL");
}

nlohmann::json parse_json(const char* text, const char* what) {
    need(text, what);
    auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded()) oncorag::fail(oncorag::ErrorCode::parse, std::string(what) + " is not valid JSON");
    return j;
}

}  // namespace

extern "C" {

const char* oncorag_last_error(void) { return g_last_error.c_str(); }

const char* oncorag_status_name(oncorag_status status) {
    if (status == ONCORAG_OK) return "ok";
    return oncorag::to_string(static_cast<oncorag::ErrorCode>(status));
}

void oncorag_free(char* str) { std::free(str); }

oncorag_status oncorag_config_new(oncorag_config** out) {
    return guarded([&] {
        need(out, "out");
        *out = new oncorag_config{};
    });
}

void oncorag_config_free(oncorag_config* config) { delete config; }

oncorag_status oncorag_config_load_file(oncorag_config* config, const char* path) {
    return guarded([&] {
        need(config, "config");
        need(path, "path");
        config->settings.load_file(path);
    });
}

oncorag_status oncorag_config_apply_env(oncorag_config* config) {
    return guarded([&] {
        need(config, "config");
        config->settings.apply_env();
    });
}

oncorag_status oncorag_config_set(oncorag_config* config, const char* key, const char* value) {
    return guarded([&] {
        need(config, "config");
        need(key, "key");
        need(value, "value");
        config->settings.set(key, value);
    });
}

oncorag_status oncorag_config_get(const oncorag_config* config, const char* key, char** out) {
    return guarded([&] {
        need(config, "config");
        need(key, "key");
        need(out, "out");
        *out = dup_string(config->settings.get(key));
    });
}

oncorag_status oncorag_config_to_json(const oncorag_config* config, char** out_json) {
    return guarded([&] {
        need(config, "config");
        need(out_json, "out_json");
        emit(config->settings.to_json(), out_json);
    });
}

oncorag_status oncorag_engine_open(const oncorag_config* config, unsigned flags, oncorag_engine** out) {
    return guarded([&] {
        need(config, "config");
        need(out, "out");
        *out = new oncorag_engine{oncorag::app::Engine(config->settings, flags)};
    });
}

void oncorag_engine_close(oncorag_engine* engine) { delete engine; }

oncorag_status oncorag_engine_reload(oncorag_engine* engine) {
    return guarded([&] {
        need(engine, "engine");
        engine->engine.reload();
    });
}

oncorag_status oncorag_ingest(const oncorag_engine* engine, const char* input, const char* output, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(input, "input");
        need(output, "output");
        need(out_json, "out_json");
        emit(engine->engine.ingest(input, output), out_json);
    });
}

oncorag_status oncorag_chunk(const oncorag_engine* engine, const char* documents, const char* output,
                             char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(documents, "documents");
        need(output, "output");
        need(out_json, "out_json");
        emit(engine->engine.chunk(documents, output), out_json);
    });
}

oncorag_status oncorag_index_build(const oncorag_engine* engine, const char* chunks, const char* index,
                                   char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(chunks, "chunks");
        need(index, "index");
        need(out_json, "out_json");
        emit(engine->engine.build_index(chunks, index), out_json);
    });
}

oncorag_status oncorag_kg_load(const oncorag_engine* engine, const char* tsv, const char* output, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(tsv, "tsv");
        need(out_json, "out_json");
        emit(engine->engine.kg_load(tsv, output ? output : ""), out_json);
    });
}

oncorag_status oncorag_kg_train(const oncorag_engine* engine, const char* output, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(out_json, "out_json");
        emit(engine->engine.kg_train(output ? output : ""), out_json);
    });
}

oncorag_status oncorag_kg_link(const oncorag_engine* engine, const char* mention, size_t m, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(mention, "mention");
        need(out_json, "out_json");
        emit(engine->engine.link(mention, m == 0 ? std::nullopt : std::optional<std::size_t>(m)), out_json);
    });
}

oncorag_status oncorag_query(const oncorag_engine* engine, const char* request_json, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(out_json, "out_json");
        emit(engine->engine.query(parse_json(request_json, "request")), out_json);
    });
}

oncorag_status oncorag_answer(const oncorag_engine* engine, const char* request_json, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(out_json, "out_json");
        emit(engine->engine.answer(parse_json(request_json, "request")), out_json);
    });
}

oncorag_status oncorag_dataset_build(const oncorag_engine* engine, const char* inputs_json, const char* task,
                                     const char* language, const char* output, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(task, "task");
        need(language, "language");
        need(output, "output");
        need(out_json, "out_json");
        const auto arr = parse_json(inputs_json, "inputs");
        if (!arr.is_array()) oncorag::fail(oncorag::ErrorCode::parse, "inputs must be a JSON array of paths");
        std::vector<std::filesystem::path> inputs;
        for (const auto& p : arr) inputs.emplace_back(p.get<std::string>());
        emit(engine->engine.dataset_build(inputs, task, language, output), out_json);
    });
}

oncorag_status oncorag_dataset_sample(const oncorag_engine* engine, const char* input, size_t n, const char* language,
                                      const char* output, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(input, "input");
        need(language, "language");
        need(output, "output");
        need(out_json, "out_json");
        emit(engine->engine.dataset_sample(input, n, language, output), out_json);
    });
}

oncorag_status oncorag_eval_run(const oncorag_engine* engine, const char* experiment_json, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(out_json, "out_json");
        emit(engine->engine.eval(parse_json(experiment_json, "experiment")), out_json);
    });
}

oncorag_status oncorag_reports_csv(const char* reports_json, char** out_csv) {
    return guarded([&] {
        need(out_csv, "out_csv");
        const auto arr = parse_json(reports_json, "reports");
        if (!arr.is_array()) oncorag::fail(oncorag::ErrorCode::parse, "reports must be a JSON array");
        std::vector<oncorag::evalharness::MetricReport> reports;
        for (const auto& r : arr) reports.push_back(oncorag::evalharness::report_from_json(r));
        *out_csv = dup_string(oncorag::evalharness::reports_to_csv(reports));
    });
}

oncorag_status oncorag_health(const oncorag_engine* engine, char** out_json) {
    return guarded([&] {
        need(engine, "engine");
        need(out_json, "out_json");
        emit(engine->engine.health(), out_json);
    });
}

}  // extern "C"
