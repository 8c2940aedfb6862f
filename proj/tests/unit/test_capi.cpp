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

#include <cstdlib>
#include <fstream>
#include <string>

#include "json.hpp"
#include "oncorag/oncorag.h"
#include "support.hpp"

using nlohmann::json;

namespace {

std::string take(char* s) {
    std::string out = s != nullptr ? s : "";
    oncorag_free(s);
    return out;
}

std::string get(const oncorag_config* c, const char* key) {
    char* out = nullptr;
    REQUIRE(oncorag_config_get(c, key, &out) == ONCORAG_OK);
    return take(out);
}

}  // namespace

TEST_CASE("config precedence: defaults, file, env, explicit set", "[capi]") {
    oncorag::testing::TempDir dir;
    {
        std::ofstream f(dir / "c.conf");
        f << "# comment\nk = 7\nmode = graph_rag\nport = 9000\n";
    }
    oncorag_config* c = nullptr;
    REQUIRE(oncorag_config_new(&c) == ONCORAG_OK);
    CHECK(get(c, "k") == "5");
    REQUIRE(oncorag_config_load_file(c, (dir / "c.conf").c_str()) == ONCORAG_OK);
    CHECK(get(c, "k") == "7");
    ::setenv("ONCORAG_K", "9", 1);
    REQUIRE(oncorag_config_apply_env(c) == ONCORAG_OK);
    ::unsetenv("ONCORAG_K");
    CHECK(get(c, "k") == "9");
    CHECK(get(c, "mode") == "graph_rag");
    REQUIRE(oncorag_config_set(c, "k", "11") == ONCORAG_OK);
    CHECK(get(c, "k") == "11");

    CHECK(oncorag_config_set(c, "no_such_key", "1") == ONCORAG_E_INVALID_ARGUMENT);
    CHECK(std::string(oncorag_last_error()).find("no_such_key") != std::string::npos);
    CHECK(oncorag_config_load_file(c, (dir / "missing.conf").c_str()) == ONCORAG_E_IO);

    char* js = nullptr;
    REQUIRE(oncorag_config_to_json(c, &js) == ONCORAG_OK);
    CHECK(json::parse(take(js))["port"] == "9000");
    oncorag_config_free(c);
}

TEST_CASE("status names and argument checks", "[capi]") {
    CHECK(std::string(oncorag_status_name(ONCORAG_OK)) == "ok");
    CHECK(std::string(oncorag_status_name(ONCORAG_E_TRANSPORT)) == "transport");
    CHECK(oncorag_config_new(nullptr) == ONCORAG_E_INVALID_ARGUMENT);
    char* out = nullptr;
    CHECK(oncorag_reports_csv("not json", &out) == ONCORAG_E_PARSE);
    CHECK(oncorag_reports_csv("[]", &out) == ONCORAG_OK);
    CHECK(take(out) == "task,configuration,language,metric,value,n_examples,n_errors\n");
}

TEST_CASE("engine pipeline through the C API", "[capi]") {
    oncorag::testing::TempDir dir;
    oncorag_config* c = nullptr;
    REQUIRE(oncorag_config_new(&c) == ONCORAG_OK);
    const auto idx = (dir / "index.bin").string();
    REQUIRE(oncorag_config_set(c, "index_path", idx.c_str()) == ONCORAG_OK);
    REQUIRE(oncorag_config_set(c, "templates_dir", ONCORAG_TEMPLATES) == ONCORAG_OK);

    oncorag_engine* e = nullptr;
    REQUIRE(oncorag_engine_open(c, 0, &e) == ONCORAG_OK);
    char* out = nullptr;
    const auto docs = (dir / "docs.jsonl").string();
    const auto chunks = (dir / "chunks.jsonl").string();
    REQUIRE(oncorag_ingest(e, oncorag::testing::fixture("corpus.jsonl").c_str(), docs.c_str(), &out) == ONCORAG_OK);
    CHECK(json::parse(take(out))["documents"] == 14);
    REQUIRE(oncorag_chunk(e, docs.c_str(), chunks.c_str(), &out) == ONCORAG_OK);
    take(out);
    REQUIRE(oncorag_index_build(e, chunks.c_str(), idx.c_str(), &out) == ONCORAG_OK);
    take(out);

    CHECK(oncorag_query(e, R"({"query":"EGFR"})", &out) == ONCORAG_E_STATE);
    oncorag_engine_close(e);
    REQUIRE(oncorag_engine_open(c, ONCORAG_LOAD_INDEX, &e) == ONCORAG_OK);
    REQUIRE(oncorag_engine_reload(e) == ONCORAG_OK);
    REQUIRE(oncorag_query(e, R"({"query":"EGFR exon 19 deletion","k":2})", &out) == ONCORAG_OK);
    const auto bundle = json::parse(take(out));
    CHECK(bundle["hits"].size() == 2);
    CHECK(oncorag_query(e, "{bad", &out) == ONCORAG_E_PARSE);
    CHECK(oncorag_query(e, R"({"query":"x","k":0})", &out) == ONCORAG_E_INVALID_ARGUMENT);

    REQUIRE(oncorag_health(e, &out) == ONCORAG_OK);
    const auto h = json::parse(take(out));
    CHECK(h["corpus"]["documents"] == 14);
    CHECK(h["generator_loaded"] == false);
    oncorag_engine_close(e);
    oncorag_config_free(c);
}
