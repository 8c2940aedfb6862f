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

// oncorag command-line front end. Every command goes through the C API.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "handles.hpp"
#include "json.hpp"

using namespace oncorag_cli;
using nlohmann::json;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<std::string> mode;
    std::optional<std::string> language;
    bool stub = false;
    std::optional<std::string> endpoint;
    std::vector<std::string> tags;
    std::optional<std::size_t> n_instructions;
    std::vector<std::string> overrides;  // key=value
};

// defaults < config file < ONCORAG_* environment < flags
ConfigPtr make_config(const Globals& g) {
    oncorag_config* raw = nullptr;
    check(oncorag_config_new(&raw));
    ConfigPtr config(raw);
    std::string file = g.config_path;
    if (file.empty()) {
        if (const char* env = std::getenv("ONCORAG_CONFIG")) file = env;
    }
    if (!file.empty()) check(oncorag_config_load_file(config.get(), file.c_str()));
    check(oncorag_config_apply_env(config.get()));
    for (const auto& kv : g.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value, got " + kv);
        check(oncorag_config_set(config.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    auto set = [&](const char* key, const std::string& value) { check(oncorag_config_set(config.get(), key, value.c_str())); };
    if (g.seed) set("seed", std::to_string(*g.seed));
    if (g.k) set("k", std::to_string(*g.k));
    if (g.mode) set("mode", *g.mode);
    if (g.language) set("language", *g.language);
    if (g.stub) {
        set("stub", "true");
        set("endpoint", "");
    }
    if (g.endpoint) {
        set("endpoint", *g.endpoint);
        set("stub", "false");
    }
    return config;
}

// Loads whatever the config names, plus what the command requires.
EnginePtr open_engine(const oncorag_config* config, unsigned required) {
    unsigned flags = required;
    if (!config_get(config, "graph_path").empty()) flags |= ONCORAG_LOAD_GRAPH;
    if (!config_get(config, "embeddings_path").empty()) flags |= ONCORAG_LOAD_EMBEDDINGS;
    oncorag_engine* raw = nullptr;
    check(oncorag_engine_open(config, flags, &raw));
    return EnginePtr(raw);
}

EnginePtr open_bare(const oncorag_config* config) {
    oncorag_engine* raw = nullptr;
    check(oncorag_engine_open(config, 0, &raw));
    return EnginePtr(raw);
}

json retrieval_request(const Globals& g, const std::string& text) {
    json req = {{"query", text}};
    if (g.k) req["k"] = *g.k;
    if (g.mode) req["mode"] = *g.mode;
    if (g.language) req["language"] = *g.language;
    if (!g.tags.empty()) req["tag_hints"] = g.tags;
    return req;
}

void print(const std::string& s) { std::cout << s << "\n"; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"oncorag: clinical graph-RAG engine"};
    app.fallthrough();
    app.failure_message(CLI::FailureMessage::help);
    app.require_subcommand(1);

    Globals g;
    app.add_option("--config", g.config_path, "key = value settings file (default: $ONCORAG_CONFIG)");
    app.add_option("--seed", g.seed, "seed for training, sampling and evaluation");
    app.add_option("--k", g.k, "number of passages to retrieve")->check(CLI::PositiveNumber);
    app.add_option("--mode", g.mode, "retrieval mode")->check(CLI::IsMember({"rag", "graph_rag"}));
    app.add_option("--language", g.language, "document/instruction language")->check(CLI::IsMember({"en", "de"}));
    app.add_flag("--stub", g.stub, "use canned generations from fixtures_path");
    app.add_option("--endpoint", g.endpoint, "generation service URL");
    app.add_option("--tag", g.tags, "tag-path hint (repeatable)");
    app.add_option("--n-instructions", g.n_instructions, "instruction subset size")
        ->check(CLI::IsMember({std::size_t{100}, std::size_t{200}, std::size_t{400}}));
    app.add_option("--set", g.overrides, "override any setting, key=value (repeatable)");
    app.get_option("--stub")->excludes("--endpoint");

    std::function<int()> run;

    std::string in_path, out_path;
    auto* ingest = app.add_subcommand("ingest", "normalize a document JSONL file");
    ingest->add_option("input", in_path)->required();
    ingest->add_option("output", out_path)->required();
    ingest->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            print(call_json([&](char** o) { return oncorag_ingest(engine.get(), in_path.c_str(), out_path.c_str(), o); }));
            return 0;
        };
    });

    auto* chunk = app.add_subcommand("chunk", "split normalized documents into chunks");
    chunk->add_option("documents", in_path)->required();
    chunk->add_option("output", out_path)->required();
    chunk->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            print(call_json([&](char** o) { return oncorag_chunk(engine.get(), in_path.c_str(), out_path.c_str(), o); }));
            return 0;
        };
    });

    auto* index = app.add_subcommand("index", "vector index commands");
    index->require_subcommand(1);
    auto* index_build = index->add_subcommand("build", "embed chunks and write the index");
    index_build->add_option("chunks", in_path)->required();
    index_build->add_option("--out", out_path, "index file (default: index_path)");
    index_build->callback([&] {
        run = [&] {
            auto config = make_config(g);
            std::string target = out_path.empty() ? config_get(config.get(), "index_path") : out_path;
            if (target.empty()) throw CLI::ValidationError("--out", "no index path given and index_path is unset");
            auto engine = open_bare(config.get());
            print(call_json([&](char** o) { return oncorag_index_build(engine.get(), in_path.c_str(), target.c_str(), o); }));
            return 0;
        };
    });

    auto* kg = app.add_subcommand("kg", "knowledge graph commands");
    kg->require_subcommand(1);
    auto* kg_load = kg->add_subcommand("load", "validate a graph TSV and print its statistics");
    kg_load->add_option("tsv", in_path)->required();
    kg_load->add_option("--out", out_path, "write the canonical TSV here");
    kg_load->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            print(call_json([&](char** o) {
                return oncorag_kg_load(engine.get(), in_path.c_str(), out_path.empty() ? nullptr : out_path.c_str(), o);
            }));
            return 0;
        };
    });
    auto* kg_train = kg->add_subcommand("train", "train TransE embeddings for graph_path");
    kg_train->add_option("--out", out_path, "embeddings file (default: embeddings_path)");
    kg_train->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            print(call_json([&](char** o) {
                return oncorag_kg_train(engine.get(), out_path.empty() ? nullptr : out_path.c_str(), o);
            }));
            return 0;
        };
    });
    std::string mention;
    std::size_t link_m = 0;
    auto* kg_link = kg->add_subcommand("link", "link a mention to graph nodes");
    kg_link->add_option("mention", mention)->required();
    kg_link->add_option("--m", link_m, "number of candidates")->check(CLI::PositiveNumber);
    kg_link->callback([&] {
        run = [&] {
            auto config = make_config(g);
            oncorag_engine* raw = nullptr;
            check(oncorag_engine_open(config.get(), ONCORAG_LOAD_GRAPH, &raw));
            EnginePtr engine(raw);
            print(call_json([&](char** o) { return oncorag_kg_link(engine.get(), mention.c_str(), link_m, o); }));
            return 0;
        };
    });

    std::string query_text;
    auto* query = app.add_subcommand("query", "retrieve a context bundle and print it as JSON");
    query->add_option("text", query_text)->required();
    query->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_engine(config.get(), ONCORAG_LOAD_INDEX);
            const auto req = retrieval_request(g, query_text).dump();
            print(call_json([&](char** o) { return oncorag_query(engine.get(), req.c_str(), o); }));
            return 0;
        };
    });

    std::string task;
    auto* answer = app.add_subcommand("answer", "retrieve, prompt, generate and parse for one input");
    answer->add_option("text", query_text)->required();
    answer->add_option("--task", task)->required();
    answer->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_engine(config.get(), ONCORAG_LOAD_INDEX | ONCORAG_LOAD_GENERATOR);
            auto req = retrieval_request(g, query_text);
            req["task"] = task;
            const auto body = req.dump();
            print(call_json([&](char** o) { return oncorag_answer(engine.get(), body.c_str(), o); }));
            return 0;
        };
    });

    auto* dataset = app.add_subcommand("dataset", "instruction dataset commands");
    dataset->require_subcommand(1);
    std::vector<std::string> inputs;
    auto* ds_build = dataset->add_subcommand("build", "convert task datasets into instruction records");
    ds_build->add_option("inputs", inputs)->required();
    ds_build->add_option("--task", task)->required();
    ds_build->add_option("--out", out_path)->required();
    ds_build->callback([&] {
        run = [&] {
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            const auto lang = config_get(config.get(), "language");
            const auto paths = json(inputs).dump();
            print(call_json([&](char** o) {
                return oncorag_dataset_build(engine.get(), paths.c_str(), task.c_str(), lang.c_str(), out_path.c_str(), o);
            }));
            return 0;
        };
    });
    auto* ds_sample = dataset->add_subcommand("sample", "draw a nested, language-pure instruction subset");
    ds_sample->add_option("input", in_path)->required();
    ds_sample->add_option("--out", out_path)->required();
    ds_sample->callback([&] {
        run = [&] {
            if (!g.n_instructions) throw CLI::RequiredError("--n-instructions");
            auto config = make_config(g);
            auto engine = open_bare(config.get());
            const auto lang = config_get(config.get(), "language");
            print(call_json([&](char** o) {
                return oncorag_dataset_sample(engine.get(), in_path.c_str(), *g.n_instructions, lang.c_str(),
                                              out_path.c_str(), o);
            }));
            return 0;
        };
    });

    auto* eval = app.add_subcommand("eval", "evaluation commands");
    eval->require_subcommand(1);
    std::string suite_path, dataset_path, configuration = "base", trace_path, csv_path;
    auto* eval_run = eval->add_subcommand("run", "run one experiment or a suite and print metric reports");
    auto* suite_opt = eval_run->add_option("--suite", suite_path, "JSON array of experiment objects");
    eval_run->add_option("--task", task)->excludes(suite_opt);
    eval_run->add_option("--dataset", dataset_path)->excludes(suite_opt);
    eval_run->add_option("--configuration", configuration)
        ->check(CLI::IsMember({"base", "instruction_tuned", "rag", "graph_rag"}))
        ->excludes(suite_opt);
    eval_run->add_option("--trace", trace_path, "per-example trace JSONL (single experiment)")->excludes(suite_opt);
    eval_run->add_option("--csv", csv_path, "also write the flat CSV report here");
    eval_run->callback([&] {
        run = [&] {
            json experiments = json::array();
            if (!suite_path.empty()) {
                std::ifstream in(suite_path);
                if (!in) throw ApiError(ONCORAG_E_IO, "cannot open suite " + suite_path);
                experiments = json::parse(in, nullptr, false);
                if (experiments.is_discarded() || !experiments.is_array()) {
                    throw ApiError(ONCORAG_E_PARSE, "suite must be a JSON array of experiments");
                }
            } else {
                if (task.empty() || dataset_path.empty()) throw CLI::RequiredError("--task and --dataset (or --suite)");
                json e = {{"task", task}, {"dataset", dataset_path}, {"configuration", configuration}};
                if (!trace_path.empty()) e["trace"] = trace_path;
                experiments.push_back(e);
            }
            auto config = make_config(g);
            unsigned flags = ONCORAG_LOAD_GENERATOR;
            if (!config_get(config.get(), "index_path").empty()) flags |= ONCORAG_LOAD_INDEX;
            auto engine = open_engine(config.get(), flags);
            json reports = json::array();
            for (auto e : experiments) {
                if (g.n_instructions && !e.contains("n_instructions")) e["n_instructions"] = *g.n_instructions;
                const auto body = e.dump();
                reports.push_back(json::parse(
                    call_json([&](char** o) { return oncorag_eval_run(engine.get(), body.c_str(), o); })));
            }
            if (!csv_path.empty()) {
                const auto body = reports.dump();
                const auto csv = call_json([&](char** o) { return oncorag_reports_csv(body.c_str(), o); });
                std::ofstream out(csv_path, std::ios::binary);
                out << csv;
                if (!out) throw ApiError(ONCORAG_E_IO, "cannot write " + csv_path);
            }
            print(suite_path.empty() ? reports.front().dump() : reports.dump());
            return 0;
        };
    });

    std::string host;
    int port = -1;
    auto* serve_cmd = app.add_subcommand("serve", "serve the JSON HTTP API");
    serve_cmd->add_option("--host", host, "bind address (default: host setting)");
    serve_cmd->add_option("--port", port, "port, 0 for any free port (default: port setting)")
        ->check(CLI::Range(0, 65535));
    serve_cmd->callback([&] {
        run = [&] {
            auto config = make_config(g);
            unsigned flags = ONCORAG_LOAD_INDEX;
            if (config_get(config.get(), "stub") == "true" || !config_get(config.get(), "endpoint").empty()) {
                flags |= ONCORAG_LOAD_GENERATOR;
            }
            auto engine = open_engine(config.get(), flags);
            const std::string h = host.empty() ? config_get(config.get(), "host") : host;
            const int p = port >= 0 ? port : std::stoi(config_get(config.get(), "port"));
            return serve(engine.get(), engine.get(), h, p);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return run ? run() : 1;
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ApiError& e) {
        std::cerr << "error (" << oncorag_status_name(e.status) << "): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
