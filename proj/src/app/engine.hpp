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
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "app/settings.hpp"
#include "json.hpp"

namespace oncorag::app {

enum LoadFlags : unsigned {
    load_none = 0,
    load_index = 1u << 0,       // index_path plus its chunk and summary sidecars
    load_graph = 1u << 1,       // graph_path
    load_embeddings = 1u << 2,  // embeddings_path
    load_generator = 1u << 3,   // stub fixtures or endpoint, and templates_dir
};

struct Snapshot;

// Owns an immutable snapshot of loaded artifacts. Read operations run
// against the snapshot current at call time; reload() swaps in a new one.
class Engine {
public:
    Engine(Settings settings, unsigned flags);
    ~Engine();

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    const Settings& settings() const noexcept { return settings_; }

    // Artifact commands. They read and write files and leave the snapshot alone.
    nlohmann::json ingest(const std::filesystem::path& input, const std::filesystem::path& output) const;
    nlohmann::json chunk(const std::filesystem::path& documents, const std::filesystem::path& output) const;
    // Writes <index>, <index>.chunks.jsonl and <index>.summaries.jsonl.
    nlohmann::json build_index(const std::filesystem::path& chunks, const std::filesystem::path& index) const;
    nlohmann::json kg_load(const std::filesystem::path& tsv, const std::filesystem::path& output) const;
    nlohmann::json kg_train(const std::filesystem::path& output) const;
    nlohmann::json dataset_build(const std::vector<std::filesystem::path>& inputs, std::string_view task,
                                 std::string_view language, const std::filesystem::path& output) const;
    nlohmann::json dataset_sample(const std::filesystem::path& input, std::size_t n, std::string_view language,
                                  const std::filesystem::path& output) const;

    // Snapshot-backed requests.
    nlohmann::json link(std::string_view mention, std::optional<std::size_t> m) const;
    nlohmann::json query(const nlohmann::json& request) const;
    nlohmann::json answer(const nlohmann::json& request) const;
    // Optional "trace" key names a JSONL file for the per-example trace.
    nlohmann::json eval(const nlohmann::json& experiment) const;
    nlohmann::json health() const;

    void reload();

private:
    std::shared_ptr<const Snapshot> current() const;

    Settings settings_;
    unsigned flags_;
    mutable std::mutex swap_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
};

}  // namespace oncorag::app
