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

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/corpus.hpp"
#include "embed/embed.hpp"
#include "json.hpp"
#include "kgraph/graph.hpp"
#include "kgraph/linker.hpp"
#include "vindex/vindex.hpp"

namespace oncorag::retrieve {

enum class Mode { rag, graph_rag };

const char* to_string(Mode mode) noexcept;
Mode mode_from_string(std::string_view name);

struct RetrievalRequest {
    std::string query;
    corpus::Language language = corpus::Language::en;
    std::size_t k = 5;
    vindex::TagFilter tag_hints;
    Mode mode = Mode::rag;
    std::size_t context_budget_chars = 8000;

    void validate() const;
};

nlohmann::json to_json(const RetrievalRequest& req);
// Missing optional fields take `defaults`.
RetrievalRequest request_from_json(const nlohmann::json& obj, const RetrievalRequest& defaults = {});

struct LevelSummary {
    std::string tag_prefix;
    std::string text;
    std::size_t level = 0;  // depth of tag_prefix, 1 = broadest

    friend bool operator==(const LevelSummary&, const LevelSummary&) = default;
};

class SummaryStore {
public:
    void add(LevelSummary summary);
    const LevelSummary* find(std::string_view tag_prefix) const;
    std::size_t size() const noexcept { return by_prefix_.size(); }
    const std::map<std::string, LevelSummary>& all() const noexcept { return by_prefix_; }

    void save(const std::filesystem::path& path) const;
    static SummaryStore load(const std::filesystem::path& path);

    friend bool operator==(const SummaryStore&, const SummaryStore&) = default;

private:
    std::map<std::string, LevelSummary> by_prefix_;
};

// Produces the summary text for one tag prefix from the chunks under it.
using Summarizer = std::function<std::string(const std::string& tag_prefix,
                                             const std::vector<const corpus::Chunk*>& chunks)>;

// First sentence of each of the three documents with the most distinct tags
// (ties by doc_id), taken from their lowest-index chunk and joined by a space.
std::string extractive_stub_summary(const std::string& tag_prefix, const std::vector<const corpus::Chunk*>& chunks);

std::string first_sentence(std::string_view text);

// Every prefix of every chunk tag.
std::set<std::string> derive_tag_tree(const std::vector<corpus::Chunk>& chunks);

SummaryStore build_level_summaries(const std::vector<corpus::Chunk>& chunks, const std::set<std::string>& tag_tree,
                                   const Summarizer& summarizer = extractive_stub_summary);

class ChunkStore {
public:
    ChunkStore() = default;
    explicit ChunkStore(std::vector<corpus::Chunk> chunks);

    const corpus::Chunk* find(const vindex::ChunkRef& ref) const;
    const std::vector<corpus::Chunk>& chunks() const noexcept { return chunks_; }
    std::size_t size() const noexcept { return chunks_.size(); }

private:
    std::vector<corpus::Chunk> chunks_;
    std::unordered_map<vindex::ChunkRef, std::size_t, vindex::ChunkRefHash> by_ref_;
};

struct BundleHit {
    vindex::SearchHit hit;
    std::string text;
    corpus::TagSet tags;
};

struct ContextBundle {
    std::vector<BundleHit> hits;
    std::vector<kgraph::EvidenceTriple> triples;
    std::vector<LevelSummary> summaries;  // most specific first
    bool fallback = false;
    std::size_t total_chars = 0;
};

// "[entity, source, definition]"; its length is what the budget charges.
std::string render_triple(const kgraph::EvidenceTriple& triple);

nlohmann::json to_json(const ContextBundle& bundle);
ContextBundle bundle_from_json(const nlohmann::json& obj);

struct RetrievalContext {
    const vindex::VectorIndex& index;
    const ChunkStore& chunks;
    const embed::Embedder& embedder;
    const SummaryStore& summaries;
    // Required for graph_rag mode only.
    const kgraph::KnowledgeGraph* graph = nullptr;
    const kgraph::EntityLinker* linker = nullptr;
    const kgraph::SurfaceMatcher* matcher = nullptr;
};

// Top-down: restrict to tag_hints (full pool, flagged, when nothing matches),
// rank by cosine, keep top-k. graph_rag: attach an evidence triple for every
// graph surface found in the admitted hits. Bottom-up: add summaries from the
// most specific matched tag toward the root. Items are admitted whole, in
// the order hits, triples, summaries, until the character budget is reached.
ContextBundle u_retrieve(const RetrievalRequest& req, const RetrievalContext& ctx);

}  // namespace oncorag::retrieve
