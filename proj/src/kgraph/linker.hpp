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

#include <string>
#include <string_view>
#include <vector>

#include "embed/embed.hpp"
#include "kgraph/graph.hpp"

namespace oncorag::kgraph {

inline constexpr double kExactMatchScore = 1.0;
inline constexpr double kContainmentScore = 0.8;

struct LinkCandidate {
    std::string node_id;
    double score = 0.0;
};

struct LinkResult {
    std::vector<LinkCandidate> candidates;
    EvidenceTriple best;
};

// Caches one embedding of "surface definition" per node. The graph must
// outlive the linker and stay unmodified.
class EntityLinker {
public:
    EntityLinker(const KnowledgeGraph& graph, const embed::Embedder& embedder);

    // Score = max(lexical, semantic); ties broken by node_id ascending.
    LinkResult link(std::string_view mention, std::size_t m) const;

private:
    const KnowledgeGraph& graph_;
    const embed::Embedder& embedder_;
    std::vector<embed::EmbeddingVector> node_vectors_;
    std::vector<std::string> canonical_surfaces_;
};

LinkResult link_entity(const KnowledgeGraph& graph, std::string_view mention, const embed::Embedder& embedder,
                       std::size_t m);

// Lexical part of the linking score: 1.0 exact (case and whitespace
// insensitive), 0.8 when either term contains the other, else 0.
double lexical_score(std::string_view mention, std::string_view surface);

struct Mention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string text;
};

// Longest-match, case-insensitive scan for node surfaces bounded by non-word
// characters. Matches do not overlap; scanning resumes after each match.
class SurfaceMatcher {
public:
    explicit SurfaceMatcher(const KnowledgeGraph& graph);

    std::vector<Mention> scan(std::string_view text) const;

private:
    std::vector<std::string> surfaces_;  // folded, sorted by length desc
};

}  // namespace oncorag::kgraph
