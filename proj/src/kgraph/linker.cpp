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

#include "kgraph/linker.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/text.hpp"

namespace oncorag::kgraph {

double lexical_score(std::string_view mention, std::string_view surface) {
    const std::string a = text::canonical_term(mention);
    const std::string b = text::canonical_term(surface);
    if (a.empty() || b.empty()) return 0.0;
    if (a == b) return kExactMatchScore;
    if (a.find(b) != std::string::npos || b.find(a) != std::string::npos) return kContainmentScore;
    return 0.0;
}

namespace {

embed::EmbeddingVector embed_or_zero(const embed::Embedder& embedder, std::string_view s) {
    if (text::trim(s).empty()) return {std::vector<double>(embedder.dim(), 0.0)};
    return embedder.embed(s);
}

}  // namespace

EntityLinker::EntityLinker(const KnowledgeGraph& graph, const embed::Embedder& embedder)
    : graph_(graph), embedder_(embedder) {
    node_vectors_.reserve(graph.node_count());
    for (const auto& n : graph.nodes()) {
        node_vectors_.push_back(embed_or_zero(embedder, n.surface + " " + n.definition));
        canonical_surfaces_.push_back(text::canonical_term(n.surface));
    }
}

LinkResult EntityLinker::link(std::string_view mention, std::size_t m) const {
    if (text::trim(mention).empty()) fail(ErrorCode::invalid_argument, "empty mention");
    if (m == 0) fail(ErrorCode::invalid_argument, "m must be >= 1");
    if (graph_.empty()) fail(ErrorCode::state, "knowledge graph is empty");

    const std::string canonical = text::canonical_term(mention);
    const auto query = embedder_.embed(mention);

    std::vector<LinkCandidate> scored;
    scored.reserve(graph_.node_count());
    for (std::size_t i = 0; i < graph_.node_count(); ++i) {
        const std::string& surface = canonical_surfaces_[i];
        double lexical = 0.0;
        if (!surface.empty()) {
            if (surface == canonical) {
                lexical = kExactMatchScore;
            } else if (surface.find(canonical) != std::string::npos || canonical.find(surface) != std::string::npos) {
                lexical = kContainmentScore;
            }
        }
        double semantic = 0.0;
        if (!query.is_zero() && !node_vectors_[i].is_zero()) {
            semantic = embed::cosine_similarity(query, node_vectors_[i]);
        }
        scored.push_back({graph_.nodes()[i].node_id, std::max(lexical, semantic)});
    }
    std::sort(scored.begin(), scored.end(), [](const LinkCandidate& a, const LinkCandidate& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.node_id < b.node_id;
    });
    scored.resize(std::min(m, scored.size()));

    const Node& winner = graph_.node(scored.front().node_id);
    return {std::move(scored), {std::string(mention), winner.vocabulary_ref, winner.definition}};
}

LinkResult link_entity(const KnowledgeGraph& graph, std::string_view mention, const embed::Embedder& embedder,
                       std::size_t m) {
    if (text::trim(mention).empty()) fail(ErrorCode::invalid_argument, "empty mention");
    return EntityLinker(graph, embedder).link(mention, m);
}

SurfaceMatcher::SurfaceMatcher(const KnowledgeGraph& graph) {
    for (const auto& n : graph.nodes()) {
        std::string folded = text::fold_case(text::trim(n.surface));
        if (!folded.empty()) surfaces_.push_back(std::move(folded));
    }
    std::sort(surfaces_.begin(), surfaces_.end(), [](const std::string& a, const std::string& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a < b;
    });
    surfaces_.erase(std::unique(surfaces_.begin(), surfaces_.end()), surfaces_.end());
}

std::vector<Mention> SurfaceMatcher::scan(std::string_view input) const {
    std::vector<Mention> out;
    const std::string folded = text::fold_case(input);
    auto word = [&](std::size_t i) { return text::is_word_byte(static_cast<unsigned char>(folded[i])); };

    std::size_t i = 0;
    while (i < folded.size()) {
        if (i > 0 && word(i - 1) && word(i)) {
            ++i;
            continue;
        }
        bool matched = false;
        for (const auto& s : surfaces_) {
            if (folded.compare(i, s.size(), s) != 0) continue;
            const std::size_t end = i + s.size();
            if (end < folded.size() && word(end) && word(end - 1)) continue;
            out.push_back({i, end, std::string(input.substr(i, s.size()))});
            i = end;
            matched = true;
            break;
        }
        if (!matched) ++i;
    }
    return out;
}

}  // namespace oncorag::kgraph
