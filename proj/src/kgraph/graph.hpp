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
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace oncorag::kgraph {

struct Node {
    std::string node_id;
    std::string surface;
    std::string category;        // tag path, e.g. "Medications/Targeted"
    std::string vocabulary_ref;  // e.g. "UMLS:C0001418"
    std::string definition;

    friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
    std::string head;
    std::string relation;
    std::string tail;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct EvidenceTriple {
    std::string entity;
    std::string source;
    std::string definition;

    friend bool operator==(const EvidenceTriple&, const EvidenceTriple&) = default;
};

using EdgePath = std::vector<Edge>;

// Nodes and edges keep insertion order; all lookups are by id.
class KnowledgeGraph {
public:
    void add_node(Node node);
    void add_edge(Edge edge);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    // Relation labels in order of first appearance.
    const std::vector<std::string>& relations() const noexcept { return relations_; }

    const Node* find_node(std::string_view node_id) const;
    const Node& node(std::string_view node_id) const;
    std::optional<std::size_t> node_index(std::string_view node_id) const;
    bool has_edge(const Edge& edge) const { return edge_set_.contains(edge); }

    // Simple outgoing paths of length 1..depth in breadth-first order. Nodes
    // whose category misses every filter prefix are pruned with their subtrees.
    std::vector<EdgePath> neighbors(std::string_view node_id, int depth,
                                    const std::optional<std::vector<std::string>>& tag_filter = std::nullopt) const;

    std::set<std::string> tag_subgraph(std::string_view tag_prefix) const;

private:
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> node_by_id_;
    std::vector<Edge> edges_;
    std::set<Edge> edge_set_;
    std::vector<std::string> relations_;
    std::unordered_map<std::string, std::vector<std::size_t>> outgoing_;
};

// TSV: "N\tid\tsurface\tcategory\tvocabulary_ref\tdefinition" and "E\thead\trelation\ttail".
// Blank lines and lines starting with '#' are skipped.
KnowledgeGraph load_graph_tsv(const std::filesystem::path& path);
KnowledgeGraph parse_graph_tsv(std::string_view contents);
std::string format_graph_tsv(const KnowledgeGraph& graph);
void save_graph_tsv(const std::filesystem::path& path, const KnowledgeGraph& graph);

}  // namespace oncorag::kgraph
