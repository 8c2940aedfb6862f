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

#include "kgraph/graph.hpp"

#include <algorithm>
#include <deque>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace oncorag::kgraph {

namespace {

void check_field(std::string_view value, const char* what) {
    if (value.find('\t') != std::string_view::npos || value.find('\n') != std::string_view::npos) {
        fail(ErrorCode::invalid_argument, std::string(what) + " must not contain tab or newline");
    }
}

bool category_matches(const Node& node, const std::optional<std::vector<std::string>>& filter) {
    if (!filter) return true;
    for (const auto& prefix : *filter) {
        if (text::starts_with_path(node.category, prefix)) return true;
    }
    return false;
}

}  // namespace

void KnowledgeGraph::add_node(Node node) {
    if (node.node_id.empty()) fail(ErrorCode::invalid_argument, "node_id must be non-empty");
    if (node.category.empty()) fail(ErrorCode::invalid_argument, "node " + node.node_id + " has an empty category");
    check_field(node.node_id, "node_id");
    check_field(node.surface, "surface");
    check_field(node.category, "category");
    check_field(node.vocabulary_ref, "vocabulary_ref");
    check_field(node.definition, "definition");
    if (node_by_id_.contains(node.node_id)) fail(ErrorCode::invalid_argument, "duplicate node " + node.node_id);
    node_by_id_.emplace(node.node_id, nodes_.size());
    nodes_.push_back(std::move(node));
}

void KnowledgeGraph::add_edge(Edge edge) {
    check_field(edge.relation, "relation");
    if (edge.relation.empty()) fail(ErrorCode::invalid_argument, "edge relation must be non-empty");
    if (!node_by_id_.contains(edge.head)) fail(ErrorCode::not_found, "edge head " + edge.head + " does not exist");
    if (!node_by_id_.contains(edge.tail)) fail(ErrorCode::not_found, "edge tail " + edge.tail + " does not exist");
    if (edge.head == edge.tail) fail(ErrorCode::invalid_argument, "self-loop on " + edge.head);
    if (edge_set_.contains(edge)) {
        fail(ErrorCode::invalid_argument, "duplicate edge " + edge.head + " " + edge.relation + " " + edge.tail);
    }
    if (std::find(relations_.begin(), relations_.end(), edge.relation) == relations_.end()) {
        relations_.push_back(edge.relation);
    }
    outgoing_[edge.head].push_back(edges_.size());
    edge_set_.insert(edge);
    edges_.push_back(std::move(edge));
}

const Node* KnowledgeGraph::find_node(std::string_view node_id) const {
    const auto it = node_by_id_.find(std::string(node_id));
    return it == node_by_id_.end() ? nullptr : &nodes_[it->second];
}

const Node& KnowledgeGraph::node(std::string_view node_id) const {
    const Node* n = find_node(node_id);
    if (n == nullptr) fail(ErrorCode::not_found, "unknown node " + std::string(node_id));
    return *n;
}

std::optional<std::size_t> KnowledgeGraph::node_index(std::string_view node_id) const {
    const auto it = node_by_id_.find(std::string(node_id));
    if (it == node_by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<EdgePath> KnowledgeGraph::neighbors(std::string_view node_id, int depth,
                                                const std::optional<std::vector<std::string>>& tag_filter) const {
    if (depth < 1) fail(ErrorCode::invalid_argument, "depth must be >= 1");
    node(node_id);

    std::vector<EdgePath> out;
    std::deque<EdgePath> frontier;
    frontier.push_back({});
    const std::string start(node_id);
    while (!frontier.empty()) {
        EdgePath path = std::move(frontier.front());
        frontier.pop_front();
        const std::string& at = path.empty() ? start : path.back().tail;
        const auto it = outgoing_.find(at);
        if (it == outgoing_.end()) continue;
        for (std::size_t edge_idx : it->second) {
            const Edge& e = edges_[edge_idx];
            bool revisit = e.tail == start;
            for (const auto& step : path) revisit = revisit || step.tail == e.tail;
            if (revisit) continue;
            if (!category_matches(node(e.tail), tag_filter)) continue;
            EdgePath next = path;
            next.push_back(e);
            if (static_cast<int>(next.size()) < depth) frontier.push_back(next);
            out.push_back(std::move(next));
        }
    }
    return out;
}

std::set<std::string> KnowledgeGraph::tag_subgraph(std::string_view tag_prefix) const {
    std::set<std::string> out;
    for (const auto& n : nodes_) {
        if (text::starts_with_path(n.category, tag_prefix)) out.insert(n.node_id);
    }
    return out;
}

KnowledgeGraph parse_graph_tsv(std::string_view contents) {
    struct Line {
        std::size_t number;
        std::vector<std::string_view> fields;
    };
    std::vector<Line> node_lines, edge_lines;
    std::size_t number = 0;
    for (auto raw : text::split(contents, "\n")) {
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
        if (raw.empty() || raw.front() == '#') continue;
        auto fields = text::split(raw, "\t");
        if (fields[0] == "N") {
            if (fields.size() != 6) fail(ErrorCode::parse, "line " + std::to_string(number) + ": node rows have 6 fields");
            node_lines.push_back({number, std::move(fields)});
        } else if (fields[0] == "E") {
            if (fields.size() != 4) fail(ErrorCode::parse, "line " + std::to_string(number) + ": edge rows have 4 fields");
            edge_lines.push_back({number, std::move(fields)});
        } else {
            fail(ErrorCode::parse, "line " + std::to_string(number) + ": unknown row kind");
        }
    }

    KnowledgeGraph g;
    try {
        for (const auto& l : node_lines) {
            number = l.number;
            g.add_node({std::string(l.fields[1]), std::string(l.fields[2]), std::string(l.fields[3]),
                        std::string(l.fields[4]), std::string(l.fields[5])});
        }
        for (const auto& l : edge_lines) {
            number = l.number;
            g.add_edge({std::string(l.fields[1]), std::string(l.fields[2]), std::string(l.fields[3])});
        }
    } catch (const Error& e) {
        fail(ErrorCode::parse, "line " + std::to_string(number) + ": " + e.what());
    }
    return g;
}

KnowledgeGraph load_graph_tsv(const std::filesystem::path& path) {
    const std::string contents = io::read_file(path);
    if (!text::valid_utf8(contents)) fail(ErrorCode::parse, path.string() + " is not valid UTF-8");
    try {
        return parse_graph_tsv(contents);
    } catch (const Error& e) {
        fail(e.code(), path.string() + ": " + e.what());
    }
}

std::string format_graph_tsv(const KnowledgeGraph& graph) {
    std::string out;
    for (const auto& n : graph.nodes()) {
        out += "N\t" + n.node_id + "\t" + n.surface + "\t" + n.category + "\t" + n.vocabulary_ref + "\t" +
               n.definition + "\n";
    }
    for (const auto& e : graph.edges()) out += "E\t" + e.head + "\t" + e.relation + "\t" + e.tail + "\n";
    return out;
}

void save_graph_tsv(const std::filesystem::path& path, const KnowledgeGraph& graph) {
    io::write_file(path, format_graph_tsv(graph));
}

}  // namespace oncorag::kgraph
