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

#include "retrieve/retrieve.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace oncorag::retrieve {

using nlohmann::json;

const char* to_string(Mode mode) noexcept { return mode == Mode::rag ? "rag" : "graph_rag"; }

Mode mode_from_string(std::string_view name) {
    if (name == "rag") return Mode::rag;
    if (name == "graph_rag") return Mode::graph_rag;
    fail(ErrorCode::invalid_argument, "mode must be \"rag\" or \"graph_rag\", got \"" + std::string(name) + "\"");
}

void RetrievalRequest::validate() const {
    if (text::trim(query).empty()) fail(ErrorCode::invalid_argument, "query must be non-empty");
    if (k == 0) fail(ErrorCode::invalid_argument, "k must be >= 1");
    if (context_budget_chars == 0) fail(ErrorCode::invalid_argument, "context_budget_chars must be > 0");
}

json to_json(const RetrievalRequest& req) {
    json j = {{"query", req.query},
              {"language", corpus::to_string(req.language)},
              {"k", req.k},
              {"mode", to_string(req.mode)},
              {"context_budget_chars", req.context_budget_chars}};
    j["tag_hints"] = req.tag_hints ? json(*req.tag_hints) : json(nullptr);
    return j;
}

RetrievalRequest request_from_json(const json& obj, const RetrievalRequest& defaults) {
    if (!obj.is_object()) fail(ErrorCode::parse, "retrieval request must be a JSON object");
    RetrievalRequest req = defaults;
    try {
        if (!obj.contains("query") || !obj["query"].is_string()) fail(ErrorCode::parse, "request needs a string \"query\"");
        req.query = obj["query"].get<std::string>();
        if (obj.contains("language")) req.language = corpus::language_from_string(obj["language"].get<std::string>());
        if (obj.contains("k")) {
            const auto k = obj["k"].get<long long>();
            if (k < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
            req.k = static_cast<std::size_t>(k);
        }
        if (obj.contains("mode")) req.mode = mode_from_string(obj["mode"].get<std::string>());
        if (obj.contains("context_budget_chars")) {
            const auto b = obj["context_budget_chars"].get<long long>();
            if (b < 1) fail(ErrorCode::invalid_argument, "context_budget_chars must be > 0");
            req.context_budget_chars = static_cast<std::size_t>(b);
        }
        if (obj.contains("tag_hints") && !obj["tag_hints"].is_null()) {
            req.tag_hints = obj["tag_hints"].get<std::vector<std::string>>();
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed retrieval request: ") + e.what());
    }
    req.validate();
    return req;
}

void SummaryStore::add(LevelSummary summary) {
    if (summary.tag_prefix.empty()) fail(ErrorCode::invalid_argument, "summary tag_prefix must be non-empty");
    summary.level = text::path_depth(summary.tag_prefix);
    if (!by_prefix_.emplace(summary.tag_prefix, summary).second) {
        fail(ErrorCode::invalid_argument, "duplicate summary for " + summary.tag_prefix);
    }
}

const LevelSummary* SummaryStore::find(std::string_view tag_prefix) const {
    const auto it = by_prefix_.find(std::string(tag_prefix));
    return it == by_prefix_.end() ? nullptr : &it->second;
}

void SummaryStore::save(const std::filesystem::path& path) const {
    std::vector<json> rows;
    for (const auto& [prefix, s] : by_prefix_) rows.push_back({{"tag_prefix", prefix}, {"level", s.level}, {"text", s.text}});
    io::write_jsonl(path, rows);
}

SummaryStore SummaryStore::load(const std::filesystem::path& path) {
    SummaryStore store;
    io::for_each_jsonl(path, [&](std::size_t, const json& obj) {
        store.add({obj.at("tag_prefix").get<std::string>(), obj.at("text").get<std::string>(), 0});
    });
    return store;
}

std::string first_sentence(std::string_view input) {
    const std::string_view t = text::trim(input);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const char c = t[i];
        if (c == '\n') return std::string(text::trim(t.substr(0, i)));
        if ((c == '.' || c == '!' || c == '?') && (i + 1 == t.size() || t[i + 1] == ' ' || t[i + 1] == '\n')) {
            return std::string(t.substr(0, i + 1));
        }
    }
    return std::string(t);
}

std::string extractive_stub_summary(const std::string& /*tag_prefix*/, const std::vector<const corpus::Chunk*>& chunks) {
    struct DocInfo {
        std::set<std::string> tags;
        const corpus::Chunk* first = nullptr;
    };
    std::map<std::string, DocInfo> docs;
    for (const auto* c : chunks) {
        auto& info = docs[c->doc_id];
        info.tags.insert(c->tags.begin(), c->tags.end());
        if (info.first == nullptr || c->chunk_index < info.first->chunk_index) info.first = c;
    }
    std::vector<std::pair<std::string, const DocInfo*>> ranked;
    for (const auto& [id, info] : docs) ranked.emplace_back(id, &info);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        return a.second->tags.size() > b.second->tags.size();
    });

    std::string out;
    for (std::size_t i = 0; i < ranked.size() && i < 3; ++i) {
        const std::string sentence = first_sentence(ranked[i].second->first->text);
        if (sentence.empty()) continue;
        if (!out.empty()) out += ' ';
        out += sentence;
    }
    return out;
}

std::set<std::string> derive_tag_tree(const std::vector<corpus::Chunk>& chunks) {
    std::set<std::string> tree;
    for (const auto& c : chunks) {
        for (const auto& tag : c.tags) {
            for (auto& p : text::path_prefixes(tag)) tree.insert(std::move(p));
        }
    }
    return tree;
}

SummaryStore build_level_summaries(const std::vector<corpus::Chunk>& chunks, const std::set<std::string>& tag_tree,
                                   const Summarizer& summarizer) {
    SummaryStore store;
    for (const auto& prefix : tag_tree) {
        std::vector<const corpus::Chunk*> under;
        for (const auto& c : chunks) {
            if (vindex::matches_filter(c.tags, std::vector<std::string>{prefix})) under.push_back(&c);
        }
        if (under.empty()) continue;
        std::string summary = summarizer(prefix, under);
        if (summary.empty()) continue;
        store.add({prefix, std::move(summary), 0});
    }
    return store;
}

ChunkStore::ChunkStore(std::vector<corpus::Chunk> chunks) : chunks_(std::move(chunks)) {
    for (std::size_t i = 0; i < chunks_.size(); ++i) {
        vindex::ChunkRef ref{chunks_[i].doc_id, chunks_[i].chunk_index};
        if (!by_ref_.emplace(std::move(ref), i).second) {
            fail(ErrorCode::invalid_argument,
                 "duplicate chunk " + chunks_[i].doc_id + "#" + std::to_string(chunks_[i].chunk_index));
        }
    }
}

const corpus::Chunk* ChunkStore::find(const vindex::ChunkRef& ref) const {
    const auto it = by_ref_.find(ref);
    return it == by_ref_.end() ? nullptr : &chunks_[it->second];
}

std::string render_triple(const kgraph::EvidenceTriple& t) {
    return "[" + t.entity + ", " + t.source + ", " + t.definition + "]";
}

json to_json(const ContextBundle& bundle) {
    json hits = json::array();
    for (const auto& h : bundle.hits) {
        hits.push_back({{"doc_id", h.hit.ref.doc_id},
                        {"chunk_index", h.hit.ref.chunk_index},
                        {"score", h.hit.score},
                        {"text", h.text}});
    }
    json triples = json::array();
    for (const auto& t : bundle.triples) {
        triples.push_back({{"entity", t.entity}, {"source", t.source}, {"definition", t.definition}});
    }
    json summaries = json::array();
    for (const auto& s : bundle.summaries) summaries.push_back({{"tag_prefix", s.tag_prefix}, {"text", s.text}});
    return {{"hits", hits}, {"triples", triples}, {"summaries", summaries}, {"fallback", bundle.fallback}};
}

ContextBundle bundle_from_json(const json& obj) {
    ContextBundle b;
    try {
        for (const auto& h : obj.at("hits")) {
            BundleHit bh;
            bh.hit.ref = {h.at("doc_id").get<std::string>(), h.at("chunk_index").get<std::size_t>()};
            bh.hit.score = h.at("score").get<double>();
            bh.text = h.at("text").get<std::string>();
            b.total_chars += bh.text.size();
            b.hits.push_back(std::move(bh));
        }
        for (const auto& t : obj.at("triples")) {
            b.triples.push_back({t.at("entity").get<std::string>(), t.at("source").get<std::string>(),
                                 t.at("definition").get<std::string>()});
            b.total_chars += render_triple(b.triples.back()).size();
        }
        for (const auto& s : obj.at("summaries")) {
            const auto prefix = s.at("tag_prefix").get<std::string>();
            b.summaries.push_back({prefix, s.at("text").get<std::string>(), text::path_depth(prefix)});
            b.total_chars += b.summaries.back().text.size();
        }
        b.fallback = obj.at("fallback").get<bool>();
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed context bundle: ") + e.what());
    }
    return b;
}

namespace {

// Deepest tag of the best-ranked tagged hit, restricted to the active filter.
std::optional<std::string> matched_tag(const std::vector<BundleHit>& hits, const vindex::TagFilter& filter) {
    for (const auto& h : hits) {
        std::optional<std::string> best;
        for (const auto& tag : h.tags) {
            if (!vindex::matches_filter({tag}, filter)) continue;
            if (!best || text::path_depth(tag) > text::path_depth(*best)) best = tag;
        }
        if (best) return best;
    }
    return std::nullopt;
}

}  // namespace

ContextBundle u_retrieve(const RetrievalRequest& req, const RetrievalContext& ctx) {
    req.validate();
    if (ctx.index.size() == 0) fail(ErrorCode::state, "empty index");
    if (req.mode == Mode::graph_rag && (ctx.graph == nullptr || ctx.linker == nullptr || ctx.matcher == nullptr)) {
        fail(ErrorCode::state, "graph_rag mode requires a loaded knowledge graph");
    }

    const auto query = ctx.embedder.embed(req.query);
    if (query.is_zero()) fail(ErrorCode::invalid_argument, "zero query embedding");

    ContextBundle bundle;
    vindex::TagFilter filter;
    if (req.tag_hints && !req.tag_hints->empty()) {
        filter = req.tag_hints;
        if (ctx.index.count_eligible(filter) == 0) {
            bundle.fallback = true;
            filter.reset();
        }
    }

    std::size_t total = 0;
    for (const auto& hit : ctx.index.search_topk(query, req.k, filter)) {
        const corpus::Chunk* chunk = ctx.chunks.find(hit.ref);
        if (chunk == nullptr) {
            fail(ErrorCode::state, "index entry " + hit.ref.doc_id + "#" + std::to_string(hit.ref.chunk_index) +
                                       " has no chunk text");
        }
        if (total + chunk->text.size() > req.context_budget_chars) break;
        total += chunk->text.size();
        bundle.hits.push_back({hit, chunk->text, chunk->tags});
    }

    if (req.mode == Mode::graph_rag) {
        std::set<std::pair<std::string, std::string>> seen;
        bool full = false;
        for (const auto& h : bundle.hits) {
            for (const auto& mention : ctx.matcher->scan(h.text)) {
                auto triple = ctx.linker->link(mention.text, 1).best;
                if (!seen.emplace(text::fold_case(triple.entity), triple.source).second) continue;
                const std::size_t len = render_triple(triple).size();
                if (total + len > req.context_budget_chars) {
                    full = true;
                    break;
                }
                total += len;
                bundle.triples.push_back(std::move(triple));
            }
            if (full) break;
        }
    }

    if (const auto tag = matched_tag(bundle.hits, filter)) {
        const auto prefixes = text::path_prefixes(*tag);
        for (auto it = prefixes.rbegin(); it != prefixes.rend(); ++it) {
            const LevelSummary* s = ctx.summaries.find(*it);
            if (s == nullptr) continue;
            if (total + s->text.size() > req.context_budget_chars) break;
            total += s->text.size();
            bundle.summaries.push_back(*s);
        }
    }

    bundle.total_chars = total;
    return bundle;
}

}  // namespace oncorag::retrieve
