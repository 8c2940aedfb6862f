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

#include "corpus/corpus.hpp"

#include <unordered_set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace oncorag::corpus {

using nlohmann::json;

const char* to_string(Language lang) noexcept { return lang == Language::en ? "en" : "de"; }

Language language_from_string(std::string_view code) {
    if (code == "en") return Language::en;
    if (code == "de") return Language::de;
    fail(ErrorCode::invalid_argument, "language must be \"en\" or \"de\", got \"" + std::string(code) + "\"");
}

void ChunkConfig::validate() const {
    if (max_chunk_chars < 4) fail(ErrorCode::invalid_argument, "max_chunk_chars must be >= 4");
    if (target_chars > max_chunk_chars) {
        fail(ErrorCode::invalid_argument, "target_chars must not exceed max_chunk_chars");
    }
    if (!(merge_threshold >= -1.0 && merge_threshold <= 1.0)) {
        fail(ErrorCode::invalid_argument, "merge_threshold must lie in [-1, 1]");
    }
}

std::string normalize_text(std::string_view raw) {
    // Unify line endings and strip trailing whitespace line by line.
    std::string lines;
    lines.reserve(raw.size());
    std::size_t line_start = 0;
    auto flush_line = [&](std::size_t end) {
        std::size_t stop = end;
        while (stop > line_start) {
            const char c = lines[stop - 1];
            if (c != ' ' && c != '\t' && c != '\f' && c != '\v') break;
            --stop;
        }
        lines.resize(stop);
    };
    for (std::size_t i = 0; i < raw.size(); ++i) {
        char c = raw[i];
        if (c == '\r') {
            if (i + 1 < raw.size() && raw[i + 1] == '\n') ++i;
            c = '\n';
        }
        if (c == '\n') {
            flush_line(lines.size());
            lines.push_back('\n');
            line_start = lines.size();
        } else {
            lines.push_back(c);
        }
    }
    flush_line(lines.size());

    std::string out;
    out.reserve(lines.size());
    std::size_t newline_run = 0;
    for (char c : lines) {
        if (c == '\n') {
            if (++newline_run > 2) continue;
        } else {
            newline_run = 0;
        }
        out.push_back(c);
    }

    const auto first = out.find_first_not_of('\n');
    if (first == std::string::npos) return {};
    const auto last = out.find_last_not_of('\n');
    return out.substr(first, last - first + 1);
}

bool is_normalized(std::string_view text) { return normalize_text(text) == text; }

std::vector<Segment> split_paragraphs(const Document& doc) {
    std::vector<Segment> out;
    const std::string_view t = doc.text;
    std::size_t start = 0;
    while (start <= t.size()) {
        auto pos = t.find(kParagraphSeparator, start);
        if (pos == std::string_view::npos) pos = t.size();
        if (pos > start) out.push_back({{start, pos}, std::string(t.substr(start, pos - start))});
        start = pos + kParagraphSeparator.size();
    }
    return out;
}

namespace {

bool is_space(char c) noexcept { return c == ' ' || c == '\n' || c == '\t'; }

// Picks a cut position in (start, start + max] for the span [start, end).
std::size_t find_cut(std::string_view t, std::size_t start, std::size_t max) {
    const std::size_t limit = start + max;
    std::size_t after_sentence = 0;
    std::size_t after_space = 0;
    for (std::size_t c = limit; c > start + 1; --c) {
        if (!is_space(t[c - 1])) continue;
        if (after_space == 0) after_space = c;
        const char prev = t[c - 2];
        if (prev == '.' || prev == '!' || prev == '?') {
            after_sentence = c;
            break;
        }
    }
    if (after_sentence != 0) return after_sentence;
    if (after_space != 0) return after_space;
    std::size_t cut = text::utf8_floor(t, limit);
    if (cut <= start) cut = limit;
    return cut;
}

std::vector<Span> pieces_of(std::string_view t, const Segment& seg, std::size_t max) {
    std::vector<Span> out;
    std::size_t start = seg.span.start;
    while (seg.span.end - start > max) {
        const std::size_t cut = find_cut(t, start, max);
        out.push_back({start, cut});
        start = cut;
    }
    out.push_back({start, seg.span.end});
    return out;
}

double similarity_or_zero(const embed::EmbeddingVector& a, const embed::EmbeddingVector& b) {
    if (a.is_zero() || b.is_zero()) return 0.0;
    return embed::cosine_similarity(a, b);
}

embed::EmbeddingVector embed_or_zero(const embed::Embedder& embedder, std::string_view s) {
    if (text::trim(s).empty()) return {std::vector<double>(embedder.dim(), 0.0)};
    return embedder.embed(s);
}

}  // namespace

std::vector<Chunk> semantic_chunk(const Document& doc, const embed::Embedder& embedder,
                                  const ChunkConfig& cfg) {
    cfg.validate();
    if (!is_normalized(doc.text)) {
        fail(ErrorCode::invalid_argument, "document " + doc.id + " is not normalized");
    }
    const std::string_view t = doc.text;

    std::vector<Span> pieces;
    for (const auto& seg : split_paragraphs(doc)) {
        for (const auto& p : pieces_of(t, seg, cfg.max_chunk_chars)) pieces.push_back(p);
    }

    std::vector<Span> spans;
    if (!pieces.empty()) {
        Span current = pieces.front();
        embed::EmbeddingVector current_vec = embed_or_zero(embedder, t.substr(current.start, current.size()));
        for (std::size_t i = 1; i < pieces.size(); ++i) {
            const Span& next = pieces[i];
            const bool fits = next.end - current.start <= cfg.max_chunk_chars;
            bool merge = false;
            if (fits) {
                merge = current.size() < cfg.target_chars;
                if (!merge) {
                    const auto next_vec = embed_or_zero(embedder, t.substr(next.start, next.size()));
                    merge = similarity_or_zero(current_vec, next_vec) >= cfg.merge_threshold;
                }
            }
            if (merge) {
                current.end = next.end;
                current_vec = embed_or_zero(embedder, t.substr(current.start, current.size()));
            } else {
                spans.push_back(current);
                current = next;
                current_vec = embed_or_zero(embedder, t.substr(current.start, current.size()));
            }
        }
        spans.push_back(current);
    }

    std::vector<Chunk> chunks;
    chunks.reserve(spans.size());
    for (std::size_t i = 0; i < spans.size(); ++i) {
        Chunk c;
        c.doc_id = doc.id;
        c.chunk_index = i;
        c.span = spans[i];
        c.text = std::string(t.substr(spans[i].start, spans[i].size()));
        c.tags = doc.tags;
        const std::size_t next_start = i + 1 < spans.size() ? spans[i + 1].start : t.size();
        c.separator = std::string(t.substr(spans[i].end, next_start - spans[i].end));
        chunks.push_back(std::move(c));
    }
    return chunks;
}

std::string reconstruct(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const auto& c : chunks) {
        out += c.text;
        out += c.separator;
    }
    return out;
}

namespace {

const json& require(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key)) fail(ErrorCode::parse, std::string("missing key \"") + key + "\"");
    return obj.at(key);
}

std::string require_string(const json& obj, const char* key) {
    const auto& v = require(obj, key);
    if (!v.is_string()) fail(ErrorCode::parse, std::string("key \"") + key + "\" must be a string");
    return v.get<std::string>();
}

TagSet tags_from(const json& obj) {
    TagSet tags;
    if (!obj.contains("tags")) return tags;
    const auto& arr = obj.at("tags");
    if (!arr.is_array()) fail(ErrorCode::parse, "\"tags\" must be an array of strings");
    for (const auto& t : arr) {
        if (!t.is_string()) fail(ErrorCode::parse, "\"tags\" must be an array of strings");
        auto tag = t.get<std::string>();
        if (tag.empty()) fail(ErrorCode::parse, "empty tag path");
        tags.insert(std::move(tag));
    }
    return tags;
}

}  // namespace

json to_json(const Document& doc) {
    return {{"id", doc.id},
            {"text", doc.text},
            {"language", to_string(doc.language)},
            {"tags", doc.tags},
            {"source", doc.source}};
}

Document document_from_json(const json& obj) {
    Document d;
    d.id = require_string(obj, "id");
    d.text = require_string(obj, "text");
    d.language = language_from_string(require_string(obj, "language"));
    d.tags = tags_from(obj);
    if (obj.contains("source")) d.source = require_string(obj, "source");
    if (d.id.empty()) fail(ErrorCode::parse, "document id must be non-empty");
    if (!text::valid_utf8(d.text) || !text::valid_utf8(d.id)) {
        fail(ErrorCode::parse, "document " + d.id + " is not valid UTF-8");
    }
    return d;
}

json to_json(const Chunk& c) {
    return {{"doc_id", c.doc_id},   {"chunk_index", c.chunk_index}, {"start", c.span.start},
            {"end", c.span.end},    {"text", c.text},               {"tags", c.tags},
            {"separator", c.separator}};
}

Chunk chunk_from_json(const json& obj) {
    Chunk c;
    c.doc_id = require_string(obj, "doc_id");
    c.chunk_index = require(obj, "chunk_index").get<std::size_t>();
    c.span.start = require(obj, "start").get<std::size_t>();
    c.span.end = require(obj, "end").get<std::size_t>();
    c.text = require_string(obj, "text");
    c.tags = tags_from(obj);
    if (obj.contains("separator")) c.separator = require_string(obj, "separator");
    if (c.span.end < c.span.start || c.span.size() != c.text.size()) {
        fail(ErrorCode::parse, "chunk " + c.doc_id + "#" + std::to_string(c.chunk_index) + " has an inconsistent span");
    }
    return c;
}

std::vector<Document> load_documents(const std::filesystem::path& path, bool normalize) {
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    io::for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        Document d;
        try {
            d = document_from_json(obj);
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
        if (normalize) d.text = normalize_text(d.text);
        if (d.text.empty()) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line) + ": document " + d.id + " has empty text");
        }
        if (!seen.insert(d.id).second) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line) + ": duplicate document id " + d.id);
        }
        docs.push_back(std::move(d));
    });
    return docs;
}

void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs) {
    std::vector<json> rows;
    rows.reserve(docs.size());
    for (const auto& d : docs) rows.push_back(to_json(d));
    io::write_jsonl(path, rows);
}

std::vector<Chunk> load_chunks(const std::filesystem::path& path) {
    std::vector<Chunk> chunks;
    io::for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        try {
            chunks.push_back(chunk_from_json(obj));
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(line) + ": " + e.what());
        } catch (const json::exception& e) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return chunks;
}

void save_chunks(const std::filesystem::path& path, const std::vector<Chunk>& chunks) {
    std::vector<json> rows;
    rows.reserve(chunks.size());
    for (const auto& c : chunks) rows.push_back(to_json(c));
    io::write_jsonl(path, rows);
}

}  // namespace oncorag::corpus
