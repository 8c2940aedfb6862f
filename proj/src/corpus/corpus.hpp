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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "embed/embed.hpp"
#include "json.hpp"

namespace oncorag::corpus {

enum class Language { en, de };

const char* to_string(Language lang) noexcept;
Language language_from_string(std::string_view code);

using TagSet = std::set<std::string>;

// Half-open byte range [start, end) into normalized document text.
struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    friend bool operator==(const Span&, const Span&) = default;
};

struct Document {
    std::string id;
    std::string text;
    Language language = Language::en;
    TagSet tags;
    std::string source;
};

struct Chunk {
    std::string doc_id;
    std::size_t chunk_index = 0;
    Span span;
    std::string text;
    TagSet tags;
    // Text between this chunk and the next one ("" for the last chunk).
    std::string separator;
};

struct Segment {
    Span span;
    std::string text;
};

struct ChunkConfig {
    std::size_t target_chars = 800;
    std::size_t max_chunk_chars = 1600;
    double merge_threshold = 0.35;

    void validate() const;
};

inline constexpr std::string_view kParagraphSeparator = "\n\n";

// Unifies line endings, strips trailing whitespace per line, collapses runs of
// three or more newlines to two, and trims leading/trailing newlines.
std::string normalize_text(std::string_view raw);

bool is_normalized(std::string_view text);

std::vector<Segment> split_paragraphs(const Document& doc);

// Greedy left-to-right merge of paragraph segments. A paragraph longer than
// max_chunk_chars is first cut at sentence ends, then whitespace, then at a
// code point boundary.
std::vector<Chunk> semantic_chunk(const Document& doc, const embed::Embedder& embedder,
                                  const ChunkConfig& cfg);

// Concatenates text + separator of each chunk.
std::string reconstruct(const std::vector<Chunk>& chunks);

nlohmann::json to_json(const Document& doc);
Document document_from_json(const nlohmann::json& obj);
nlohmann::json to_json(const Chunk& chunk);
Chunk chunk_from_json(const nlohmann::json& obj);

// Reads document JSONL; validates ids (non-empty, unique), text, language and UTF-8.
// When `normalize` is set the text is normalized on the way in.
std::vector<Document> load_documents(const std::filesystem::path& path, bool normalize);
void save_documents(const std::filesystem::path& path, const std::vector<Document>& docs);

std::vector<Chunk> load_chunks(const std::filesystem::path& path);
void save_chunks(const std::filesystem::path& path, const std::vector<Chunk>& chunks);

}  // namespace oncorag::corpus
