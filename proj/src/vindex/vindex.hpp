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
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "corpus/corpus.hpp"
#include "embed/embed.hpp"

namespace oncorag::vindex {

struct ChunkRef {
    std::string doc_id;
    std::size_t chunk_index = 0;

    friend bool operator==(const ChunkRef&, const ChunkRef&) = default;
    friend auto operator<=>(const ChunkRef&, const ChunkRef&) = default;
};

struct ChunkRefHash {
    std::size_t operator()(const ChunkRef& r) const noexcept;
};

struct IndexEntry {
    std::size_t entry_id = 0;
    ChunkRef ref;
    std::vector<float> vector;
    corpus::TagSet tags;
    double norm = 0.0;
};

struct SearchHit {
    ChunkRef ref;
    double score = 0.0;
    std::size_t entry_id = 0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

// Tag paths are matched component-wise: prefix "Diagnosis" matches
// "Diagnosis" and "Diagnosis/TumorStage" but not "DiagnosisX".
using TagFilter = std::optional<std::vector<std::string>>;

bool matches_filter(const corpus::TagSet& tags, const TagFilter& filter);

// Exact cosine index over float32 vectors. Readers share a lock; insert is exclusive.
class VectorIndex {
public:
    static constexpr std::uint32_t kFormatVersion = 1;

    explicit VectorIndex(std::size_t dim);
    VectorIndex(VectorIndex&& other) noexcept;
    VectorIndex& operator=(VectorIndex&&) = delete;
    VectorIndex(const VectorIndex&) = delete;
    VectorIndex& operator=(const VectorIndex&) = delete;

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const;

    std::size_t insert(ChunkRef ref, const embed::EmbeddingVector& vector, corpus::TagSet tags);

    // Hits ordered by (score desc, entry_id asc); at most k of them.
    std::vector<SearchHit> search_topk(const embed::EmbeddingVector& query, std::size_t k,
                                       const TagFilter& filter = std::nullopt) const;

    std::size_t count_eligible(const TagFilter& filter) const;

    std::optional<IndexEntry> entry(std::size_t entry_id) const;
    std::vector<IndexEntry> entries() const;

    void save(const std::filesystem::path& path) const;
    static VectorIndex load(const std::filesystem::path& path);

private:
    std::size_t dim_;
    mutable std::shared_mutex mutex_;
    std::vector<IndexEntry> entries_;
    std::unordered_map<ChunkRef, std::size_t, ChunkRefHash> by_ref_;
};

}  // namespace oncorag::vindex
