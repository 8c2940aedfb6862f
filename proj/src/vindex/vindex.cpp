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

#include "vindex/vindex.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>

#include "common/error.hpp"
#include "common/text.hpp"
#include "json.hpp"

namespace oncorag::vindex {

namespace {

constexpr char kMagic[8] = {'O', 'N', 'C', 'O', 'V', 'I', 'D', 'X'};

double float_norm(const std::vector<float>& v) {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sum);
}

bool hit_before(const SearchHit& a, const SearchHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.entry_id < b.entry_id;
}

template <typename T>
void put_le(std::string& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.append(bytes, sizeof(T));
}

template <typename T>
T get_le(std::istream& in, const std::string& what) {
    char bytes[sizeof(T)];
    if (!in.read(bytes, sizeof(T))) fail(ErrorCode::parse, "index file truncated while reading " + what);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

std::size_t ChunkRefHash::operator()(const ChunkRef& r) const noexcept {
    return std::hash<std::string>{}(r.doc_id) ^ (std::hash<std::size_t>{}(r.chunk_index) * 0x9e3779b97f4a7c15ULL);
}

bool matches_filter(const corpus::TagSet& tags, const TagFilter& filter) {
    if (!filter) return true;
    for (const auto& tag : tags) {
        for (const auto& prefix : *filter) {
            if (text::starts_with_path(tag, prefix)) return true;
        }
    }
    return false;
}

VectorIndex::VectorIndex(std::size_t dim) : dim_(dim) {
    if (dim == 0) fail(ErrorCode::invalid_argument, "index dimension must be positive");
}

VectorIndex::VectorIndex(VectorIndex&& other) noexcept : dim_(other.dim_) {
    std::unique_lock lock(other.mutex_);
    entries_ = std::move(other.entries_);
    by_ref_ = std::move(other.by_ref_);
}

std::size_t VectorIndex::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::size_t VectorIndex::insert(ChunkRef ref, const embed::EmbeddingVector& vector, corpus::TagSet tags) {
    if (vector.dim() != dim_) {
        fail(ErrorCode::invalid_argument, "dimension mismatch: index has " + std::to_string(dim_) + ", vector has " +
                                              std::to_string(vector.dim()));
    }
    IndexEntry e;
    e.ref = std::move(ref);
    e.tags = std::move(tags);
    e.vector.reserve(dim_);
    for (double v : vector.values) {
        if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "vector has a non-finite entry");
        e.vector.push_back(static_cast<float>(v));
    }
    e.norm = float_norm(e.vector);
    if (e.norm == 0.0) fail(ErrorCode::invalid_argument, "zero vector cannot be indexed");

    std::unique_lock lock(mutex_);
    if (by_ref_.contains(e.ref)) {
        fail(ErrorCode::invalid_argument,
             "duplicate chunk_ref " + e.ref.doc_id + "#" + std::to_string(e.ref.chunk_index));
    }
    e.entry_id = entries_.size();
    by_ref_.emplace(e.ref, e.entry_id);
    entries_.push_back(std::move(e));
    return entries_.back().entry_id;
}

std::vector<SearchHit> VectorIndex::search_topk(const embed::EmbeddingVector& query, std::size_t k,
                                                const TagFilter& filter) const {
    if (k == 0) fail(ErrorCode::invalid_argument, "k must be >= 1");
    if (query.dim() != dim_) {
        fail(ErrorCode::invalid_argument, "dimension mismatch: index has " + std::to_string(dim_) + ", query has " +
                                              std::to_string(query.dim()));
    }
    const double qnorm = query.norm();
    if (qnorm == 0.0) fail(ErrorCode::invalid_argument, "zero query vector");

    std::shared_lock lock(mutex_);
    std::vector<SearchHit> hits;
    for (const auto& e : entries_) {
        if (!matches_filter(e.tags, filter)) continue;
        double dot = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) dot += query.values[i] * static_cast<double>(e.vector[i]);
        hits.push_back({e.ref, dot / (qnorm * e.norm), e.entry_id});
    }
    const std::size_t keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(), hit_before);
    hits.resize(keep);
    return hits;
}

std::size_t VectorIndex::count_eligible(const TagFilter& filter) const {
    std::shared_lock lock(mutex_);
    return static_cast<std::size_t>(
        std::count_if(entries_.begin(), entries_.end(), [&](const IndexEntry& e) { return matches_filter(e.tags, filter); }));
}

std::optional<IndexEntry> VectorIndex::entry(std::size_t entry_id) const {
    std::shared_lock lock(mutex_);
    if (entry_id >= entries_.size()) return std::nullopt;
    return entries_[entry_id];
}

std::vector<IndexEntry> VectorIndex::entries() const {
    std::shared_lock lock(mutex_);
    return entries_;
}

// Layout: magic[8] | u32 version | u32 dim | u64 count | count*dim f32 | u64 trailer_len | trailer JSON.
void VectorIndex::save(const std::filesystem::path& path) const {
    std::shared_lock lock(mutex_);
    std::string out;
    out.reserve(32 + entries_.size() * dim_ * sizeof(float));
    out.append(kMagic, sizeof kMagic);
    put_le<std::uint32_t>(out, kFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim_));
    put_le<std::uint64_t>(out, entries_.size());
    for (const auto& e : entries_) {
        for (float v : e.vector) put_le<float>(out, v);
    }
    nlohmann::json trailer = {{"entries", nlohmann::json::array()}};
    for (const auto& e : entries_) {
        trailer["entries"].push_back({{"doc_id", e.ref.doc_id}, {"chunk_index", e.ref.chunk_index}, {"tags", e.tags}});
    }
    const std::string meta = trailer.dump();
    put_le<std::uint64_t>(out, meta.size());
    out += meta;

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCode::io, "cannot write " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) fail(ErrorCode::io, "write failed for " + path.string());
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
        fail(ErrorCode::parse, path.string() + " is not an index file");
    }
    const auto version = get_le<std::uint32_t>(in, "version");
    if (version != kFormatVersion) fail(ErrorCode::parse, "unsupported index format version " + std::to_string(version));
    const auto dim = get_le<std::uint32_t>(in, "dimension");
    const auto count = get_le<std::uint64_t>(in, "count");

    std::vector<std::vector<float>> vectors(count, std::vector<float>(dim));
    for (auto& v : vectors) {
        for (auto& x : v) x = get_le<float>(in, "vectors");
    }
    const auto meta_len = get_le<std::uint64_t>(in, "trailer length");
    std::string meta(meta_len, '\0');
    if (!in.read(meta.data(), static_cast<std::streamsize>(meta_len))) fail(ErrorCode::parse, "index trailer truncated");

    nlohmann::json trailer;
    try {
        trailer = nlohmann::json::parse(meta);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::parse, std::string("index trailer is not JSON: ") + e.what());
    }
    const auto& rows = trailer.at("entries");
    if (rows.size() != count) fail(ErrorCode::parse, "index trailer entry count does not match header");

    VectorIndex index(dim);
    index.entries_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        IndexEntry e;
        e.entry_id = i;
        e.ref = {rows[i].at("doc_id").get<std::string>(), rows[i].at("chunk_index").get<std::size_t>()};
        e.tags = rows[i].at("tags").get<corpus::TagSet>();
        e.vector = std::move(vectors[i]);
        e.norm = float_norm(e.vector);
        if (!index.by_ref_.emplace(e.ref, i).second) fail(ErrorCode::parse, "index file has duplicate chunk_ref");
        index.entries_.push_back(std::move(e));
    }
    return index;
}

}  // namespace oncorag::vindex
