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

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oncorag::embed {

inline constexpr std::size_t kDefaultDim = 4096;
inline constexpr std::size_t kMinDim = 8;

struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const noexcept { return values.size(); }
    double norm() const noexcept;
    bool is_zero() const noexcept;
};

enum class EmbedderKind { hashed_ngram, external };

const char* to_string(EmbedderKind kind) noexcept;
EmbedderKind embedder_kind_from_string(std::string_view name);

struct EmbedderSpec {
    EmbedderKind kind = EmbedderKind::hashed_ngram;
    std::size_t dim = kDefaultDim;
    std::uint64_t seed = 0;       // hashed_ngram only
    std::string endpoint;         // external only
    int timeout_ms = 30000;       // external only
    int retries = 2;              // external only

    void validate() const;
};

// (a . b) / (|a| |b|). Throws on dimension mismatch or a zero vector.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual std::size_t dim() const noexcept = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
};

// Signed feature hashing over word unigrams and per-token character trigrams.
class HashedNgramEmbedder final : public Embedder {
public:
    HashedNgramEmbedder(std::size_t dim, std::uint64_t seed);

    std::size_t dim() const noexcept override { return dim_; }
    EmbeddingVector embed(std::string_view text) const override;

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

// Client for an embedding service speaking {"texts": [...]} -> {"vectors": [[...], ...]}.
class ExternalEmbedder final : public Embedder {
public:
    explicit ExternalEmbedder(EmbedderSpec spec);

    std::size_t dim() const noexcept override { return spec_.dim; }
    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    EmbedderSpec spec_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec);

EmbeddingVector embed_text(const EmbedderSpec& spec, std::string_view text);

}  // namespace oncorag::embed
