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

#include "embed/embed.hpp"

#include <cmath>

#include "common/error.hpp"
#include "common/http.hpp"
#include "common/text.hpp"
#include "json.hpp"

namespace oncorag::embed {

double EmbeddingVector::norm() const noexcept {
    double sum = 0.0;
    for (double v : values) sum += v * v;
    return std::sqrt(sum);
}

bool EmbeddingVector::is_zero() const noexcept {
    for (double v : values) {
        if (v != 0.0) return false;
    }
    return true;
}

const char* to_string(EmbedderKind kind) noexcept {
    return kind == EmbedderKind::hashed_ngram ? "hashed_ngram" : "external";
}

EmbedderKind embedder_kind_from_string(std::string_view name) {
    if (name == "hashed_ngram") return EmbedderKind::hashed_ngram;
    if (name == "external") return EmbedderKind::external;
    fail(ErrorCode::invalid_argument, "unknown embedder kind: " + std::string(name));
}

void EmbedderSpec::validate() const {
    if (dim < kMinDim) fail(ErrorCode::invalid_argument, "embedding dimension must be >= 8");
    if (kind == EmbedderKind::hashed_ngram && !endpoint.empty()) {
        fail(ErrorCode::invalid_argument, "hashed_ngram embedder does not take an endpoint");
    }
    if (kind == EmbedderKind::external && endpoint.empty()) {
        fail(ErrorCode::invalid_argument, "external embedder requires an endpoint");
    }
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        fail(ErrorCode::invalid_argument, "dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                              std::to_string(b.dim()));
    }
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) fail(ErrorCode::invalid_argument, "undefined similarity");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

HashedNgramEmbedder::HashedNgramEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
    if (dim < kMinDim) fail(ErrorCode::invalid_argument, "embedding dimension must be >= 8");
}

EmbeddingVector HashedNgramEmbedder::embed(std::string_view text) const {
    if (text::trim(text).empty()) fail(ErrorCode::invalid_argument, "empty input");

    const std::uint64_t basis = text::kFnvOffsetBasis ^ seed_;
    EmbeddingVector out{std::vector<double>(dim_, 0.0)};
    auto add = [&](std::string_view feature) {
        const std::uint64_t h = text::fnv1a64(feature, basis);
        out.values[h % dim_] += (h >> 63) == 0 ? 1.0 : -1.0;
    };

    const std::string lowered = text::fold_case(text);
    std::size_t i = 0;
    while (i < lowered.size()) {
        while (i < lowered.size() && !text::is_word_byte(static_cast<unsigned char>(lowered[i]))) ++i;
        const std::size_t start = i;
        while (i < lowered.size() && text::is_word_byte(static_cast<unsigned char>(lowered[i]))) ++i;
        if (i == start) continue;

        const std::string_view token(lowered.data() + start, i - start);
        add(token);
        const auto cps = text::code_points(token);
        for (std::size_t k = 0; k + 3 <= cps.size(); ++k) {
            const auto begin = static_cast<std::size_t>(cps[k].data() - token.data());
            const auto end = static_cast<std::size_t>(cps[k + 2].data() - token.data()) + cps[k + 2].size();
            add(token.substr(begin, end - begin));
        }
    }

    const double n = out.norm();
    if (n > 0.0) {
        for (double& v : out.values) v /= n;
    }
    return out;
}

ExternalEmbedder::ExternalEmbedder(EmbedderSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
}

EmbeddingVector ExternalEmbedder::embed(std::string_view text) const {
    const std::string owned(text);
    auto batch = embed_batch(std::span<const std::string>(&owned, 1));
    return std::move(batch.front());
}

std::vector<EmbeddingVector> ExternalEmbedder::embed_batch(std::span<const std::string> texts) const {
    for (const auto& t : texts) {
        if (text::trim(t).empty()) fail(ErrorCode::invalid_argument, "empty input");
    }
    nlohmann::json request = {{"texts", nlohmann::json::array()}};
    for (const auto& t : texts) request["texts"].push_back(t);

    const std::string body =
        http::post_json(spec_.endpoint, request.dump(), {spec_.timeout_ms, spec_.retries});

    nlohmann::json response;
    try {
        response = nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorCode::transport, std::string("embedding service returned invalid JSON: ") + e.what());
    }
    if (!response.contains("vectors") || !response["vectors"].is_array() ||
        response["vectors"].size() != texts.size()) {
        fail(ErrorCode::transport, "embedding service response lacks one vector per text");
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& row : response["vectors"]) {
        if (!row.is_array() || row.size() != spec_.dim) {
            fail(ErrorCode::transport, "embedding service returned a vector of the wrong dimension");
        }
        EmbeddingVector v;
        v.values.reserve(spec_.dim);
        for (const auto& x : row) {
            if (!x.is_number()) fail(ErrorCode::transport, "embedding service returned a non-number");
            const double d = x.get<double>();
            if (!std::isfinite(d)) fail(ErrorCode::transport, "embedding service returned a non-finite value");
            v.values.push_back(d);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderSpec& spec) {
    spec.validate();
    if (spec.kind == EmbedderKind::hashed_ngram) return std::make_unique<HashedNgramEmbedder>(spec.dim, spec.seed);
    return std::make_unique<ExternalEmbedder>(spec);
}

EmbeddingVector embed_text(const EmbedderSpec& spec, std::string_view text) {
    return make_embedder(spec)->embed(text);
}

}  // namespace oncorag::embed
