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
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "kgraph/graph.hpp"

namespace oncorag::kgraph {

struct TransEConfig {
    std::size_t dim = 50;
    double margin = 1.0;
    double learning_rate = 0.01;
    std::size_t epochs = 500;
    std::size_t negatives_per_positive = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

struct KgEmbeddings {
    TransEConfig config;
    std::map<std::string, std::vector<float>> node_vecs;
    std::map<std::string, std::vector<float>> rel_vecs;
    // Mean hinge term per epoch, over the (positive, corruption) pairs sampled.
    std::vector<double> epoch_loss;

    std::size_t dim() const noexcept { return config.dim; }
};

// Called after each epoch, once node vectors have been renormalized.
using EpochObserver = std::function<void(std::size_t epoch, double mean_loss, const KgEmbeddings&)>;

// SGD on sum max(0, margin + d(h+r, t) - d(h'+r, t')) with L2 distance.
// Each positive gets `negatives_per_positive` corruptions of head or tail
// (chosen by coin flip) with a uniformly drawn node; corruptions that are
// true edges are redrawn. Deterministic for a given config.seed.
KgEmbeddings train_transe(const KnowledgeGraph& graph, const TransEConfig& config,
                          const EpochObserver& observer = {});

// Embeddings as initialized for `config.seed`, before any update.
KgEmbeddings init_transe(const KnowledgeGraph& graph, const TransEConfig& config);

// -||h + r - t||_2; higher is more plausible.
double score_triple(const KgEmbeddings& emb, std::string_view head, std::string_view relation,
                    std::string_view tail);

struct LinkPredictionStats {
    double mean_rank = 0.0;
    double hits_at_1 = 0.0;
};

// Tail prediction over every graph edge. Other true tails of (h, r) are
// removed before ranking; rank = 1 + number of strictly better candidates.
LinkPredictionStats filtered_tail_ranking(const KnowledgeGraph& graph, const KgEmbeddings& emb);

// Mean hinge term over every (edge, corruption) pair, where a corruption
// replaces the head or tail by any node that does not form a true edge.
// Costs O(edges * nodes * dim); meant for small graphs.
double corruption_loss(const KnowledgeGraph& graph, const KgEmbeddings& emb, double margin);

// JSON object: dim, seed, config, plus base64 little-endian float32 arrays
// under "nodes" and "relations" keyed by id.
std::string serialize_embeddings(const KgEmbeddings& emb);
KgEmbeddings deserialize_embeddings(std::string_view json_text);
void save_embeddings(const std::filesystem::path& path, const KgEmbeddings& emb);
KgEmbeddings load_embeddings(const std::filesystem::path& path);

}  // namespace oncorag::kgraph
