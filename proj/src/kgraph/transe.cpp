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

#include "kgraph/transe.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/random.hpp"
#include "common/text.hpp"
#include "json.hpp"

namespace oncorag::kgraph {

namespace {

constexpr std::size_t kMaxCorruptionDraws = 1000;

using Vec = std::vector<float>;

void normalize(Vec& v) {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * x;
    const double n = std::sqrt(sum);
    if (n == 0.0) return;
    for (float& x : v) x = static_cast<float>(x / n);
}

// h + r - t, in double.
std::vector<double> residual(const Vec& h, const Vec& r, const Vec& t) {
    std::vector<double> out(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        out[i] = static_cast<double>(h[i]) + static_cast<double>(r[i]) - static_cast<double>(t[i]);
    }
    return out;
}

double l2(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

struct Triple {
    std::size_t h, r, t;
};

}  // namespace

void TransEConfig::validate() const {
    if (dim == 0) fail(ErrorCode::invalid_argument, "TransE dim must be positive");
    if (!(margin > 0.0)) fail(ErrorCode::invalid_argument, "TransE margin must be > 0");
    if (!(learning_rate > 0.0)) fail(ErrorCode::invalid_argument, "TransE learning_rate must be > 0");
    if (negatives_per_positive == 0) fail(ErrorCode::invalid_argument, "negatives_per_positive must be >= 1");
}

namespace {

struct Model {
    std::vector<Vec> nodes;
    std::vector<Vec> rels;
};

Model initial_model(const KnowledgeGraph& graph, const TransEConfig& config, Rng& rng) {
    const double bound = 6.0 / std::sqrt(static_cast<double>(config.dim));
    Model m;
    auto draw = [&] {
        Vec v(config.dim);
        for (float& x : v) x = static_cast<float>(rng.uniform(-bound, bound));
        normalize(v);
        return v;
    };
    for (std::size_t i = 0; i < graph.node_count(); ++i) m.nodes.push_back(draw());
    for (std::size_t i = 0; i < graph.relations().size(); ++i) m.rels.push_back(draw());
    return m;
}

KgEmbeddings to_embeddings(const KnowledgeGraph& graph, const TransEConfig& config, const Model& m) {
    KgEmbeddings emb;
    emb.config = config;
    for (std::size_t i = 0; i < graph.node_count(); ++i) emb.node_vecs[graph.nodes()[i].node_id] = m.nodes[i];
    for (std::size_t i = 0; i < graph.relations().size(); ++i) emb.rel_vecs[graph.relations()[i]] = m.rels[i];
    return emb;
}

}  // namespace

KgEmbeddings init_transe(const KnowledgeGraph& graph, const TransEConfig& config) {
    config.validate();
    if (graph.empty()) fail(ErrorCode::invalid_argument, "knowledge graph is empty");
    Rng rng(config.seed);
    return to_embeddings(graph, config, initial_model(graph, config, rng));
}

KgEmbeddings train_transe(const KnowledgeGraph& graph, const TransEConfig& config, const EpochObserver& observer) {
    config.validate();
    if (graph.empty() || graph.edge_count() == 0) fail(ErrorCode::invalid_argument, "knowledge graph has no edges");

    Rng rng(config.seed);
    Model model = initial_model(graph, config, rng);

    std::vector<Triple> triples;
    triples.reserve(graph.edge_count());
    for (const auto& e : graph.edges()) {
        const auto r = static_cast<std::size_t>(
            std::find(graph.relations().begin(), graph.relations().end(), e.relation) - graph.relations().begin());
        triples.push_back({*graph.node_index(e.head), r, *graph.node_index(e.tail)});
    }
    auto is_true_edge = [&](std::size_t h, std::size_t r, std::size_t t) {
        return graph.has_edge({graph.nodes()[h].node_id, graph.relations()[r], graph.nodes()[t].node_id});
    };

    const std::size_t n_nodes = graph.node_count();
    const double lr = config.learning_rate;
    std::vector<std::size_t> order(triples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::vector<double> history;
    history.reserve(config.epochs);
    for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
        rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t idx : order) {
            const Triple pos = triples[idx];
            for (std::size_t k = 0; k < config.negatives_per_positive; ++k) {
                Triple neg = pos;
                bool found = false;
                for (std::size_t draw = 0; draw < kMaxCorruptionDraws && !found; ++draw) {
                    neg = pos;
                    const bool corrupt_head = rng.coin();
                    const auto candidate = static_cast<std::size_t>(rng.below(n_nodes));
                    (corrupt_head ? neg.h : neg.t) = candidate;
                    found = !is_true_edge(neg.h, neg.r, neg.t);
                }
                if (!found) continue;

                const auto pos_res = residual(model.nodes[pos.h], model.rels[pos.r], model.nodes[pos.t]);
                const auto neg_res = residual(model.nodes[neg.h], model.rels[neg.r], model.nodes[neg.t]);
                const double d_pos = l2(pos_res);
                const double d_neg = l2(neg_res);
                const double hinge = config.margin + d_pos - d_neg;
                ++pairs;
                if (hinge <= 0.0) continue;
                loss_sum += hinge;

                // d||x||/dx = x / ||x||; both gradients come from the same snapshot.
                for (std::size_t i = 0; i < config.dim; ++i) {
                    const double gp = d_pos > 0.0 ? pos_res[i] / d_pos : 0.0;
                    const double gn = d_neg > 0.0 ? neg_res[i] / d_neg : 0.0;
                    model.nodes[pos.h][i] = static_cast<float>(model.nodes[pos.h][i] - lr * gp);
                    model.nodes[pos.t][i] = static_cast<float>(model.nodes[pos.t][i] + lr * gp);
                    model.nodes[neg.h][i] = static_cast<float>(model.nodes[neg.h][i] + lr * gn);
                    model.nodes[neg.t][i] = static_cast<float>(model.nodes[neg.t][i] - lr * gn);
                    model.rels[pos.r][i] = static_cast<float>(model.rels[pos.r][i] - lr * (gp - gn));
                }
            }
        }
        for (auto& v : model.nodes) normalize(v);
        const double mean = pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0;
        history.push_back(mean);
        if (observer) {
            KgEmbeddings snapshot = to_embeddings(graph, config, model);
            snapshot.epoch_loss = history;
            observer(epoch, mean, snapshot);
        }
    }

    KgEmbeddings emb = to_embeddings(graph, config, model);
    emb.epoch_loss = std::move(history);
    return emb;
}

double score_triple(const KgEmbeddings& emb, std::string_view head, std::string_view relation,
                    std::string_view tail) {
    const auto h = emb.node_vecs.find(std::string(head));
    const auto r = emb.rel_vecs.find(std::string(relation));
    const auto t = emb.node_vecs.find(std::string(tail));
    if (h == emb.node_vecs.end()) fail(ErrorCode::not_found, "unknown node " + std::string(head));
    if (t == emb.node_vecs.end()) fail(ErrorCode::not_found, "unknown node " + std::string(tail));
    if (r == emb.rel_vecs.end()) fail(ErrorCode::not_found, "unknown relation " + std::string(relation));
    if (h->second.size() != r->second.size() || h->second.size() != t->second.size()) {
        fail(ErrorCode::invalid_argument, "embedding dimensions disagree");
    }
    return -l2(residual(h->second, r->second, t->second));
}

LinkPredictionStats filtered_tail_ranking(const KnowledgeGraph& graph, const KgEmbeddings& emb) {
    if (graph.edge_count() == 0) fail(ErrorCode::invalid_argument, "knowledge graph has no edges");
    double rank_sum = 0.0;
    std::size_t hits = 0;
    for (const auto& e : graph.edges()) {
        const double target = score_triple(emb, e.head, e.relation, e.tail);
        std::size_t better = 0;
        for (const auto& n : graph.nodes()) {
            if (n.node_id == e.tail) continue;
            if (graph.has_edge({e.head, e.relation, n.node_id})) continue;
            if (score_triple(emb, e.head, e.relation, n.node_id) > target) ++better;
        }
        rank_sum += static_cast<double>(better + 1);
        hits += better == 0;
    }
    const auto n = static_cast<double>(graph.edge_count());
    return {rank_sum / n, static_cast<double>(hits) / n};
}

double corruption_loss(const KnowledgeGraph& graph, const KgEmbeddings& emb, double margin) {
    if (graph.edge_count() == 0) fail(ErrorCode::invalid_argument, "knowledge graph has no edges");
    double sum = 0.0;
    std::size_t pairs = 0;
    for (const auto& e : graph.edges()) {
        const double positive = score_triple(emb, e.head, e.relation, e.tail);
        for (const auto& n : graph.nodes()) {
            if (n.node_id != e.head && !graph.has_edge({n.node_id, e.relation, e.tail})) {
                sum += std::max(0.0, margin - positive + score_triple(emb, n.node_id, e.relation, e.tail));
                ++pairs;
            }
            if (n.node_id != e.tail && !graph.has_edge({e.head, e.relation, n.node_id})) {
                sum += std::max(0.0, margin - positive + score_triple(emb, e.head, e.relation, n.node_id));
                ++pairs;
            }
        }
    }
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

namespace {

std::string encode_floats(const Vec& v) {
    std::string bytes(v.size() * sizeof(float), '\0');
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto bits = std::bit_cast<std::uint32_t>(v[i]);
        for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
    return text::base64_encode(bytes);
}

Vec decode_floats(const std::string& encoded, std::size_t dim) {
    const std::string bytes = text::base64_decode(encoded);
    if (bytes.size() != dim * sizeof(float)) fail(ErrorCode::parse, "embedding array has the wrong length");
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
        v[i] = std::bit_cast<float>(bits);
    }
    return v;
}

}  // namespace

std::string serialize_embeddings(const KgEmbeddings& emb) {
    nlohmann::json j;
    j["format"] = "oncorag-transe";
    j["version"] = 1;
    j["dim"] = emb.config.dim;
    j["seed"] = emb.config.seed;
    j["config"] = {{"margin", emb.config.margin},
                   {"learning_rate", emb.config.learning_rate},
                   {"epochs", emb.config.epochs},
                   {"negatives_per_positive", emb.config.negatives_per_positive}};
    j["epoch_loss"] = emb.epoch_loss;
    j["nodes"] = nlohmann::json::object();
    j["relations"] = nlohmann::json::object();
    for (const auto& [id, v] : emb.node_vecs) j["nodes"][id] = encode_floats(v);
    for (const auto& [id, v] : emb.rel_vecs) j["relations"][id] = encode_floats(v);
    return j.dump(1) + "\n";
}

KgEmbeddings deserialize_embeddings(std::string_view json_text) {
    try {
        const auto j = nlohmann::json::parse(json_text);
        if (j.value("format", std::string()) != "oncorag-transe") fail(ErrorCode::parse, "not a TransE embeddings file");
        KgEmbeddings emb;
        emb.config.dim = j.at("dim").get<std::size_t>();
        emb.config.seed = j.at("seed").get<std::uint64_t>();
        const auto& c = j.at("config");
        emb.config.margin = c.at("margin").get<double>();
        emb.config.learning_rate = c.at("learning_rate").get<double>();
        emb.config.epochs = c.at("epochs").get<std::size_t>();
        emb.config.negatives_per_positive = c.at("negatives_per_positive").get<std::size_t>();
        if (j.contains("epoch_loss")) emb.epoch_loss = j.at("epoch_loss").get<std::vector<double>>();
        for (const auto& [id, v] : j.at("nodes").items()) emb.node_vecs[id] = decode_floats(v.get<std::string>(), emb.config.dim);
        for (const auto& [id, v] : j.at("relations").items()) emb.rel_vecs[id] = decode_floats(v.get<std::string>(), emb.config.dim);
        return emb;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("embeddings file: ") + e.what());
    }
}

void save_embeddings(const std::filesystem::path& path, const KgEmbeddings& emb) {
    io::write_file(path, serialize_embeddings(emb));
}

KgEmbeddings load_embeddings(const std::filesystem::path& path) {
    return deserialize_embeddings(io::read_file(path));
}

}  // namespace oncorag::kgraph
