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

#include "app/engine.hpp"

#include <set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"
#include "corpus/corpus.hpp"
#include "embed/embed.hpp"
#include "evalharness/experiment.hpp"
#include "kgraph/graph.hpp"
#include "kgraph/linker.hpp"
#include "kgraph/transe.hpp"
#include "prompt/dataset.hpp"
#include "prompt/generator.hpp"
#include "prompt/parse.hpp"
#include "prompt/template.hpp"
#include "retrieve/retrieve.hpp"
#include "vindex/vindex.hpp"

namespace oncorag::app {

using nlohmann::json;
namespace fs = std::filesystem;

struct Snapshot {
    std::unique_ptr<embed::Embedder> embedder;
    std::optional<vindex::VectorIndex> index;
    retrieve::ChunkStore chunks;
    retrieve::SummaryStore summaries;
    std::unique_ptr<kgraph::KnowledgeGraph> graph;
    std::unique_ptr<kgraph::EntityLinker> linker;
    std::unique_ptr<kgraph::SurfaceMatcher> matcher;
    std::optional<kgraph::KgEmbeddings> kg_embeddings;
    std::optional<prompt::TemplateRegistry> templates;
    std::unique_ptr<prompt::Generator> generator;
};

namespace {

fs::path sidecar(const fs::path& index, const char* suffix) { return fs::path(index.string() + suffix); }

const std::string& required_path(const Settings& s, const char* key) {
    const auto& p = s.get(key);
    if (p.empty()) fail(ErrorCode::invalid_argument, std::string(key) + " is not set");
    if (!fs::exists(p)) fail(ErrorCode::not_found, std::string(key) + " does not exist: " + p);
    return p;
}

embed::EmbedderSpec embedder_spec(const Settings& s) {
    embed::EmbedderSpec spec;
    spec.kind = embed::embedder_kind_from_string(s.get("embedder"));
    spec.dim = s.size("embed_dim");
    spec.seed = s.u64("embed_seed");
    spec.endpoint = s.get("embed_endpoint");
    spec.timeout_ms = static_cast<int>(s.size("timeout_ms"));
    spec.retries = static_cast<int>(s.size("retries"));
    spec.validate();
    return spec;
}

std::unique_ptr<prompt::Generator> make_generator(const Settings& s) {
    const bool stub = s.flag("stub");
    const auto& endpoint = s.get("endpoint");
    if (stub == !endpoint.empty()) {
        fail(ErrorCode::invalid_argument, "exactly one generator mode is required: stub or endpoint");
    }
    if (stub) return std::make_unique<prompt::StubGenerator>(prompt::StubGenerator::load(required_path(s, "fixtures_path")));
    http::PostOptions opts{static_cast<int>(s.size("timeout_ms")), static_cast<int>(s.size("retries"))};
    return std::make_unique<prompt::HttpGenerator>(endpoint, opts);
}

std::shared_ptr<const Snapshot> load_snapshot(const Settings& s, unsigned flags) {
    auto snap = std::make_shared<Snapshot>();
    snap->embedder = embed::make_embedder(embedder_spec(s));
    if (flags & load_index) {
        const fs::path path = required_path(s, "index_path");
        auto index = vindex::VectorIndex::load(path);
        if (index.dim() != snap->embedder->dim()) {
            fail(ErrorCode::state, "index dimension " + std::to_string(index.dim()) + " does not match embed_dim " +
                                       std::to_string(snap->embedder->dim()));
        }
        snap->index.emplace(std::move(index));
        snap->chunks = retrieve::ChunkStore(corpus::load_chunks(sidecar(path, ".chunks.jsonl")));
        snap->summaries = retrieve::SummaryStore::load(sidecar(path, ".summaries.jsonl"));
    }
    if (flags & load_graph) {
        snap->graph = std::make_unique<kgraph::KnowledgeGraph>(kgraph::load_graph_tsv(required_path(s, "graph_path")));
        snap->linker = std::make_unique<kgraph::EntityLinker>(*snap->graph, *snap->embedder);
        snap->matcher = std::make_unique<kgraph::SurfaceMatcher>(*snap->graph);
    }
    if (flags & load_embeddings) {
        snap->kg_embeddings = kgraph::load_embeddings(required_path(s, "embeddings_path"));
    }
    if (flags & load_generator) {
        snap->templates = prompt::TemplateRegistry::load_dir(required_path(s, "templates_dir"));
        snap->generator = make_generator(s);
    }
    return snap;
}

retrieve::RetrievalRequest request_defaults(const Settings& s) {
    retrieve::RetrievalRequest d;
    d.k = s.size("k");
    d.mode = retrieve::mode_from_string(s.get("mode"));
    d.language = corpus::language_from_string(s.get("language"));
    d.context_budget_chars = s.size("context_budget_chars");
    return d;
}

std::optional<retrieve::RetrievalContext> retrieval_context(const Snapshot& snap) {
    if (!snap.index) return std::nullopt;
    return retrieve::RetrievalContext{*snap.index,        snap.chunks,        *snap.embedder,     snap.summaries,
                                      snap.graph.get(),   snap.linker.get(),  snap.matcher.get()};
}

const retrieve::RetrievalContext& require_index(const std::optional<retrieve::RetrievalContext>& ctx) {
    if (!ctx) fail(ErrorCode::state, "no index loaded");
    return *ctx;
}

void require_generator(const Snapshot& snap) {
    if (!snap.generator || !snap.templates) fail(ErrorCode::state, "no generator loaded");
}

}  // namespace

Engine::Engine(Settings settings, unsigned flags)
    : settings_(std::move(settings)), flags_(flags), snapshot_(load_snapshot(settings_, flags_)) {}

Engine::~Engine() = default;

std::shared_ptr<const Snapshot> Engine::current() const {
    std::lock_guard lock(swap_mutex_);
    return snapshot_;
}

void Engine::reload() {
    auto fresh = load_snapshot(settings_, flags_);
    std::lock_guard lock(swap_mutex_);
    snapshot_ = std::move(fresh);
}

json Engine::ingest(const fs::path& input, const fs::path& output) const {
    const auto docs = corpus::load_documents(input, true);
    corpus::save_documents(output, docs);
    std::size_t bytes = 0;
    for (const auto& d : docs) bytes += d.text.size();
    return {{"documents", docs.size()}, {"bytes", bytes}, {"output", output.string()}};
}

json Engine::chunk(const fs::path& documents, const fs::path& output) const {
    corpus::ChunkConfig cfg;
    cfg.target_chars = settings_.size("chunk_target_chars");
    cfg.max_chunk_chars = settings_.size("chunk_max_chars");
    cfg.merge_threshold = settings_.real("merge_threshold");
    cfg.validate();
    const auto docs = corpus::load_documents(documents, false);
    const auto embedder = embed::make_embedder(embedder_spec(settings_));
    std::vector<corpus::Chunk> all;
    for (const auto& doc : docs) {
        auto chunks = corpus::semantic_chunk(doc, *embedder, cfg);
        all.insert(all.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
    }
    corpus::save_chunks(output, all);
    return {{"documents", docs.size()}, {"chunks", all.size()}, {"output", output.string()}};
}

json Engine::build_index(const fs::path& chunks_path, const fs::path& index_path) const {
    auto chunks = corpus::load_chunks(chunks_path);
    const auto embedder = embed::make_embedder(embedder_spec(settings_));
    std::vector<std::string> texts;
    texts.reserve(chunks.size());
    for (const auto& c : chunks) texts.push_back(c.text);
    const auto vectors = embedder->embed_batch(texts);

    vindex::VectorIndex index(embedder->dim());
    std::vector<corpus::Chunk> kept;
    std::size_t skipped = 0;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        // Text with no word characters embeds to zero and cannot be ranked.
        if (vectors[i].is_zero()) {
            ++skipped;
            continue;
        }
        index.insert({chunks[i].doc_id, chunks[i].chunk_index}, vectors[i], chunks[i].tags);
        kept.push_back(std::move(chunks[i]));
    }
    const auto summaries = retrieve::build_level_summaries(kept, retrieve::derive_tag_tree(kept));

    index.save(index_path);
    corpus::save_chunks(sidecar(index_path, ".chunks.jsonl"), kept);
    summaries.save(sidecar(index_path, ".summaries.jsonl"));
    return {{"entries", index.size()},
            {"skipped", skipped},
            {"summaries", summaries.size()},
            {"dim", index.dim()},
            {"output", index_path.string()}};
}

json Engine::kg_load(const fs::path& tsv, const fs::path& output) const {
    const auto graph = kgraph::load_graph_tsv(tsv);
    if (!output.empty()) kgraph::save_graph_tsv(output, graph);
    std::set<std::string> categories;
    for (const auto& n : graph.nodes()) categories.insert(n.category);
    return {{"nodes", graph.node_count()},
            {"edges", graph.edge_count()},
            {"relations", graph.relations()},
            {"categories", categories.size()}};
}

json Engine::kg_train(const fs::path& output) const {
    const auto graph = kgraph::load_graph_tsv(required_path(settings_, "graph_path"));
    kgraph::TransEConfig cfg;
    cfg.dim = settings_.size("transe_dim");
    cfg.margin = settings_.real("transe_margin");
    cfg.learning_rate = settings_.real("transe_lr");
    cfg.epochs = settings_.size("transe_epochs");
    cfg.seed = settings_.u64("seed");
    const auto emb = kgraph::train_transe(graph, cfg);
    const fs::path target = output.empty() ? fs::path(settings_.get("embeddings_path")) : output;
    if (target.empty()) fail(ErrorCode::invalid_argument, "no output path for embeddings");
    kgraph::save_embeddings(target, emb);
    const auto stats = kgraph::filtered_tail_ranking(graph, emb);
    return {{"epochs", cfg.epochs},
            {"first_loss", emb.epoch_loss.empty() ? 0.0 : emb.epoch_loss.front()},
            {"final_loss", emb.epoch_loss.empty() ? 0.0 : emb.epoch_loss.back()},
            {"hits_at_1", stats.hits_at_1},
            {"mean_rank", stats.mean_rank},
            {"output", target.string()}};
}

json Engine::dataset_build(const std::vector<fs::path>& inputs, std::string_view task, std::string_view language,
                           const fs::path& output) const {
    if (inputs.empty()) fail(ErrorCode::invalid_argument, "dataset build needs at least one input file");
    const auto templates = prompt::TemplateRegistry::load_dir(required_path(settings_, "templates_dir"));
    const auto records = prompt::build_instruction_dataset(inputs, prompt::task_from_string(task),
                                                           corpus::language_from_string(language), templates);
    prompt::save_records(output, records);
    return {{"records", records.size()}, {"output", output.string()}};
}

json Engine::dataset_sample(const fs::path& input, std::size_t n, std::string_view language,
                            const fs::path& output) const {
    const auto records = prompt::load_records(input);
    const auto subset =
        prompt::sample_instruction_subset(records, n, corpus::language_from_string(language), settings_.u64("seed"));
    prompt::save_records(output, subset);
    return {{"records", subset.size()}, {"seed", settings_.u64("seed")}, {"output", output.string()}};
}

json Engine::link(std::string_view mention, std::optional<std::size_t> m) const {
    const auto snap = current();
    if (!snap->linker) fail(ErrorCode::state, "no knowledge graph loaded");
    if (text::trim(mention).empty()) fail(ErrorCode::invalid_argument, "mention must be non-empty");
    const auto result = snap->linker->link(mention, m.value_or(settings_.size("link_candidates")));
    json candidates = json::array();
    for (const auto& c : result.candidates) candidates.push_back({{"node_id", c.node_id}, {"score", c.score}});
    return {{"mention", std::string(mention)},
            {"candidates", candidates},
            {"best", {{"entity", result.best.entity}, {"source", result.best.source}, {"definition", result.best.definition}}}};
}

json Engine::query(const json& request) const {
    const auto snap = current();
    const auto req = retrieve::request_from_json(request, request_defaults(settings_));
    const auto ctx = retrieval_context(*snap);
    return retrieve::to_json(retrieve::u_retrieve(req, require_index(ctx)));
}

json Engine::answer(const json& request) const {
    const auto snap = current();
    require_generator(*snap);
    if (!request.is_object() || !request.contains("task") || !request["task"].is_string()) {
        fail(ErrorCode::parse, "answer request needs a string \"task\"");
    }
    const auto task = prompt::task_from_string(request["task"].get<std::string>());
    const auto req = retrieve::request_from_json(request, request_defaults(settings_));

    const auto ctx = retrieval_context(*snap);
    const auto bundle = retrieve::u_retrieve(req, require_index(ctx));
    const std::string prompt_text =
        prompt::render_prompt({task, req.language, "", req.query}, &bundle, *snap->templates);
    prompt::GenerationRequest gen{task, req.query, prompt_text, static_cast<int>(settings_.size("max_tokens")), 0.0, 0};
    const auto response = snap->generator->generate(gen);

    json out = {{"task", prompt::to_string(task)},
                {"input_hash", prompt::input_hash(req.query)},
                {"prompt", prompt_text},
                {"generation", response.text},
                {"bundle", retrieve::to_json(bundle)},
                {"warnings", json::array()}};
    const auto& spec = prompt::task_spec(task);
    if (spec.output == prompt::OutputKind::bio) {
        std::vector<std::string> tokens;
        for (auto t : text::split(req.query, " ")) {
            if (!t.empty()) tokens.emplace_back(t);
        }
        auto parsed = prompt::parse_bio_output(response.text, tokens);
        out["parsed"] = parsed.labels;
        out["warnings"] = parsed.warnings;
    } else {
        out["parsed"] = prompt::parse_label_output(response.text, spec);
    }
    return out;
}

json Engine::eval(const json& experiment) const {
    const auto snap = current();
    require_generator(*snap);
    evalharness::ExperimentConfig defaults;
    defaults.k = settings_.size("k");
    defaults.context_budget_chars = settings_.size("context_budget_chars");
    defaults.language = corpus::language_from_string(settings_.get("language"));
    defaults.seed = settings_.u64("seed");
    defaults.max_tokens = static_cast<int>(settings_.size("max_tokens"));
    const auto config = evalharness::experiment_config_from_json(experiment, defaults);

    const auto ctx = retrieval_context(*snap);
    evalharness::ExperimentDeps deps{*snap->templates, *snap->generator, ctx ? &*ctx : nullptr};
    const auto result = evalharness::run_experiment(config, deps);
    if (experiment.contains("trace") && experiment["trace"].is_string()) {
        io::write_jsonl(experiment["trace"].get<std::string>(), result.trace);
    }
    return evalharness::to_json(result.report);
}

json Engine::health() const {
    const auto snap = current();
    std::set<std::string> docs;
    for (const auto& c : snap->chunks.chunks()) docs.insert(c.doc_id);
    json out = {{"status", "ok"},
                {"corpus", {{"documents", docs.size()}, {"chunks", snap->chunks.size()},
                            {"index_entries", snap->index ? snap->index->size() : 0},
                            {"summaries", snap->summaries.size()}}},
                {"graph", {{"nodes", snap->graph ? snap->graph->node_count() : 0},
                           {"edges", snap->graph ? snap->graph->edge_count() : 0}}},
                {"embeddings_loaded", snap->kg_embeddings.has_value()},
                {"generator_loaded", snap->generator != nullptr}};
    return out;
}

}  // namespace oncorag::app
