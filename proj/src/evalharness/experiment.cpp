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

#include "evalharness/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "common/error.hpp"
#include "evalharness/metrics.hpp"
#include "prompt/parse.hpp"

namespace oncorag::evalharness {

using nlohmann::json;
using prompt::TaskKind;

const char* to_string(Configuration c) noexcept {
    switch (c) {
        case Configuration::base: return "base";
        case Configuration::instruction_tuned: return "instruction_tuned";
        case Configuration::rag: return "rag";
        case Configuration::graph_rag: return "graph_rag";
    }
    return "unknown";
}

Configuration configuration_from_string(std::string_view name) {
    for (auto c : {Configuration::base, Configuration::instruction_tuned, Configuration::rag, Configuration::graph_rag}) {
        if (name == to_string(c)) return c;
    }
    fail(ErrorCode::invalid_argument, "unknown configuration \"" + std::string(name) + "\"");
}

const char* to_string(MetricKind m) noexcept {
    switch (m) {
        case MetricKind::f1_entity: return "f1_entity";
        case MetricKind::f1_micro: return "f1_micro";
        case MetricKind::accuracy: return "accuracy";
        case MetricKind::auc: return "auc";
        case MetricKind::auprc: return "auprc";
    }
    return "unknown";
}

MetricKind metric_for(TaskKind task) {
    switch (task) {
        case TaskKind::ner_bio: return MetricKind::f1_entity;
        case TaskKind::relation_extraction:
        case TaskKind::hoc_multilabel:
        case TaskKind::icd10:
        case TaskKind::snomed: return MetricKind::f1_micro;
        case TaskKind::nli: return MetricKind::accuracy;
        case TaskKind::cancer_type: return MetricKind::auprc;
        case TaskKind::tnm_t:
        case TaskKind::tnm_n:
        case TaskKind::tnm_m:
        case TaskKind::response_pred: return MetricKind::auc;
    }
    return MetricKind::accuracy;
}

json to_json(const MetricReport& r) {
    json j = {{"task", prompt::to_string(r.task)},
              {"configuration", to_string(r.configuration)},
              {"language", corpus::to_string(r.language)},
              {"metric", to_string(r.metric)},
              {"value", r.value},
              {"support", r.support},
              {"n_examples", r.n_examples},
              {"n_errors", r.n_errors},
              {"seed", r.seed}};
    if (r.precision) j["precision"] = *r.precision;
    if (r.recall) j["recall"] = *r.recall;
    j["n_instructions"] = r.n_instructions ? json(*r.n_instructions) : json(nullptr);
    return j;
}

MetricReport report_from_json(const json& j) {
    MetricReport r;
    try {
        r.task = prompt::task_from_string(j.at("task").get<std::string>());
        r.configuration = configuration_from_string(j.at("configuration").get<std::string>());
        r.language = corpus::language_from_string(j.at("language").get<std::string>());
        const auto metric = j.at("metric").get<std::string>();
        bool known = false;
        for (auto m : {MetricKind::f1_entity, MetricKind::f1_micro, MetricKind::accuracy, MetricKind::auc,
                       MetricKind::auprc}) {
            if (metric == to_string(m)) {
                r.metric = m;
                known = true;
            }
        }
        if (!known) fail(ErrorCode::parse, "unknown metric \"" + metric + "\"");
        r.value = j.at("value").get<double>();
        if (j.contains("precision")) r.precision = j["precision"].get<double>();
        if (j.contains("recall")) r.recall = j["recall"].get<double>();
        r.support = j.value("support", json::object());
        r.n_examples = j.at("n_examples").get<std::size_t>();
        r.n_errors = j.at("n_errors").get<std::size_t>();
        r.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("n_instructions") && !j["n_instructions"].is_null()) {
            r.n_instructions = j["n_instructions"].get<std::size_t>();
        }
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed metric report: ") + e.what());
    }
    return r;
}

std::string reports_to_csv(const std::vector<MetricReport>& reports) {
    std::string out = "task,configuration,language,metric,value,n_examples,n_errors\n";
    for (const auto& r : reports) {
        char value[32];
        std::snprintf(value, sizeof value, "%.6f", r.value);
        out += std::string(prompt::to_string(r.task)) + "," + to_string(r.configuration) + "," +
               corpus::to_string(r.language) + "," + to_string(r.metric) + "," + value + "," +
               std::to_string(r.n_examples) + "," + std::to_string(r.n_errors) + "\n";
    }
    return out;
}

namespace {

// One-vs-rest over gold classes, hard predictions scored 1/0.
double macro_ovr(const std::vector<prompt::LabeledExample>& examples, const std::vector<ScoredPrediction>& preds,
                 bool use_auprc, json& support) {
    std::set<std::string> classes;
    for (const auto& ex : examples) classes.insert(ex.gold.front());
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& cls : classes) {
        std::vector<double> scores;
        std::vector<int> labels;
        for (std::size_t i = 0; i < examples.size(); ++i) {
            labels.push_back(examples[i].gold.front() == cls ? 1 : 0);
            scores.push_back(!preds[i].pred.empty() && preds[i].pred.front() == cls ? 1.0 : 0.0);
        }
        const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
        if (!use_auprc && n_pos == labels.size()) continue;
        sum += use_auprc ? auprc(scores, labels) : auc(scores, labels);
        ++used;
    }
    if (used == 0) fail(ErrorCode::invalid_argument, "auc needs both classes");
    support = {{"classes", used}, {"n_examples", examples.size()}};
    return sum / static_cast<double>(used);
}

}  // namespace

MetricReport score_predictions(TaskKind task, const std::vector<prompt::LabeledExample>& examples,
                               const std::vector<ScoredPrediction>& preds) {
    if (examples.size() != preds.size()) fail(ErrorCode::invalid_argument, "one prediction per example required");
    if (examples.empty()) fail(ErrorCode::invalid_argument, "no examples to score");
    const auto& spec = prompt::task_spec(task);

    MetricReport r;
    r.task = task;
    r.metric = metric_for(task);
    r.n_examples = examples.size();
    for (const auto& p : preds) r.n_errors += p.component_error;

    auto set_prf = [&](const PRF& prf) {
        r.value = prf.f1;
        r.precision = prf.precision;
        r.recall = prf.recall;
        r.support = {{"tp", prf.tp}, {"fp", prf.fp}, {"fn", prf.fn}};
    };

    switch (r.metric) {
        case MetricKind::f1_entity: {
            std::vector<std::vector<std::string>> gold, pred;
            for (std::size_t i = 0; i < examples.size(); ++i) {
                gold.push_back(examples[i].gold);
                pred.push_back(preds[i].pred.empty() ? std::vector<std::string>(examples[i].gold.size(), "O")
                                                     : preds[i].pred);
            }
            set_prf(entity_f1(gold, pred));
            break;
        }
        case MetricKind::f1_micro: {
            std::vector<std::set<std::string>> gold, pred;
            for (std::size_t i = 0; i < examples.size(); ++i) {
                gold.emplace_back(examples[i].gold.begin(), examples[i].gold.end());
                pred.emplace_back(preds[i].pred.begin(), preds[i].pred.end());
            }
            std::optional<std::set<std::string>> space;
            if (!spec.labels.empty()) {
                space.emplace();
                for (const auto& l : spec.labels) space->insert(l.code);
            }
            set_prf(multilabel_micro_f1(gold, pred, space));
            break;
        }
        case MetricKind::accuracy: {
            std::size_t correct = 0;
            for (std::size_t i = 0; i < examples.size(); ++i) correct += preds[i].pred == examples[i].gold;
            r.value = static_cast<double>(correct) / static_cast<double>(examples.size());
            r.support = {{"correct", correct}, {"total", examples.size()}};
            break;
        }
        case MetricKind::auc:
        case MetricKind::auprc: {
            if (task == TaskKind::response_pred) {
                std::vector<double> scores;
                std::vector<int> labels;
                for (std::size_t i = 0; i < examples.size(); ++i) {
                    labels.push_back(examples[i].gold.front() == "Responder" ? 1 : 0);
                    scores.push_back(!preds[i].pred.empty() && preds[i].pred.front() == "Responder" ? 1.0 : 0.0);
                }
                r.value = auc(scores, labels);
                const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
                r.support = {{"n_pos", n_pos}, {"n_neg", labels.size() - n_pos}};
            } else {
                r.value = macro_ovr(examples, preds, r.metric == MetricKind::auprc, r.support);
            }
            break;
        }
    }
    return r;
}

ExperimentConfig experiment_config_from_json(const json& obj, const ExperimentConfig& defaults) {
    ExperimentConfig c = defaults;
    try {
        if (obj.contains("task")) c.task = prompt::task_from_string(obj["task"].get<std::string>());
        if (obj.contains("dataset")) c.dataset = obj["dataset"].get<std::string>();
        if (obj.contains("language")) c.language = corpus::language_from_string(obj["language"].get<std::string>());
        if (obj.contains("configuration")) c.configuration = configuration_from_string(obj["configuration"].get<std::string>());
        if (obj.contains("k")) c.k = obj["k"].get<std::size_t>();
        if (obj.contains("context_budget_chars")) c.context_budget_chars = obj["context_budget_chars"].get<std::size_t>();
        if (obj.contains("n_instructions") && !obj["n_instructions"].is_null()) {
            c.n_instructions = obj["n_instructions"].get<std::size_t>();
        }
        if (obj.contains("seed")) c.seed = obj["seed"].get<std::uint64_t>();
        if (obj.contains("max_tokens")) c.max_tokens = obj["max_tokens"].get<int>();
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed experiment config: ") + e.what());
    }
    if (c.dataset.empty()) fail(ErrorCode::invalid_argument, "experiment config needs a dataset path");
    return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<prompt::LabeledExample>& examples,
                                const ExperimentDeps& deps) {
    if (examples.empty()) fail(ErrorCode::invalid_argument, "dataset has no examples");
    const bool retrieval =
        config.configuration == Configuration::rag || config.configuration == Configuration::graph_rag;
    if (retrieval && deps.retrieval == nullptr) {
        fail(ErrorCode::state, std::string(to_string(config.configuration)) + " configuration needs a loaded index");
    }
    deps.templates.get(config.task, config.language);
    const auto& spec = prompt::task_spec(config.task);

    ExperimentResult result;
    std::vector<ScoredPrediction> preds(examples.size());
    std::size_t errors = 0;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        json row = {{"index", i}, {"input_hash", prompt::input_hash(ex.input)}, {"gold", ex.gold}};
        try {
            std::optional<retrieve::ContextBundle> bundle;
            if (retrieval) {
                retrieve::RetrievalRequest req;
                req.query = ex.input;
                req.language = ex.language;
                req.k = config.k;
                req.context_budget_chars = config.context_budget_chars;
                req.mode = config.configuration == Configuration::graph_rag ? retrieve::Mode::graph_rag
                                                                            : retrieve::Mode::rag;
                bundle = retrieve::u_retrieve(req, *deps.retrieval);
                row["bundle"] = retrieve::to_json(*bundle);
            }
            prompt::PromptInput in{config.task, ex.language, "", ex.input};
            const std::string rendered = prompt::render_prompt(in, bundle ? &*bundle : nullptr, deps.templates);
            row["prompt"] = rendered;

            prompt::GenerationRequest gen_req{config.task, ex.input, rendered, config.max_tokens, 0.0, i};
            const auto response = deps.generator.generate(gen_req);
            row["generation"] = response.text;
            row["provider"] = response.provider;

            if (spec.output == prompt::OutputKind::bio) {
                auto parsed = prompt::parse_bio_output(response.text, ex.tokens);
                preds[i].pred = std::move(parsed.labels);
                if (!parsed.warnings.empty()) row["warnings"] = parsed.warnings;
            } else {
                try {
                    preds[i].pred = prompt::parse_label_output(response.text, spec);
                } catch (const Error& e) {
                    if (e.code() != ErrorCode::parse) throw;
                    row["warnings"] = json::array({e.what()});
                }
            }
            row["parsed"] = preds[i].pred;
        } catch (const Error& e) {
            preds[i] = {{}, true};
            row["error"] = e.what();
            row["parsed"] = json::array();
            ++errors;
            if (errors * 2 > examples.size()) {
                fail(ErrorCode::state, "aborting run: " + std::to_string(errors) + " of " +
                                           std::to_string(examples.size()) + " examples failed (last: " + e.what() + ")");
            }
        }
        result.trace.push_back(std::move(row));
    }

    result.report = score_predictions(config.task, examples, preds);
    result.report.configuration = config.configuration;
    result.report.language = config.language;
    result.report.seed = config.seed;
    result.report.n_instructions = config.n_instructions;
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentDeps& deps) {
    return run_experiment(config, prompt::load_examples(config.dataset, config.task, config.language), deps);
}

}  // namespace oncorag::evalharness
