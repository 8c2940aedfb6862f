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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "prompt/generator.hpp"
#include "prompt/tasks.hpp"
#include "prompt/template.hpp"
#include "retrieve/retrieve.hpp"

namespace oncorag::evalharness {

enum class Configuration { base, instruction_tuned, rag, graph_rag };
enum class MetricKind { f1_entity, f1_micro, accuracy, auc, auprc };

const char* to_string(Configuration c) noexcept;
Configuration configuration_from_string(std::string_view name);
const char* to_string(MetricKind m) noexcept;

// f1_entity for NER; f1_micro for relation extraction, HoC, ICD-10 and SNOMED;
// accuracy for NLI; macro one-vs-rest AU-PRC for cancer type; macro
// one-vs-rest AUC for T/N/M staging; binary AUC for treatment response.
MetricKind metric_for(prompt::TaskKind task);

struct MetricReport {
    prompt::TaskKind task = prompt::TaskKind::ner_bio;
    Configuration configuration = Configuration::base;
    corpus::Language language = corpus::Language::en;
    MetricKind metric = MetricKind::f1_entity;
    double value = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
    nlohmann::json support = nlohmann::json::object();
    std::size_t n_examples = 0;
    std::size_t n_errors = 0;
    std::uint64_t seed = 0;
    std::optional<std::size_t> n_instructions;
};

nlohmann::json to_json(const MetricReport& report);
MetricReport report_from_json(const nlohmann::json& obj);
// Header "task,configuration,language,metric,value,n_examples,n_errors" plus one row per report.
std::string reports_to_csv(const std::vector<MetricReport>& reports);

// An empty prediction means "no answer" (component error or unparseable output).
struct ScoredPrediction {
    std::vector<std::string> pred;
    bool component_error = false;
};

// Aggregates predictions into the task's metric; order-independent.
MetricReport score_predictions(prompt::TaskKind task, const std::vector<prompt::LabeledExample>& examples,
                               const std::vector<ScoredPrediction>& predictions);

struct ExperimentConfig {
    prompt::TaskKind task = prompt::TaskKind::ner_bio;
    std::filesystem::path dataset;
    corpus::Language language = corpus::Language::en;
    Configuration configuration = Configuration::base;
    std::size_t k = 5;
    std::size_t context_budget_chars = 8000;
    std::optional<std::size_t> n_instructions;
    std::uint64_t seed = 0;
    int max_tokens = 512;
};

ExperimentConfig experiment_config_from_json(const nlohmann::json& obj, const ExperimentConfig& defaults = {});

struct ExperimentDeps {
    const prompt::TemplateRegistry& templates;
    const prompt::Generator& generator;
    // Required for the rag and graph_rag configurations.
    const retrieve::RetrievalContext* retrieval = nullptr;
};

struct ExperimentResult {
    MetricReport report;
    std::vector<nlohmann::json> trace;  // one row per example, in dataset order
};

// Per example: retrieve (rag, graph_rag), render, generate at temperature 0,
// parse, then score. A failing component marks that example wrong; the run
// aborts once more than half of the examples have failed.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::vector<prompt::LabeledExample>& examples,
                                const ExperimentDeps& deps);
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentDeps& deps);

}  // namespace oncorag::evalharness
