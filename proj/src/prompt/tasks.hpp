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
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "corpus/corpus.hpp"
#include "json.hpp"

namespace oncorag::prompt {

enum class TaskKind {
    ner_bio,
    relation_extraction,
    nli,
    hoc_multilabel,
    cancer_type,
    tnm_t,
    tnm_n,
    tnm_m,
    icd10,
    snomed,
    response_pred,
};

inline constexpr TaskKind kAllTasks[] = {
    TaskKind::ner_bio, TaskKind::relation_extraction, TaskKind::nli,   TaskKind::hoc_multilabel,
    TaskKind::cancer_type, TaskKind::tnm_t,           TaskKind::tnm_n, TaskKind::tnm_m,
    TaskKind::icd10,   TaskKind::snomed,              TaskKind::response_pred,
};

const char* to_string(TaskKind task) noexcept;
TaskKind task_from_string(std::string_view name);

enum class OutputKind {
    bio,           // "token: LABEL" pairs
    single_label,  // one label of a closed space
    multi_label,   // one or more labels of a closed space
    pattern,       // open code space described by a regular expression
};

struct LabelDef {
    std::string code;
    std::vector<std::string> aliases;
};

struct TaskSpec {
    TaskKind task;
    OutputKind output;
    std::vector<LabelDef> labels;  // closed spaces only
    std::string pattern;           // pattern tasks only
    bool uppercase_pattern = false;

    const LabelDef* find_label(std::string_view code) const;
};

const TaskSpec& task_spec(TaskKind task);

// One evaluation or training example. `gold` holds per-token BIO labels for
// ner_bio, a single code for single-label and pattern tasks, and the label
// set (sorted) for multi-label tasks.
struct LabeledExample {
    TaskKind task = TaskKind::ner_bio;
    corpus::Language language = corpus::Language::en;
    std::string input;
    std::vector<std::string> tokens;  // ner_bio only
    std::vector<std::string> gold;
};

// Throws unless the gold conforms to the task's label space or grammar.
void validate_gold(const LabeledExample& example);

// CoNLL: "token<TAB>label" per line, blank line between sentences.
std::vector<LabeledExample> load_conll(const std::filesystem::path& path, corpus::Language language);

// JSONL of {"input": string | {"sentence1", "sentence2"}, "gold": string | [string]}.
// A per-line "language" key overrides `language`.
std::vector<LabeledExample> load_task_jsonl(const std::filesystem::path& path, TaskKind task,
                                            corpus::Language language);

// Picks the loader by task: CoNLL for ner_bio, JSONL otherwise.
std::vector<LabeledExample> load_examples(const std::filesystem::path& path, TaskKind task,
                                          corpus::Language language);

// Gold answer text as a model is expected to write it.
std::string format_output(const LabeledExample& example);

}  // namespace oncorag::prompt
