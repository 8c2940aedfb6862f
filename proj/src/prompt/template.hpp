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
#include <map>
#include <optional>
#include <string>
#include <utility>

#include "corpus/corpus.hpp"
#include "prompt/tasks.hpp"
#include "retrieve/retrieve.hpp"

namespace oncorag::prompt {

// Template file layout:
//   {{! free-form comment, may span lines }}
//   [instruction]
//   <task instruction text>
//   [layout]
//   <prompt text with {{instruction}}, {{context}} and {{input}} slots>
struct Template {
    std::string instruction;
    std::string layout;
};

Template parse_template(std::string_view contents);

class TemplateRegistry {
public:
    void add(TaskKind task, corpus::Language language, Template tmpl);
    const Template* find(TaskKind task, corpus::Language language) const;
    const Template& get(TaskKind task, corpus::Language language) const;
    std::size_t size() const noexcept { return templates_.size(); }

    // Reads <dir>/<lang>/<task>.tmpl for every task and language present.
    static TemplateRegistry load_dir(const std::filesystem::path& dir);

private:
    std::map<std::pair<TaskKind, corpus::Language>, Template> templates_;
};

struct PromptInput {
    TaskKind task = TaskKind::ner_bio;
    corpus::Language language = corpus::Language::en;
    std::string instruction;  // empty: use the template's instruction
    std::string input;
};

// "### Context" block with passages, evidence triples and summaries, in that order.
std::string render_context(const retrieve::ContextBundle& bundle);

// Fills the template slots in one pass; no bundle means an empty {{context}}.
std::string render_prompt(const PromptInput& input, const retrieve::ContextBundle* bundle,
                          const TemplateRegistry& templates);

}  // namespace oncorag::prompt
