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

#include "prompt/template.hpp"

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace oncorag::prompt {

Template parse_template(std::string_view contents) {
    std::string body;
    std::size_t pos = 0;
    while (pos < contents.size()) {
        const auto open = contents.find("{{!", pos);
        if (open == std::string_view::npos) {
            body.append(contents.substr(pos));
            break;
        }
        body.append(contents.substr(pos, open - pos));
        const auto close = contents.find("}}", open);
        if (close == std::string_view::npos) fail(ErrorCode::parse, "unterminated template comment");
        pos = close + 2;
        if (pos < contents.size() && contents[pos] == '\n') ++pos;
    }

    const auto ins = body.find("[instruction]\n");
    const auto lay = body.find("[layout]\n");
    if (ins == std::string::npos || lay == std::string::npos || lay < ins) {
        fail(ErrorCode::parse, "template needs an [instruction] section followed by a [layout] section");
    }
    Template t;
    const auto ins_start = ins + std::string_view("[instruction]\n").size();
    t.instruction = std::string(text::trim(std::string_view(body).substr(ins_start, lay - ins_start)));
    t.layout = body.substr(lay + std::string_view("[layout]\n").size());
    while (!t.layout.empty() && t.layout.back() == '\n') t.layout.pop_back();
    if (t.instruction.empty()) fail(ErrorCode::parse, "template instruction is empty");
    for (const char* slot : {"{{instruction}}", "{{context}}", "{{input}}"}) {
        if (t.layout.find(slot) == std::string::npos) fail(ErrorCode::parse, std::string("template layout lacks ") + slot);
    }
    return t;
}

void TemplateRegistry::add(TaskKind task, corpus::Language language, Template tmpl) {
    templates_[{task, language}] = std::move(tmpl);
}

const Template* TemplateRegistry::find(TaskKind task, corpus::Language language) const {
    const auto it = templates_.find({task, language});
    return it == templates_.end() ? nullptr : &it->second;
}

const Template& TemplateRegistry::get(TaskKind task, corpus::Language language) const {
    const Template* t = find(task, language);
    if (t == nullptr) {
        fail(ErrorCode::not_found, std::string("no template registered for ") + to_string(task) + "/" +
                                       corpus::to_string(language));
    }
    return *t;
}

TemplateRegistry TemplateRegistry::load_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) fail(ErrorCode::io, "template directory not found: " + dir.string());
    TemplateRegistry reg;
    for (auto lang : {corpus::Language::en, corpus::Language::de}) {
        for (TaskKind task : kAllTasks) {
            const auto path = dir / corpus::to_string(lang) / (std::string(to_string(task)) + ".tmpl");
            if (!std::filesystem::exists(path)) continue;
            try {
                reg.add(task, lang, parse_template(io::read_file(path)));
            } catch (const Error& e) {
                fail(e.code(), path.string() + ": " + e.what());
            }
        }
    }
    return reg;
}

std::string render_context(const retrieve::ContextBundle& bundle) {
    std::string out = "### Context\n";
    if (!bundle.hits.empty()) {
        out += "Retrieved passages:\n";
        for (std::size_t i = 0; i < bundle.hits.size(); ++i) {
            const auto& h = bundle.hits[i];
            out += "[" + std::to_string(i + 1) + "] " + h.hit.ref.doc_id + "#" + std::to_string(h.hit.ref.chunk_index) +
                   "\n" + h.text + "\n";
        }
    }
    if (!bundle.triples.empty()) {
        out += "Evidence:\n";
        for (const auto& t : bundle.triples) out += retrieve::render_triple(t) + "\n";
    }
    if (!bundle.summaries.empty()) {
        out += "Summaries:\n";
        for (const auto& s : bundle.summaries) out += "(" + s.tag_prefix + ") " + s.text + "\n";
    }
    out += "\n";
    return out;
}

std::string render_prompt(const PromptInput& input, const retrieve::ContextBundle* bundle,
                          const TemplateRegistry& templates) {
    const Template& t = templates.get(input.task, input.language);
    const std::string& instruction = input.instruction.empty() ? t.instruction : input.instruction;
    const std::string context = bundle != nullptr ? render_context(*bundle) : std::string();

    std::string out;
    const std::string_view layout = t.layout;
    std::size_t pos = 0;
    while (pos < layout.size()) {
        const auto open = layout.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(layout.substr(pos));
            break;
        }
        out.append(layout.substr(pos, open - pos));
        const auto close = layout.find("}}", open);
        if (close == std::string_view::npos) {
            out.append(layout.substr(open));
            break;
        }
        const auto slot = layout.substr(open + 2, close - open - 2);
        if (slot == "instruction") {
            out += instruction;
        } else if (slot == "context") {
            out += context;
        } else if (slot == "input") {
            out += input.input;
        } else {
            out.append(layout.substr(open, close + 2 - open));
        }
        pos = close + 2;
    }
    return out;
}

}  // namespace oncorag::prompt
