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

#include "prompt/dataset.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/random.hpp"
#include "common/text.hpp"

namespace oncorag::prompt {

using nlohmann::json;

json to_json(const InstructionRecord& r) {
    return {{"task", to_string(r.task)},
            {"language", corpus::to_string(r.language)},
            {"instruction", r.instruction},
            {"input", r.input},
            {"output", r.output}};
}

InstructionRecord record_from_json(const json& obj) {
    InstructionRecord r;
    try {
        r.task = task_from_string(obj.at("task").get<std::string>());
        r.language = corpus::language_from_string(obj.at("language").get<std::string>());
        r.instruction = obj.at("instruction").get<std::string>();
        r.input = obj.at("input").get<std::string>();
        r.output = obj.at("output").get<std::string>();
    } catch (const json::exception& e) {
        fail(ErrorCode::parse, std::string("malformed instruction record: ") + e.what());
    }
    if (text::trim(r.instruction).empty() || text::trim(r.input).empty() || text::trim(r.output).empty()) {
        fail(ErrorCode::parse, "instruction record fields must be non-empty");
    }
    return r;
}

std::vector<InstructionRecord> load_records(const std::filesystem::path& path) {
    std::vector<InstructionRecord> out;
    io::for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        try {
            out.push_back(record_from_json(obj));
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(line) + ": " + e.what());
        }
    });
    return out;
}

void save_records(const std::filesystem::path& path, const std::vector<InstructionRecord>& records) {
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_json(r));
    io::write_jsonl(path, rows);
}

std::vector<InstructionRecord> build_instruction_dataset(const std::vector<LabeledExample>& examples,
                                                         const TemplateRegistry& templates) {
    std::vector<InstructionRecord> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
        out.push_back({ex.task, ex.language, templates.get(ex.task, ex.language).instruction, ex.input, format_output(ex)});
    }
    return out;
}

std::vector<InstructionRecord> build_instruction_dataset(const std::vector<std::filesystem::path>& files, TaskKind task,
                                                         corpus::Language language, const TemplateRegistry& templates) {
    std::vector<LabeledExample> examples;
    for (const auto& f : files) {
        auto part = load_examples(f, task, language);
        examples.insert(examples.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return build_instruction_dataset(examples, templates);
}

std::vector<InstructionRecord> sample_instruction_subset(const std::vector<InstructionRecord>& records, std::size_t n,
                                                         corpus::Language language, std::uint64_t seed) {
    if (n == 0) fail(ErrorCode::invalid_argument, "subset size must be >= 1");
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].language == language) pool.push_back(i);
    }
    if (n > pool.size()) {
        fail(ErrorCode::invalid_argument, "requested " + std::to_string(n) + " " + corpus::to_string(language) +
                                              " records but only " + std::to_string(pool.size()) + " are available");
    }
    // A seeded permutation; every subset is a prefix of it.
    Rng rng(seed);
    rng.shuffle(pool);
    pool.resize(n);
    std::sort(pool.begin(), pool.end());

    std::vector<InstructionRecord> out;
    out.reserve(n);
    for (std::size_t i : pool) out.push_back(records[i]);
    return out;
}

}  // namespace oncorag::prompt
