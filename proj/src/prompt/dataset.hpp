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
#include <string>
#include <vector>

#include "corpus/corpus.hpp"
#include "json.hpp"
#include "prompt/tasks.hpp"
#include "prompt/template.hpp"

namespace oncorag::prompt {

struct InstructionRecord {
    TaskKind task = TaskKind::ner_bio;
    corpus::Language language = corpus::Language::en;
    std::string instruction;
    std::string input;
    std::string output;

    friend bool operator==(const InstructionRecord&, const InstructionRecord&) = default;
};

nlohmann::json to_json(const InstructionRecord& record);
InstructionRecord record_from_json(const nlohmann::json& obj);

std::vector<InstructionRecord> load_records(const std::filesystem::path& path);
void save_records(const std::filesystem::path& path, const std::vector<InstructionRecord>& records);

// Converts task-native datasets into instruction records whose instruction
// comes from the (task, example language) template.
std::vector<InstructionRecord> build_instruction_dataset(const std::vector<std::filesystem::path>& files, TaskKind task,
                                                         corpus::Language language, const TemplateRegistry& templates);

std::vector<InstructionRecord> build_instruction_dataset(const std::vector<LabeledExample>& examples,
                                                         const TemplateRegistry& templates);

// n records of `language` drawn without replacement, returned in input order.
// For a fixed seed, the sample of size n is contained in every larger sample.
std::vector<InstructionRecord> sample_instruction_subset(const std::vector<InstructionRecord>& records, std::size_t n,
                                                         corpus::Language language, std::uint64_t seed);

}  // namespace oncorag::prompt
