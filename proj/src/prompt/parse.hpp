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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "prompt/tasks.hpp"

namespace oncorag::prompt {

struct BioTag {
    char prefix = 'O';  // 'B', 'I' or 'O'
    std::string type;   // empty for untyped tags and for O

    std::string str() const;
};

// Accepts O, B, I, B-<type>, I-<type>; prefix letters are case-insensitive.
std::optional<BioTag> parse_bio_tag(std::string_view label);

// Every I-X directly follows B-X or I-X, and every label parses.
bool is_valid_bio(const std::vector<std::string>& labels);

struct BioParse {
    std::vector<std::string> labels;
    std::vector<std::string> warnings;
};

// Reads "token: LABEL" pairs (separated by ", " or newlines) and aligns them
// to `tokens` in order. Unknown labels become O, orphan I is promoted to B,
// unmatched tokens get O. Always returns tokens.size() labels.
BioParse parse_bio_output(std::string_view generated, const std::vector<std::string>& tokens);

// Label codes for single-label, multi-label and pattern tasks. Matching is
// case-insensitive exact first, then whole-word substring search (label
// codes case-sensitive, aliases case-insensitive); a match nested inside a
// longer match of another label is discarded. Throws ErrorCode::parse with
// "unparseable output" when nothing or (single-label) more than one label matches.
std::vector<std::string> parse_label_output(std::string_view generated, const TaskSpec& spec);

}  // namespace oncorag::prompt
