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

#include "prompt/parse.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include "common/error.hpp"
#include "common/text.hpp"

namespace oncorag::prompt {

std::string BioTag::str() const {
    if (prefix == 'O') return "O";
    return type.empty() ? std::string(1, prefix) : std::string(1, prefix) + "-" + type;
}

std::optional<BioTag> parse_bio_tag(std::string_view label) {
    label = text::trim(label);
    if (label.empty()) return std::nullopt;
    const char p = static_cast<char>(std::toupper(static_cast<unsigned char>(label[0])));
    if (p != 'B' && p != 'I' && p != 'O') return std::nullopt;
    if (label.size() == 1) return BioTag{p, ""};
    if (p == 'O' || (label[1] != '-' && label[1] != '_') || label.size() < 3) return std::nullopt;
    std::string type(label.substr(2));
    for (char c : type) {
        if (c == ' ' || c == ',' || c == ':') return std::nullopt;
    }
    return BioTag{p, std::move(type)};
}

bool is_valid_bio(const std::vector<std::string>& labels) {
    std::optional<BioTag> prev;
    for (const auto& l : labels) {
        const auto tag = parse_bio_tag(l);
        if (!tag || tag->str() != l) return false;
        if (tag->prefix == 'I' && (!prev || prev->prefix == 'O' || prev->type != tag->type)) return false;
        prev = tag;
    }
    return true;
}

namespace {

struct Pair {
    std::string token;
    std::string label;
};

std::vector<Pair> read_pairs(std::string_view generated) {
    std::vector<Pair> pairs;
    for (auto line : text::split(generated, "\n")) {
        for (auto item : text::split(line, ", ")) {
            item = text::trim(item);
            while (item.starts_with("...")) item = text::trim(item.substr(3));
            while (item.ends_with("...")) item = text::trim(item.substr(0, item.size() - 3));
            if (item.ends_with(',')) item = text::trim(item.substr(0, item.size() - 1));
            const auto colon = item.rfind(':');
            if (colon == std::string_view::npos || colon == 0) continue;
            pairs.push_back({std::string(text::trim(item.substr(0, colon))), std::string(text::trim(item.substr(colon + 1)))});
        }
    }
    return pairs;
}

}  // namespace

BioParse parse_bio_output(std::string_view generated, const std::vector<std::string>& tokens) {
    BioParse out;
    const auto pairs = read_pairs(generated);
    std::vector<BioTag> tags;
    tags.reserve(tokens.size());

    std::size_t next_pair = 0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        std::size_t found = pairs.size();
        for (std::size_t p = next_pair; p < pairs.size(); ++p) {
            if (pairs[p].token == tokens[i]) {
                found = p;
                break;
            }
        }
        if (found == pairs.size()) {
            out.warnings.push_back("token " + std::to_string(i) + " (" + tokens[i] + ") missing; set to O");
            tags.push_back({'O', ""});
            continue;
        }
        next_pair = found + 1;
        auto tag = parse_bio_tag(pairs[found].label);
        if (!tag) {
            out.warnings.push_back("token " + std::to_string(i) + " has unknown label \"" + pairs[found].label + "\"; set to O");
            tag = BioTag{'O', ""};
        }
        tags.push_back(*tag);
    }

    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i].prefix != 'I') continue;
        const bool continues = i > 0 && tags[i - 1].prefix != 'O' && tags[i - 1].type == tags[i].type;
        if (!continues) {
            out.warnings.push_back("token " + std::to_string(i) + " has I without a preceding B; promoted to B");
            tags[i].prefix = 'B';
        }
    }
    out.labels.reserve(tags.size());
    for (const auto& t : tags) out.labels.push_back(t.str());
    return out;
}

namespace {

struct Occurrence {
    std::size_t label;
    std::size_t start;
    std::size_t end;
};

bool word_at(std::string_view s, std::size_t i) {
    return i < s.size() && text::is_word_byte(static_cast<unsigned char>(s[i]));
}

void find_whole_word(std::string_view haystack, std::string_view needle, std::size_t label,
                     std::vector<Occurrence>& out) {
    if (needle.empty()) return;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        const std::size_t end = pos + needle.size();
        const bool left_ok = pos == 0 || !word_at(haystack, pos - 1) || !word_at(haystack, pos);
        const bool right_ok = end == haystack.size() || !word_at(haystack, end) || !word_at(haystack, end - 1);
        if (left_ok && right_ok) out.push_back({label, pos, end});
        ++pos;
    }
}

[[noreturn]] void unparseable(std::string_view generated, const std::string& why) {
    fail(ErrorCode::parse, "unparseable output (" + why + "): \"" + std::string(generated.substr(0, 200)) + "\"");
}

std::vector<std::string> parse_pattern(std::string_view generated, const TaskSpec& spec) {
    const std::regex re(spec.pattern);
    const std::string s(generated);
    std::smatch m;
    if (!std::regex_search(s, m, re)) unparseable(generated, "no code found");
    std::string code = m.str(0);
    if (spec.uppercase_pattern) {
        for (char& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return {code};
}

}  // namespace

std::vector<std::string> parse_label_output(std::string_view generated, const TaskSpec& spec) {
    if (spec.output == OutputKind::pattern) return parse_pattern(generated, spec);
    if (spec.output == OutputKind::bio) fail(ErrorCode::invalid_argument, "BIO output is parsed with parse_bio_output");
    if (spec.labels.empty()) fail(ErrorCode::invalid_argument, "label space is empty");

    std::string_view trimmed = text::trim(generated);
    while (!trimmed.empty() && (trimmed.back() == '.' || trimmed.back() == '"')) trimmed.remove_suffix(1);
    while (!trimmed.empty() && trimmed.front() == '"') trimmed.remove_prefix(1);
    const std::string canonical = text::canonical_term(trimmed);
    for (const auto& l : spec.labels) {
        bool exact = text::canonical_term(l.code) == canonical;
        for (const auto& a : l.aliases) exact = exact || text::canonical_term(a) == canonical;
        if (exact) return {l.code};
    }

    const std::string folded = text::fold_case(generated);
    std::vector<Occurrence> occ;
    for (std::size_t i = 0; i < spec.labels.size(); ++i) {
        find_whole_word(generated, spec.labels[i].code, i, occ);
        for (const auto& a : spec.labels[i].aliases) find_whole_word(folded, text::fold_case(a), i, occ);
    }
    std::set<std::size_t> matched;
    for (const auto& o : occ) {
        const bool nested = std::any_of(occ.begin(), occ.end(), [&](const Occurrence& other) {
            return other.label != o.label && other.start <= o.start && o.end <= other.end &&
                   other.end - other.start > o.end - o.start;
        });
        if (!nested) matched.insert(o.label);
    }
    if (matched.empty()) unparseable(generated, "no label matched");
    if (spec.output == OutputKind::single_label && matched.size() > 1) unparseable(generated, "ambiguous");

    std::vector<std::string> codes;
    for (std::size_t i : matched) codes.push_back(spec.labels[i].code);
    std::sort(codes.begin(), codes.end());
    return codes;
}

}  // namespace oncorag::prompt
