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

#include "app/settings.hpp"

#include <cctype>
#include <cstdlib>
#include <stdexcept>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"

namespace oncorag::app {

using text::fold_case;
using text::split;
using text::trim;

namespace {

const std::map<std::string, std::string, std::less<>>& defaults() {
    static const std::map<std::string, std::string, std::less<>> d = {
        {"corpus_path", ""},
        {"index_path", ""},
        {"graph_path", ""},
        {"embeddings_path", ""},
        {"templates_dir", "templates"},
        {"fixtures_path", ""},
        {"embedder", "hashed_ngram"},
        {"embed_dim", "4096"},
        {"embed_seed", "0"},
        {"embed_endpoint", ""},
        {"endpoint", ""},
        {"stub", "false"},
        {"timeout_ms", "30000"},
        {"retries", "2"},
        {"max_tokens", "512"},
        {"k", "5"},
        {"mode", "rag"},
        {"language", "en"},
        {"context_budget_chars", "8000"},
        {"link_candidates", "5"},
        {"seed", "0"},
        {"chunk_target_chars", "800"},
        {"chunk_max_chars", "1600"},
        {"merge_threshold", "0.35"},
        {"transe_dim", "50"},
        {"transe_margin", "1.0"},
        {"transe_lr", "0.01"},
        {"transe_epochs", "500"},
        {"host", "127.0.0.1"},
        {"port", "8080"},
    };
    return d;
}

}  // namespace

Settings::Settings() : values_(defaults()) {}

bool Settings::known(std::string_view key) const { return values_.find(key) != values_.end(); }

void Settings::set(std::string_view key, std::string_view value) {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::invalid_argument, "unknown setting \"" + std::string(key) + "\"");
    it->second = std::string(value);
}

const std::string& Settings::get(std::string_view key) const {
    auto it = values_.find(key);
    if (it == values_.end()) fail(ErrorCode::invalid_argument, "unknown setting \"" + std::string(key) + "\"");
    return it->second;
}

void Settings::load_file(const std::filesystem::path& path) {
    const std::string contents = io::read_file(path);
    std::size_t line_no = 0;
    for (auto raw : split(contents, "\n")) {
        ++line_no;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        if (!known(key)) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) + ": unknown setting \"" +
                                       std::string(key) + "\"");
        }
        set(key, trim(line.substr(eq + 1)));
    }
}

void Settings::apply_env() {
    for (auto& [key, value] : values_) {
        std::string name = "ONCORAG_";
        for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (const char* v = std::getenv(name.c_str())) value = v;
    }
}

std::uint64_t Settings::u64(std::string_view key) const {
    const auto& v = get(key);
    std::size_t pos = 0;
    try {
        if (!v.empty() && v.front() != '-') {
            const auto n = std::stoull(v, &pos);
            if (pos == v.size()) return n;
        }
    } catch (const std::exception&) {
    }
    fail(ErrorCode::invalid_argument, "setting " + std::string(key) + " must be a non-negative integer, got \"" + v + "\"");
}

std::size_t Settings::size(std::string_view key) const { return static_cast<std::size_t>(u64(key)); }

double Settings::real(std::string_view key) const {
    const auto& v = get(key);
    std::size_t pos = 0;
    try {
        const double d = std::stod(v, &pos);
        if (pos == v.size()) return d;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::invalid_argument, "setting " + std::string(key) + " must be a number, got \"" + v + "\"");
}

bool Settings::flag(std::string_view key) const {
    const auto v = fold_case(get(key));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off" || v.empty()) return false;
    fail(ErrorCode::invalid_argument, "setting " + std::string(key) + " must be a boolean, got \"" + v + "\"");
}

nlohmann::json Settings::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

}  // namespace oncorag::app
