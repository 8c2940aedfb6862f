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
#include <map>
#include <string>
#include <string_view>

#include "json.hpp"

namespace oncorag::app {

// Flat key/value settings. Every key has a default; unknown keys are rejected.
// Layering is defaults < file < environment (ONCORAG_<KEY>) < explicit set().
class Settings {
public:
    Settings();

    void set(std::string_view key, std::string_view value);
    const std::string& get(std::string_view key) const;
    bool known(std::string_view key) const;

    // "key = value" lines; '#' starts a comment line.
    void load_file(const std::filesystem::path& path);
    void apply_env();

    std::string str(std::string_view key) const { return get(key); }
    std::uint64_t u64(std::string_view key) const;
    std::size_t size(std::string_view key) const;
    double real(std::string_view key) const;
    bool flag(std::string_view key) const;

    nlohmann::json to_json() const;

private:
    std::map<std::string, std::string, std::less<>> values_;
};

}  // namespace oncorag::app
