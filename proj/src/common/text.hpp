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
#include <string>
#include <string_view>
#include <vector>

namespace oncorag::text {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis = kFnvOffsetBasis) noexcept;

// 16 lowercase hex digits.
std::string hex64(std::uint64_t value);

// ASCII letters plus the Latin-1 supplement capitals (UTF-8 C3 80..C3 9E,
// except the multiplication sign) are folded to lowercase.
std::string fold_case(std::string_view s);

// Alphanumeric ASCII or any byte of a multi-byte UTF-8 sequence.
inline bool is_word_byte(unsigned char c) noexcept {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::string_view trim(std::string_view s) noexcept;

// Lowercased, whitespace runs collapsed to one space, trimmed.
std::string canonical_term(std::string_view s);

std::vector<std::string_view> split(std::string_view s, std::string_view delimiter);

bool starts_with_path(std::string_view path, std::string_view prefix) noexcept;

// Number of '/'-separated components; 0 for an empty path.
std::size_t path_depth(std::string_view path) noexcept;

// "A/B/C" -> {"A", "A/B", "A/B/C"}.
std::vector<std::string> path_prefixes(std::string_view path);

bool valid_utf8(std::string_view s) noexcept;

// Splits s into UTF-8 code point substrings. Invalid bytes become one-byte units.
std::vector<std::string_view> code_points(std::string_view s);

// Largest position <= pos that does not fall inside a multi-byte sequence.
std::size_t utf8_floor(std::string_view s, std::size_t pos) noexcept;

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view encoded);

}  // namespace oncorag::text
