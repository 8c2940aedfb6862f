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

#include <string>

namespace oncorag::http {

struct PostOptions {
    int timeout_ms = 30000;
    // Additional attempts after the first failure.
    int retries = 2;
};

// POSTs a JSON body to `url` (http://host[:port]/path) and returns the body
// of a 2xx response. Connection failures, timeouts, and non-2xx statuses are
// retried; the last failure surfaces as ErrorCode::transport.
std::string post_json(const std::string& url, const std::string& body, const PostOptions& options);

}  // namespace oncorag::http
