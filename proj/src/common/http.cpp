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

#include "common/http.hpp"

#include "common/error.hpp"
#include "httplib.h"

namespace oncorag::http {

namespace {

struct Url {
    std::string origin;
    std::string path;
};

Url split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) fail(ErrorCode::invalid_argument, "endpoint is not a URL: " + url);
    if (url.compare(0, scheme_end, "http") != 0) {
        fail(ErrorCode::invalid_argument, "only http:// endpoints are supported: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string post_json(const std::string& url, const std::string& body, const PostOptions& options) {
    const Url target = split_url(url);
    httplib::Client client(target.origin);
    const auto sec = options.timeout_ms / 1000;
    const auto usec = (options.timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);

    std::string last_error;
    for (int attempt = 0; attempt <= options.retries; ++attempt) {
        auto res = client.Post(target.path, body, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;
        }
        if (res->status >= 200 && res->status < 300) return res->body;
        last_error = "HTTP status " + std::to_string(res->status);
    }
    fail(ErrorCode::transport, "POST " + url + " failed after " + std::to_string(options.retries + 1) +
                                   " attempt(s): " + last_error);
}

}  // namespace oncorag::http
