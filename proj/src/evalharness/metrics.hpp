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
#include <set>
#include <string>
#include <vector>

namespace oncorag::evalharness {

struct PRF {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

// P = tp/(tp+fp), R = tp/(tp+fn), F1 = 2PR/(P+R); each is 0 when undefined.
PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

struct Entity {
    std::size_t start = 0;  // token offsets, half-open
    std::size_t end = 0;
    std::string type;

    friend auto operator<=>(const Entity&, const Entity&) = default;
};

// Maximal B(I)* runs. An I that does not continue a run of its type opens one.
std::vector<Entity> extract_entities(const std::vector<std::string>& labels);

// Strict (span, type) matching, micro-averaged over all sequences. Gold must
// be valid BIO; sequence counts and lengths must agree.
PRF entity_f1(const std::vector<std::vector<std::string>>& gold, const std::vector<std::vector<std::string>>& pred);

// Micro-averaged over label instances. With a label space, labels outside it are rejected.
PRF multilabel_micro_f1(const std::vector<std::set<std::string>>& gold, const std::vector<std::set<std::string>>& pred,
                        const std::optional<std::set<std::string>>& label_space = std::nullopt);

// Mann-Whitney: (concordant + 0.5 * tied) / (n_pos * n_neg). Needs both classes.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Average precision, sum over distinct descending score thresholds of
// (R_n - R_{n-1}) * P_n, with tied scores forming one threshold. Needs a positive.
double auprc(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace oncorag::evalharness
