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

#include "evalharness/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "common/error.hpp"
#include "prompt/parse.hpp"

namespace oncorag::evalharness {

PRF prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
    PRF r;
    r.tp = tp;
    r.fp = fp;
    r.fn = fn;
    r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
}

std::vector<Entity> extract_entities(const std::vector<std::string>& labels) {
    std::vector<Entity> out;
    std::optional<Entity> open;
    auto close = [&](std::size_t at) {
        if (open) {
            open->end = at;
            out.push_back(*open);
            open.reset();
        }
    };
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto tag = prompt::parse_bio_tag(labels[i]);
        if (!tag || tag->prefix == 'O') {
            close(i);
        } else if (tag->prefix == 'B' || !open || open->type != tag->type) {
            close(i);
            open = Entity{i, i, tag->type};
        }
    }
    close(labels.size());
    return out;
}

PRF entity_f1(const std::vector<std::vector<std::string>>& gold, const std::vector<std::vector<std::string>>& pred) {
    if (gold.size() != pred.size()) fail(ErrorCode::invalid_argument, "gold and pred sequence counts differ");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t s = 0; s < gold.size(); ++s) {
        if (gold[s].size() != pred[s].size()) {
            fail(ErrorCode::invalid_argument, "sequence " + std::to_string(s) + ": gold and pred lengths differ");
        }
        if (!prompt::is_valid_bio(gold[s])) {
            fail(ErrorCode::invalid_argument, "sequence " + std::to_string(s) + ": gold is not valid BIO");
        }
        const auto g = extract_entities(gold[s]);
        const auto p = extract_entities(pred[s]);
        const std::set<Entity> gs(g.begin(), g.end());
        for (const auto& e : p) {
            if (gs.contains(e)) {
                ++tp;
            } else {
                ++fp;
            }
        }
        const std::set<Entity> ps(p.begin(), p.end());
        for (const auto& e : g) fn += !ps.contains(e);
    }
    return prf_from_counts(tp, fp, fn);
}

PRF multilabel_micro_f1(const std::vector<std::set<std::string>>& gold, const std::vector<std::set<std::string>>& pred,
                        const std::optional<std::set<std::string>>& label_space) {
    if (gold.size() != pred.size()) fail(ErrorCode::invalid_argument, "gold and pred counts differ");
    auto check = [&](const std::set<std::string>& labels) {
        if (!label_space) return;
        for (const auto& l : labels) {
            if (!label_space->contains(l)) fail(ErrorCode::invalid_argument, "unknown label " + l);
        }
    };
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        check(gold[i]);
        check(pred[i]);
        for (const auto& l : pred[i]) {
            if (gold[i].contains(l)) {
                ++tp;
            } else {
                ++fp;
            }
        }
        for (const auto& l : gold[i]) fn += !pred[i].contains(l);
    }
    return prf_from_counts(tp, fp, fn);
}

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) fail(ErrorCode::invalid_argument, "scores and labels differ in length");
    for (int l : labels) {
        if (l != 0 && l != 1) fail(ErrorCode::invalid_argument, "labels must be 0 or 1");
    }
}

}  // namespace

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t n_neg = labels.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) fail(ErrorCode::invalid_argument, "auc needs both classes");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of midranks of positives (1-based), ties sharing their average rank.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t pos_in_group = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) pos_in_group += labels[order[j++]] == 1;
        const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
        pos_rank_sum += midrank * static_cast<double>(pos_in_group);
        i = j;
    }
    const double np = static_cast<double>(n_pos);
    return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double auprc(const std::vector<double>& scores, const std::vector<int>& labels) {
    check_inputs(scores, labels);
    const auto n_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (n_pos == 0) fail(ErrorCode::invalid_argument, "auprc needs at least one positive");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double ap = 0.0;
    double prev_recall = 0.0;
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            if (labels[order[j]] == 1) {
                ++tp;
            } else {
                ++fp;
            }
            ++j;
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

}  // namespace oncorag::evalharness
