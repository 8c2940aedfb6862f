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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "common/error.hpp"
#include "evalharness/metrics.hpp"
#include "oracles.hpp"

using namespace oncorag;
using namespace oncorag::evalharness;
using Seqs = std::vector<std::vector<std::string>>;

TEST_CASE("entity_f1 examples", "[metrics]") {
    const Seqs ner_fixture = {{"B", "I", "I", "O", "B", "I"}};
    CHECK(entity_f1(ner_fixture, ner_fixture).f1 == 1.0);

    const Seqs gold = {{"B-D", "O", "O"}};
    const auto r = entity_f1(gold, {{"B-D", "O", "B-D"}});
    CHECK(r.precision == 0.5);
    CHECK(r.recall == 1.0);
    CHECK(std::abs(r.f1 - 2.0 / 3.0) < 1e-9);
    CHECK(entity_f1(gold, {{"O", "O", "O"}}).f1 == 0.0);
    // Type mismatch or span mismatch is not a match.
    CHECK(entity_f1(gold, {{"B-X", "O", "O"}}).tp == 0);
    CHECK(entity_f1({{"B-D", "I-D"}}, {{"B-D", "O"}}).tp == 0);

    CHECK_THROWS_AS(entity_f1(gold, {}), Error);
    CHECK_THROWS_AS(entity_f1(gold, {{"O"}}), Error);
    CHECK_THROWS_AS(entity_f1({{"O", "I-D", "O"}}, {{"O", "O", "O"}}), Error);
}

TEST_CASE("extract_entities", "[metrics]") {
    const auto e = extract_entities({"B-A", "I-A", "I-B", "O", "I-A", "B"});
    REQUIRE(e.size() == 4);
    CHECK(e[0].start == 0);
    CHECK(e[0].end == 2);
    CHECK(e[1].type == "B");
    CHECK(e[2].start == 4);
    CHECK(e[3].type.empty());
}

TEST_CASE("multilabel micro F1 examples", "[metrics]") {
    using Sets = std::vector<std::set<std::string>>;
    CHECK(multilabel_micro_f1({{"A", "B"}}, {{"A", "B"}}).f1 == 1.0);
    const auto r = multilabel_micro_f1({{"A", "B"}}, {{"A"}});
    CHECK(r.precision == 1.0);
    CHECK(r.recall == 0.5);
    CHECK(std::abs(r.f1 - 2.0 / 3.0) < 1e-9);
    CHECK(multilabel_micro_f1({{"A"}}, {{"B"}}).f1 == 0.0);
    CHECK_THROWS_AS(multilabel_micro_f1(Sets{{"A"}}, Sets{{"Z"}}, std::set<std::string>{"A", "B"}), Error);
    CHECK_THROWS_AS(multilabel_micro_f1(Sets{{"A"}}, Sets{}), Error);
}

TEST_CASE("auc and auprc examples", "[metrics]") {
    CHECK(auc({0.9, 0.1}, {1, 0}) == 1.0);
    CHECK(auc({0.8, 0.6, 0.4}, {1, 0, 1}) == 0.5);
    CHECK(auc({0.3, 0.3, 0.3}, {1, 0, 1}) == 0.5);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), Error);
    CHECK_THROWS_AS(auc({0.1}, {1, 0}), Error);

    CHECK(auprc({0.9, 0.1}, {1, 0}) == 1.0);
    CHECK(auprc({0.9, 0.8}, {0, 1}) == 0.5);
    CHECK(auprc({0.5, 0.5}, {0, 1}) == 0.5);
    CHECK_THROWS_AS(auprc({0.9, 0.8}, {0, 0}), Error);
}

TEST_CASE("metrics agree with brute-force oracles on 200 random instances", "[metrics]") {
    Rng rng(31337);
    for (int inst = 0; inst < 200; ++inst) {
        const auto n_seq = 1 + rng.below(5);
        Seqs gold, pred;
        for (std::size_t s = 0; s < n_seq; ++s) {
            const auto len = 1 + rng.below(10);
            gold.push_back(testing::random_bio(rng, len));
            auto p = gold.back();
            // Perturb; pred may contain orphan I tags.
            for (auto& l : p) {
                const auto r = rng.below(6);
                if (r == 0) l = "O";
                else if (r == 1) l = "I-Drug";
                else if (r == 2) l = "B-Disease";
            }
            pred.push_back(p);
        }
        const auto c = testing::oracle_entity_counts(gold, pred);
        const auto got = entity_f1(gold, pred);
        REQUIRE(std::abs(got.f1 - c.f1()) < 1e-9);
        CHECK(got.tp == c.tp);
        CHECK(got.fp == c.fp);
        CHECK(got.fn == c.fn);
        if (got.precision + got.recall > 0) {
            CHECK(std::abs(got.f1 - 2 * got.precision * got.recall / (got.precision + got.recall)) < 1e-12);
        }

        const std::vector<std::string> space = {"A", "B", "C", "D", "E"};
        std::vector<std::set<std::string>> gs, ps;
        const auto n = 1 + rng.below(20);
        for (std::size_t i = 0; i < n; ++i) {
            std::set<std::string> g, p;
            for (const auto& l : space) {
                if (rng.below(3) == 0) g.insert(l);
                if (rng.below(3) == 0) p.insert(l);
            }
            gs.push_back(g);
            ps.push_back(p);
        }
        CHECK(std::abs(multilabel_micro_f1(gs, ps).f1 - testing::oracle_micro_counts(gs, ps).f1()) < 1e-9);

        const auto m = 2 + rng.below(49);
        std::vector<double> scores(m);
        std::vector<int> labels(m);
        for (std::size_t i = 0; i < m; ++i) {
            // Coarse grid so ties are common.
            scores[i] = static_cast<double>(rng.below(8)) / 8.0;
            labels[i] = rng.coin() ? 1 : 0;
        }
        labels[0] = 1;
        labels[1] = 0;
        const double a = auc(scores, labels);
        CHECK(std::abs(a - testing::oracle_auc(scores, labels)) < 1e-9);
        CHECK(std::abs(auprc(scores, labels) - testing::oracle_auprc(scores, labels)) < 1e-9);

        std::vector<double> transformed;
        for (double s : scores) transformed.push_back(std::exp(3 * s) - 7);
        CHECK(std::abs(auc(transformed, labels) - a) < 1e-12);
    }
}
