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

#include <algorithm>
#include <cmath>
#include <fstream>

#include "common/error.hpp"
#include "common/random.hpp"
#include "support.hpp"
#include "vindex/vindex.hpp"

using namespace oncorag;
using namespace oncorag::vindex;

namespace {

embed::EmbeddingVector random_vec(Rng& rng, std::size_t dim) {
    embed::EmbeddingVector v{std::vector<double>(dim)};
    for (auto& x : v.values) x = rng.uniform(-1, 1);
    return v;
}

// Filter, score against the stored float32 values, sort by (score desc, id asc).
std::vector<SearchHit> brute_force(const VectorIndex& index, const embed::EmbeddingVector& q, std::size_t k,
                                   const TagFilter& filter) {
    std::vector<SearchHit> all;
    for (const auto& e : index.entries()) {
        if (!matches_filter(e.tags, filter)) continue;
        double dot = 0, ne = 0, nq = 0;
        for (std::size_t i = 0; i < q.dim(); ++i) {
            dot += static_cast<double>(e.vector[i]) * q.values[i];
            ne += static_cast<double>(e.vector[i]) * e.vector[i];
            nq += q.values[i] * q.values[i];
        }
        all.push_back({e.ref, dot / (std::sqrt(ne) * std::sqrt(nq)), e.entry_id});
    }
    std::sort(all.begin(), all.end(), [](const SearchHit& a, const SearchHit& b) {
        return a.score != b.score ? a.score > b.score : a.entry_id < b.entry_id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

}  // namespace

TEST_CASE("insert assigns sequential ids and rejects bad input", "[vindex]") {
    VectorIndex index(4);
    CHECK(index.insert({"d", 0}, {{1, 0, 0, 0}}, {}) == 0);
    CHECK(index.insert({"d", 1}, {{0, 1, 0, 0}}, {}) == 1);
    CHECK_THROWS_AS(index.insert({"d", 1}, {{0, 0, 1, 0}}, {}), Error);
    CHECK_THROWS_AS(index.insert({"d", 2}, {{0, 0, 1}}, {}), Error);
    CHECK(index.size() == 2);
}

TEST_CASE("search examples", "[vindex]") {
    VectorIndex index(2);
    index.insert({"a", 0}, {{1, 0}}, {"Treatment/Medication"});
    auto hits = index.search_topk({{1, 0}}, 5);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].ref == ChunkRef{"a", 0});
    CHECK(hits[0].score == Catch::Approx(1.0).margin(1e-12));

    CHECK(index.search_topk({{1, 0}}, 5, std::vector<std::string>{"Diagnosis"}).empty());
    CHECK(index.search_topk({{1, 0}}, 5, std::vector<std::string>{"Treatment"}).size() == 1);
    CHECK_THROWS_AS(index.search_topk({{0, 0}}, 1), Error);
    CHECK_THROWS_AS(index.search_topk({{1, 0}}, 0), Error);
}

TEST_CASE("three entries, k = 2 matches brute force", "[vindex]") {
    VectorIndex index(2);
    index.insert({"a", 0}, {{1, 0}}, {});
    index.insert({"b", 0}, {{0.6, 0.8}}, {});
    index.insert({"c", 0}, {{0, 1}}, {});
    const embed::EmbeddingVector q{{0.8, 0.6}};
    CHECK(index.search_topk(q, 2) == brute_force(index, q, 2, std::nullopt));
}

TEST_CASE("ties break by insertion order", "[vindex]") {
    VectorIndex index(2);
    index.insert({"z", 0}, {{1, 1}}, {});
    index.insert({"a", 0}, {{2, 2}}, {});
    const auto hits = index.search_topk({{1, 1}}, 2);
    REQUIRE(hits.size() == 2);
    CHECK(hits[0].entry_id == 0);
    CHECK(hits[1].entry_id == 1);
}

TEST_CASE("random oracle, filter soundness and k-monotonicity", "[vindex]") {
    Rng rng(123);
    const std::vector<std::string> tags = {"Diagnosis/TumorStage", "Diagnosis/Histology", "Treatment/Medication",
                                           "Genomics"};
    VectorIndex index(24);
    for (std::size_t i = 0; i < 300; ++i) {
        corpus::TagSet ts;
        for (const auto& t : tags) {
            if (rng.coin()) ts.insert(t);
        }
        index.insert({"doc" + std::to_string(i / 3), i % 3}, random_vec(rng, 24), ts);
    }
    const std::vector<TagFilter> filters = {std::nullopt, std::vector<std::string>{"Diagnosis"},
                                            std::vector<std::string>{"Treatment/Medication", "Genomics"},
                                            std::vector<std::string>{"Nothing"}};
    for (int qi = 0; qi < 40; ++qi) {
        const auto q = random_vec(rng, 24);
        const auto& f = filters[qi % filters.size()];
        const std::size_t k = 1 + rng.below(15);
        const auto hits = index.search_topk(q, k, f);
        const auto expect = brute_force(index, q, k, f);
        REQUIRE(hits.size() == expect.size());
        for (std::size_t i = 0; i < hits.size(); ++i) {
            CHECK(hits[i].ref == expect[i].ref);
            CHECK(std::abs(hits[i].score - expect[i].score) < 1e-9);
            CHECK(matches_filter(index.entry(hits[i].entry_id)->tags, f));
        }
        const auto more = index.search_topk(q, k + 1, f);
        CHECK(std::equal(hits.begin(), hits.end(), more.begin()));
    }
}

TEST_CASE("save/load reproduces search results bit-identically", "[vindex]") {
    testing::TempDir dir;
    Rng rng(5);
    VectorIndex index(16);
    for (std::size_t i = 0; i < 50; ++i) index.insert({"d" + std::to_string(i), 0}, random_vec(rng, 16), {"T/" + std::to_string(i % 4)});
    index.save(dir / "idx.bin");
    const auto loaded = VectorIndex::load(dir / "idx.bin");
    CHECK(loaded.size() == 50);
    for (int i = 0; i < 20; ++i) {
        const auto q = random_vec(rng, 16);
        CHECK(index.search_topk(q, 7) == loaded.search_topk(q, 7));
        CHECK(index.search_topk(q, 7, std::vector<std::string>{"T/1"}) ==
              loaded.search_topk(q, 7, std::vector<std::string>{"T/1"}));
    }

    // Corrupt magic.
    {
        std::fstream f(dir / "idx.bin", std::ios::in | std::ios::out | std::ios::binary);
        f.write("XXXX", 4);
    }
    CHECK_THROWS_AS(VectorIndex::load(dir / "idx.bin"), Error);
}
