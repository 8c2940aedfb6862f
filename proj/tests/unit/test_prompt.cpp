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

#include <cstdlib>
#include <fstream>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/random.hpp"
#include "prompt/dataset.hpp"
#include "prompt/generator.hpp"
#include "prompt/parse.hpp"
#include "prompt/template.hpp"
#include "support.hpp"

using namespace oncorag;
using namespace oncorag::prompt;

namespace {

const TemplateRegistry& registry() {
    static const TemplateRegistry r = TemplateRegistry::load_dir(ONCORAG_TEMPLATES);
    return r;
}

const std::vector<std::string> kNerTokens = {"cystic", "renal", "diseases", "and", "renal", "cancer"};

}  // namespace

TEST_CASE("label parsing examples", "[prompt]") {
    CHECK(parse_label_output("Neutral", task_spec(TaskKind::nli)) == std::vector<std::string>{"Neutral"});
    CHECK(parse_label_output("  neutral ", task_spec(TaskKind::nli)) == std::vector<std::string>{"Neutral"});
    CHECK(parse_label_output("TrAP", task_spec(TaskKind::relation_extraction)) == std::vector<std::string>{"TrAP"});
    CHECK(parse_label_output("Tumor-promoting inflammation (TPI)", task_spec(TaskKind::hoc_multilabel)) ==
          std::vector<std::string>{"TPI"});
    CHECK(parse_label_output("The answer is Entailment.", task_spec(TaskKind::nli)) ==
          std::vector<std::string>{"Entailment"});
    CHECK_THROWS_AS(parse_label_output("no idea", task_spec(TaskKind::nli)), Error);
    CHECK_THROWS_AS(parse_label_output("Neutral or Entailment", task_spec(TaskKind::nli)), Error);
    CHECK_THROWS_AS(parse_label_output("", task_spec(TaskKind::nli)), Error);
}

TEST_CASE("every fixture gold survives format then parse", "[prompt]") {
    for (TaskKind task : kAllTasks) {
        const std::string file = std::string(to_string(task)) + (task == TaskKind::ner_bio ? ".conll" : ".jsonl");
        const auto examples = load_examples(testing::fixture("datasets/" + file), task, corpus::Language::en);
        REQUIRE_FALSE(examples.empty());
        for (const auto& ex : examples) {
            const auto text = format_output(ex);
            if (task == TaskKind::ner_bio) {
                const auto parsed = parse_bio_output(text, ex.tokens);
                CHECK(parsed.labels == ex.gold);
                CHECK(parsed.warnings.empty());
            } else {
                auto parsed = parse_label_output(text, task_spec(task));
                std::sort(parsed.begin(), parsed.end());
                auto gold = ex.gold;
                std::sort(gold.begin(), gold.end());
                CHECK(parsed == gold);
            }
        }
    }
}

TEST_CASE("BIO parsing examples", "[prompt]") {
    auto r = parse_bio_output("cystic: B, renal: I, diseases: I, and: O, renal: B, cancer: I", kNerTokens);
    CHECK(r.labels == std::vector<std::string>{"B", "I", "I", "O", "B", "I"});
    CHECK(r.warnings.empty());

    r = parse_bio_output("renal: I", {"renal"});
    CHECK(r.labels == std::vector<std::string>{"B"});
    CHECK(r.warnings.size() == 1);

    r = parse_bio_output("", {"a", "b", "c"});
    CHECK(r.labels == std::vector<std::string>{"O", "O", "O"});

    r = parse_bio_output("a: B-Disease\nb: I-Disease\nc: I-Drug\nd: XYZ", {"a", "b", "c", "d"});
    CHECK(r.labels == std::vector<std::string>{"B-Disease", "I-Disease", "B-Drug", "O"});
    CHECK(is_valid_bio(r.labels));
}

TEST_CASE("BIO tag grammar", "[prompt]") {
    CHECK(parse_bio_tag("b-Disease")->str() == "B-Disease");
    CHECK(parse_bio_tag("O")->str() == "O");
    CHECK_FALSE(parse_bio_tag("O-Disease"));
    CHECK_FALSE(parse_bio_tag("X"));
    CHECK(is_valid_bio({"B", "I", "O", "B-X", "I-X"}));
    CHECK_FALSE(is_valid_bio({"O", "I"}));
    CHECK_FALSE(is_valid_bio({"B-X", "I-Y"}));
}

TEST_CASE("BIO parsing is total over fuzzed strings", "[prompt]") {
    Rng rng(77);
    const std::vector<std::string> pieces = {"renal", "cancer", ": ", "B", "I", "O", "B-Disease", "I-Drug", ", ",
                                             "\n", "::", "x", " ", "I-", "é", "\t", "cystic"};
    for (int n = 0; n < 1000; ++n) {
        std::vector<std::string> tokens(1 + rng.below(8));
        for (auto& t : tokens) t = pieces[rng.below(pieces.size())];
        std::string gen;
        const auto len = rng.below(30);
        for (std::size_t i = 0; i < len; ++i) gen += pieces[rng.below(pieces.size())];
        const auto r = parse_bio_output(gen, tokens);
        REQUIRE(r.labels.size() == tokens.size());
        REQUIRE(is_valid_bio(r.labels));
    }
}

TEST_CASE("template parsing errors", "[prompt]") {
    const auto ok = parse_template("{{! note }}\n[instruction]\nDo it.\n[layout]\n{{instruction}}\n{{context}}{{input}}\n");
    CHECK(ok.instruction == "Do it.");
    CHECK_THROWS_AS(parse_template("{{! open\n[instruction]\nx\n[layout]\n{{instruction}}{{context}}{{input}}"), Error);
    CHECK_THROWS_AS(parse_template("[layout]\n{{instruction}}{{context}}{{input}}"), Error);
    CHECK_THROWS_AS(parse_template("[instruction]\nx\n[layout]\n{{instruction}}{{input}}"), Error);
    CHECK_THROWS_AS(parse_template("[instruction]\n\n[layout]\n{{instruction}}{{context}}{{input}}"), Error);
}

TEST_CASE("registry has every task in both languages", "[prompt]") {
    CHECK(registry().size() == 22);
    for (TaskKind task : kAllTasks) {
        CHECK(registry().find(task, corpus::Language::en) != nullptr);
        CHECK(registry().find(task, corpus::Language::de) != nullptr);
        CHECK(registry().get(task, corpus::Language::en).instruction !=
              registry().get(task, corpus::Language::de).instruction);
    }
    CHECK_THROWS_AS(TemplateRegistry{}.get(TaskKind::nli, corpus::Language::en), Error);
}

TEST_CASE("prompt layout without and with a bundle", "[prompt]") {
    PromptInput in{TaskKind::nli, corpus::Language::en, "", "A. B."};
    const auto p = render_prompt(in, nullptr, registry());
    CHECK(p.find("### Context") == std::string::npos);
    CHECK(p.find("### Input\nA. B.") != std::string::npos);
    CHECK(p.size() >= 11);
    CHECK(p.substr(p.size() - 11) == "### Answer:");
    CHECK(render_prompt(in, nullptr, registry()) == p);

    retrieve::ContextBundle b;
    b.hits.push_back({{{"d", 0}, 0.5, 0}, "passage", {}});
    b.triples.push_back({"E", "S", "D"});
    b.summaries.push_back({"T", "summary", 1});
    const auto q = render_prompt(in, &b, registry());
    const auto ctx = q.find("### Context");
    REQUIRE(ctx != std::string::npos);
    CHECK(ctx < q.find("passage"));
    CHECK(q.find("passage") < q.find("[E, S, D]"));
    CHECK(q.find("[E, S, D]") < q.find("summary"));
    CHECK(q.find("summary") < q.find("### Input"));
    const auto reparsed = retrieve::bundle_from_json(retrieve::to_json(b));
    CHECK(render_prompt(in, &reparsed, registry()) == q);
}

TEST_CASE("golden NER prompt with a one-hit bundle", "[prompt]") {
    retrieve::ContextBundle b;
    b.hits.push_back({{{"en-004", 0}, 0.8125, 3},
                      "Cystic renal diseases were excluded on imaging. Clear cell renal cancer was confirmed.",
                      {"Diagnosis/Histology"}});
    PromptInput in{TaskKind::ner_bio, corpus::Language::en, "",
                   "Its role in the therapy of glomerulonephritis , autoimmunity , cystic renal diseases and renal cancer is under investigation ."};
    const auto prompt = render_prompt(in, &b, registry());
    const auto path = testing::fixture("golden/ner_prompt_en.txt");
    if (std::getenv("ONCORAG_UPDATE_GOLDEN") != nullptr) io::write_file(path, prompt);
    CHECK(prompt == io::read_file(path));
}

TEST_CASE("stub generator returns fixtures verbatim", "[prompt]") {
    StubGenerator g;
    g.add(TaskKind::nli, input_hash("x"), "Neutral");
    GenerationRequest req;
    req.task = TaskKind::nli;
    req.input = "x";
    CHECK(g.generate(req).text == "Neutral");
    req.input = "y";
    CHECK_THROWS_AS(g.generate(req), Error);
    CHECK(input_hash("a") == "af63dc4c8601ec8c");
    CHECK(StubGenerator::load(testing::fixture("stub_generations.jsonl")).size() == 110);
}

TEST_CASE("instruction dataset from CoNLL", "[prompt]") {
    const auto recs = build_instruction_dataset({testing::fixture("datasets/ner_bio.conll")}, TaskKind::ner_bio,
                                                corpus::Language::en, registry());
    REQUIRE_FALSE(recs.empty());
    const auto& first = recs.front();
    CHECK(first.task == TaskKind::ner_bio);
    CHECK(first.instruction == registry().get(TaskKind::ner_bio, corpus::Language::en).instruction);
    CHECK(first.output.find("cystic: B-Disease, renal: I-Disease, diseases: I-Disease, and: O, renal: B-Disease, cancer: I-Disease") !=
          std::string::npos);

    testing::TempDir dir;
    save_records(dir / "r.jsonl", recs);
    CHECK(load_records(dir / "r.jsonl") == recs);
    CHECK(record_from_json(to_json(first)) == first);
    CHECK_THROWS_AS(record_from_json(nlohmann::json{{"task", "nli"}}), Error);
}

TEST_CASE("instruction subsets nest and stay language-pure", "[prompt]") {
    std::vector<InstructionRecord> all;
    for (int i = 0; i < 900; ++i) {
        const auto lang = i % 2 ? corpus::Language::de : corpus::Language::en;
        all.push_back({TaskKind::nli, lang, "instr", "input " + std::to_string(i), "Neutral"});
    }
    const auto s100 = sample_instruction_subset(all, 100, corpus::Language::de, 9);
    const auto s200 = sample_instruction_subset(all, 200, corpus::Language::de, 9);
    const auto s400 = sample_instruction_subset(all, 400, corpus::Language::de, 9);
    CHECK(s100.size() == 100);
    CHECK(s400.size() == 400);
    auto contains = [](const std::vector<InstructionRecord>& big, const InstructionRecord& r) {
        return std::find(big.begin(), big.end(), r) != big.end();
    };
    for (const auto& r : s100) CHECK(contains(s200, r));
    for (const auto& r : s200) CHECK(contains(s400, r));
    for (const auto& r : s400) CHECK(r.language == corpus::Language::de);
    CHECK(sample_instruction_subset(all, 100, corpus::Language::de, 9) == s100);
    CHECK(sample_instruction_subset(all, 100, corpus::Language::de, 10) != s100);
    CHECK_THROWS_AS(sample_instruction_subset(all, 451, corpus::Language::de, 9), Error);
    CHECK_THROWS_AS(sample_instruction_subset(all, 0, corpus::Language::de, 9), Error);
}
