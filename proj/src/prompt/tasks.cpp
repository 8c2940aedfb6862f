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

#include "prompt/tasks.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "common/error.hpp"
#include "common/jsonl.hpp"
#include "common/text.hpp"
#include "prompt/parse.hpp"

namespace oncorag::prompt {

using nlohmann::json;

const char* to_string(TaskKind task) noexcept {
    switch (task) {
        case TaskKind::ner_bio: return "ner_bio";
        case TaskKind::relation_extraction: return "relation_extraction";
        case TaskKind::nli: return "nli";
        case TaskKind::hoc_multilabel: return "hoc_multilabel";
        case TaskKind::cancer_type: return "cancer_type";
        case TaskKind::tnm_t: return "tnm_t";
        case TaskKind::tnm_n: return "tnm_n";
        case TaskKind::tnm_m: return "tnm_m";
        case TaskKind::icd10: return "icd10";
        case TaskKind::snomed: return "snomed";
        case TaskKind::response_pred: return "response_pred";
    }
    return "unknown";
}

TaskKind task_from_string(std::string_view name) {
    for (TaskKind t : kAllTasks) {
        if (name == to_string(t)) return t;
    }
    fail(ErrorCode::invalid_argument, "unknown task \"" + std::string(name) + "\"");
}

const LabelDef* TaskSpec::find_label(std::string_view code) const {
    for (const auto& l : labels) {
        if (l.code == code) return &l;
    }
    return nullptr;
}

namespace {

std::vector<TaskSpec> make_specs() {
    std::vector<TaskSpec> specs;
    specs.push_back({TaskKind::ner_bio, OutputKind::bio, {}, "", false});
    specs.push_back({TaskKind::relation_extraction,
                     OutputKind::single_label,
                     {{"TrIP", {"Treatment improves medical problem"}},
                      {"TrWP", {"Treatment worsens medical problem"}},
                      {"TrCP", {"Treatment causes medical problem"}},
                      {"TrAP", {"Treatment is administered for medical problem"}},
                      {"TrNAP", {"Treatment is not administered because of medical problem"}},
                      {"TeRP", {"Test reveals medical problem"}},
                      {"TeCP", {"Test conducted to investigate medical problem"}},
                      {"PIP", {"Medical problem indicates medical problem"}}},
                     "",
                     false});
    specs.push_back({TaskKind::nli,
                     OutputKind::single_label,
                     {{"Contradiction", {"contradiction"}}, {"Neutral", {"neutral"}}, {"Entailment", {"entailment"}}},
                     "",
                     false});
    specs.push_back({TaskKind::hoc_multilabel,
                     OutputKind::multi_label,
                     {{"PS", {"Sustaining proliferative signaling"}},
                      {"GS", {"Evading growth suppressors"}},
                      {"CD", {"Resisting cell death"}},
                      {"RI", {"Enabling replicative immortality"}},
                      {"A", {"Inducing angiogenesis"}},
                      {"IM", {"Activating invasion and metastasis"}},
                      {"GI", {"Genome instability & mutation", "Genomic instability and mutation"}},
                      {"TPI", {"Tumor-promoting inflammation", "Tumor promoting inflammation"}},
                      {"CE", {"Deregulating cellular energetics", "Cellular energetics"}},
                      {"ID", {"Avoiding immune destruction"}}},
                     "",
                     false});
    specs.push_back({TaskKind::cancer_type,
                     OutputKind::single_label,
                     {{"ACC", {"Adrenocortical carcinoma"}},
                      {"BLCA", {"Bladder urothelial carcinoma"}},
                      {"BRCA", {"Breast invasive carcinoma"}},
                      {"CESC", {"Cervical squamous cell carcinoma and endocervical adenocarcinoma"}},
                      {"CHOL", {"Cholangiocarcinoma"}},
                      {"COAD", {"Colon adenocarcinoma"}},
                      {"DLBC", {"Lymphoid neoplasm diffuse large B-cell lymphoma"}},
                      {"ESCA", {"Esophageal carcinoma"}},
                      {"GBM", {"Glioblastoma multiforme"}},
                      {"HNSC", {"Head and neck squamous cell carcinoma"}},
                      {"KICH", {"Kidney chromophobe"}},
                      {"KIRC", {"Kidney renal clear cell carcinoma"}},
                      {"KIRP", {"Kidney renal papillary cell carcinoma"}},
                      {"LGG", {"Brain lower grade glioma"}},
                      {"LIHC", {"Liver hepatocellular carcinoma"}},
                      {"LUAD", {"Lung adenocarcinoma"}},
                      {"LUSC", {"Lung squamous cell carcinoma"}},
                      {"MESO", {"Mesothelioma"}},
                      {"OV", {"Ovarian serous cystadenocarcinoma"}},
                      {"PAAD", {"Pancreatic adenocarcinoma"}},
                      {"PCPG", {"Pheochromocytoma and paraganglioma"}},
                      {"PRAD", {"Prostate adenocarcinoma"}},
                      {"READ", {"Rectum adenocarcinoma"}},
                      {"SARC", {"Sarcoma"}},
                      {"SKCM", {"Skin cutaneous melanoma"}},
                      {"STAD", {"Stomach adenocarcinoma"}},
                      {"TGCT", {"Testicular germ cell tumors"}},
                      {"THCA", {"Thyroid carcinoma"}},
                      {"THYM", {"Thymoma"}},
                      {"UCEC", {"Uterine corpus endometrial carcinoma"}},
                      {"UCS", {"Uterine carcinosarcoma"}},
                      {"UVM", {"Uveal melanoma"}}},
                     "",
                     false});
    specs.push_back({TaskKind::tnm_t, OutputKind::single_label, {{"T1", {}}, {"T2", {}}, {"T3", {}}, {"T4", {}}}, "", false});
    specs.push_back({TaskKind::tnm_n, OutputKind::single_label, {{"N0", {}}, {"N1", {}}, {"N2", {}}, {"N3", {}}}, "", false});
    specs.push_back({TaskKind::tnm_m, OutputKind::single_label, {{"M0", {}}, {"M1", {}}}, "", false});
    specs.push_back({TaskKind::icd10, OutputKind::pattern, {}, R"(\b[A-Za-z][0-9]{2}(\.[0-9A-Za-z]{1,4})?\b)", true});
    specs.push_back({TaskKind::snomed, OutputKind::pattern, {}, R"(\b[0-9]{6,18}\b)", false});
    specs.push_back({TaskKind::response_pred,
                     OutputKind::single_label,
                     {{"Responder", {"responder"}}, {"Non-responder", {"non-responder", "nonresponder"}}},
                     "",
                     false});
    return specs;
}

}  // namespace

const TaskSpec& task_spec(TaskKind task) {
    static const std::vector<TaskSpec> specs = make_specs();
    for (const auto& s : specs) {
        if (s.task == task) return s;
    }
    fail(ErrorCode::internal, "no spec registered for task");
}

void validate_gold(const LabeledExample& ex) {
    const TaskSpec& spec = task_spec(ex.task);
    switch (spec.output) {
        case OutputKind::bio: {
            if (ex.tokens.empty()) fail(ErrorCode::invalid_argument, "BIO example has no tokens");
            if (ex.gold.size() != ex.tokens.size()) fail(ErrorCode::invalid_argument, "BIO gold length differs from token count");
            if (!is_valid_bio(ex.gold)) fail(ErrorCode::invalid_argument, "gold is not a valid BIO sequence");
            return;
        }
        case OutputKind::single_label:
            if (ex.gold.size() != 1 || spec.find_label(ex.gold[0]) == nullptr) {
                fail(ErrorCode::invalid_argument, std::string("gold is not a single ") + to_string(ex.task) + " label");
            }
            return;
        case OutputKind::multi_label:
            if (ex.gold.empty()) fail(ErrorCode::invalid_argument, "multi-label gold is empty");
            for (const auto& g : ex.gold) {
                if (spec.find_label(g) == nullptr) fail(ErrorCode::invalid_argument, "unknown label " + g);
            }
            return;
        case OutputKind::pattern: {
            const std::regex re("^" + spec.pattern + "$");
            if (ex.gold.size() != 1 || !std::regex_match(ex.gold[0], re)) {
                fail(ErrorCode::invalid_argument, std::string("gold does not match the ") + to_string(ex.task) + " grammar");
            }
            return;
        }
    }
}

std::vector<LabeledExample> load_conll(const std::filesystem::path& path, corpus::Language language) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open " + path.string());
    std::vector<LabeledExample> out;
    LabeledExample current;
    current.task = TaskKind::ner_bio;
    current.language = language;
    auto flush = [&](std::size_t line_no) {
        if (current.tokens.empty()) return;
        for (std::size_t i = 0; i < current.tokens.size(); ++i) current.input += (i ? " " : "") + current.tokens[i];
        try {
            validate_gold(current);
        } catch (const Error& e) {
            fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        out.push_back(std::move(current));
        current = LabeledExample{};
        current.task = TaskKind::ner_bio;
        current.language = language;
    };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) {
            flush(line_no);
            continue;
        }
        const auto tab = line.rfind('\t');
        if (tab == std::string::npos) fail(ErrorCode::parse, path.string() + ":" + std::to_string(line_no) + ": expected token<TAB>label");
        current.tokens.emplace_back(line.substr(0, tab));
        current.gold.emplace_back(text::trim(std::string_view(line).substr(tab + 1)));
    }
    flush(line_no);
    return out;
}

std::vector<LabeledExample> load_task_jsonl(const std::filesystem::path& path, TaskKind task,
                                            corpus::Language language) {
    if (task_spec(task).output == OutputKind::bio) fail(ErrorCode::invalid_argument, "ner_bio datasets are CoNLL files");
    std::vector<LabeledExample> out;
    io::for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        const std::string where = path.string() + ":" + std::to_string(line) + ": ";
        LabeledExample ex;
        ex.task = task;
        ex.language = language;
        try {
            const auto& input = obj.at("input");
            if (input.is_string()) {
                ex.input = input.get<std::string>();
            } else {
                ex.input = "Sentence 1: " + input.at("sentence1").get<std::string>() +
                           "\nSentence 2: " + input.at("sentence2").get<std::string>();
            }
            const auto& gold = obj.at("gold");
            if (gold.is_array()) {
                ex.gold = gold.get<std::vector<std::string>>();
            } else {
                ex.gold = {gold.get<std::string>()};
            }
            if (obj.contains("language")) ex.language = corpus::language_from_string(obj["language"].get<std::string>());
        } catch (const json::exception& e) {
            fail(ErrorCode::parse, where + e.what());
        } catch (const Error& e) {
            fail(ErrorCode::parse, where + e.what());
        }
        if (task_spec(task).output == OutputKind::multi_label) {
            std::sort(ex.gold.begin(), ex.gold.end());
            ex.gold.erase(std::unique(ex.gold.begin(), ex.gold.end()), ex.gold.end());
        }
        if (text::trim(ex.input).empty()) fail(ErrorCode::parse, where + "empty input");
        try {
            validate_gold(ex);
        } catch (const Error& e) {
            fail(ErrorCode::parse, where + e.what());
        }
        out.push_back(std::move(ex));
    });
    return out;
}

std::vector<LabeledExample> load_examples(const std::filesystem::path& path, TaskKind task,
                                          corpus::Language language) {
    if (task == TaskKind::ner_bio) return load_conll(path, language);
    return load_task_jsonl(path, task, language);
}

std::string format_output(const LabeledExample& ex) {
    const TaskSpec& spec = task_spec(ex.task);
    std::string out;
    switch (spec.output) {
        case OutputKind::bio:
            for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
                if (i) out += ", ";
                out += ex.tokens[i] + ": " + ex.gold[i];
            }
            return out;
        case OutputKind::multi_label:
            for (const auto& code : ex.gold) {
                const LabelDef* def = spec.find_label(code);
                if (!out.empty()) out += "; ";
                out += def != nullptr && !def->aliases.empty() ? def->aliases.front() + " (" + code + ")" : code;
            }
            return out;
        case OutputKind::single_label:
        case OutputKind::pattern:
            return ex.gold.front();
    }
    return out;
}

}  // namespace oncorag::prompt
