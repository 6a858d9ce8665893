#include "atri/retrieval.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "atri/text.hpp"

namespace atri {

using json = nlohmann::ordered_json;

const char* stage_name(CaseStage s) {
    switch (s) {
        case CaseStage::D0: return "D0";
        case CaseStage::D1: return "D1";
        case CaseStage::D_balanced: return "D_balanced";
        case CaseStage::test: return "test";
    }
    return "D0";
}

CaseStage stage_from_name(const std::string& s) {
    if (s == "D0") return CaseStage::D0;
    if (s == "D1") return CaseStage::D1;
    if (s == "D_balanced") return CaseStage::D_balanced;
    if (s == "test") return CaseStage::test;
    throw runtime_error("unknown case-set stage: " + s);
}

std::string CaseSet::to_json() const {
    json j;
    j["concept_id"] = concept_id;
    j["stage"] = stage_name(stage);
    j["case_ids"] = case_ids;
    if (!provenance.empty()) j["provenance"] = provenance;
    return j.dump(2) + "\n";
}

CaseSet CaseSet::from_json(const std::string& s) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw runtime_error("malformed case-set JSON");
    CaseSet cs;
    cs.concept_id = j.value("concept_id", "");
    cs.stage = stage_from_name(j.value("stage", "D0"));
    for (const auto& id : j.at("case_ids"))
        cs.case_ids.push_back(id.get<std::string>());
    if (j.contains("provenance"))
        for (auto& [k, v] : j["provenance"].items())
            cs.provenance[k] = v.get<std::string>();
    return cs;
}

void CaseSet::save(const std::string& path) const {
    io::write_file_atomic(path, to_json());
}

CaseSet CaseSet::load(const std::string& path) {
    return from_json(io::read_file(path));
}

RetrievalIndex RetrievalIndex::build(const Corpus& corpus,
                                     const std::string& default_law_code) {
    RetrievalIndex idx;
    idx.corpus_ = &corpus;
    for (const auto& c : corpus.cases()) {
        for (const auto& aid : cited_articles_of(c, default_law_code))
            idx.postings_[aid].push_back(c.case_id);
    }
    for (auto& [aid, ids] : idx.postings_) {
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    return idx;
}

const std::vector<std::string>& RetrievalIndex::postings(
    const std::string& article_id) const {
    auto it = postings_.find(article_id);
    return it == postings_.end() ? empty_ : it->second;
}

CaseSet RetrievalIndex::retrieve_d0(const ConceptSpec& spec,
                                    std::vector<std::string>* warnings) const {
    CaseSet out;
    out.concept_id = spec.concept_id;
    out.stage = CaseStage::D0;

    auto it = postings_.find(spec.article_id);
    if (it == postings_.end()) {
        if (warnings)
            warnings->push_back("article " + spec.article_id +
                                " cited by no case; empty D0");
        return out;
    }
    const std::string needle = text::normalize(spec.concept_text);
    for (const auto& id : it->second) {  // postings already ascending
        const CaseJudgment* c = corpus_->find(id);
        if (c && text::contains(c->court_view, needle)) {
            out.case_ids.push_back(id);
            out.provenance[id] = "exact-match:" + spec.article_id;
        }
    }
    return out;
}

}  // namespace atri
