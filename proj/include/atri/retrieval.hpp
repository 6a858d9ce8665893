#pragma once

#include <map>
#include <string>
#include <vector>

#include "atri/corpus.hpp"

namespace atri {

enum class CaseStage { D0, D1, D_balanced, test };

const char* stage_name(CaseStage s);
CaseStage stage_from_name(const std::string& s);

struct CaseSet {
    std::string concept_id;
    CaseStage stage = CaseStage::D0;
    std::vector<std::string> case_ids;  // ordered, no duplicates
    std::map<std::string, std::string> provenance;  // case_id -> origin note

    std::string to_json() const;
    static CaseSet from_json(const std::string& s);
    void save(const std::string& path) const;
    static CaseSet load(const std::string& path);
};

// Immutable after build; retrieval calls are pure.
class RetrievalIndex {
public:
    // Postings complete over cited_articles (with the regex fallback for
    // cases whose structured field is absent).
    static RetrievalIndex build(const Corpus& corpus,
                                const std::string& default_law_code = "PRC-CL");

    const std::vector<std::string>& postings(const std::string& article_id) const;
    const Corpus& corpus() const { return *corpus_; }

    // Cases that cite spec.article_id AND whose court view contains
    // spec.concept verbatim (after normalization). Ascending case_id order.
    // Unknown article_id yields an empty set with a warning in `warnings`.
    CaseSet retrieve_d0(const ConceptSpec& spec,
                        std::vector<std::string>* warnings = nullptr) const;

private:
    const Corpus* corpus_ = nullptr;
    std::map<std::string, std::vector<std::string>> postings_;
    std::vector<std::string> empty_;
};

}  // namespace atri
