#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atri/corpus.hpp"

namespace atri {

struct SidecarEntry {
    std::string case_id;
    std::string concept_id;
    std::string label;  // "yes" | "no"
    std::string planted_reason;
};

struct SyntheticCorpus {
    std::vector<CaseJudgment> cases;
    std::vector<SidecarEntry> sidecar;

    std::string emit_sidecar() const;  // one JSON object per line
};

struct SyntheticParams {
    std::uint64_t seed = 0;
    size_t n_cases = 0;
    double positive_fraction = 0.5;
};

// Deterministic given (seed, params, concepts). Every case cites exactly one
// concept's article and carries a planted determination reason in its court
// view; the label split follows an exact quota round(positive_fraction * n).
SyntheticCorpus generate_synthetic_corpus(const SyntheticParams& params,
                                          const std::vector<ConceptSpec>& concepts);

std::vector<SidecarEntry> load_sidecar(const std::string& path);

// Discriminative phrases planted in synthetic facts and court views. The
// scripted fixture rules key on these.
inline constexpr const char* kPositiveFeature =
    "供家庭生活使用，与外界相对隔离";
inline constexpr const char* kNegativeFeature =
    "主要用于商业经营，不具备家庭生活功能";

}  // namespace atri
