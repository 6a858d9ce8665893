#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "atri/corpus.hpp"
#include "atri/filter_extract.hpp"
#include "atri/gateway.hpp"
#include "atri/prompt.hpp"

namespace atri {

enum class InterpSource { atri, direct, judicial, expert };

const char* interp_source_name(InterpSource s);
InterpSource interp_source_from_name(const std::string& s);

struct Interpretation {
    std::string concept_id;
    std::string analysis;
    std::vector<std::string> positive_cases;  // one blurb per case
    std::vector<std::string> negative_cases;
    std::string judicial_discretion;
    std::string raw_text;
    InterpSource source = InterpSource::atri;
    bool structured = false;  // false for externally supplied free text
    bool valid = false;

    struct GenMeta {
        std::string model_id;
        double temperature = 0.9;
        size_t n_reasons_used = 0;
        std::uint64_t seed = 0;
        int attempts = 0;
    } gen_meta;

    std::string to_json() const;
    static Interpretation from_json(const std::string& s);
    void save(const std::string& path) const;
    static Interpretation load(const std::string& path);
};

enum class CaseTextSource { extracted_reason, court_view, fact_and_court_view };

const char* case_source_name(CaseTextSource s);
CaseTextSource case_source_from_name(const std::string& s);

struct GenerationConfig {
    std::optional<size_t> n_reasons;  // nullopt = all
    CaseTextSource case_source = CaseTextSource::extracted_reason;
    std::set<std::string> drop;  // subset of {analysis, examples, positive,
                                 //            negative, discretion}
    double temperature = 0.9;
    std::uint64_t seed = 0;
    int retry_budget = 2;  // re-generation attempts on invalid structure
    int min_example_cases = 5;

    void validate() const;
};

// Parses a model reply into the three interpretation sections by bilingual
// heading match (解析/Analysis, 举例说明/Example Cases, 司法裁量/Judicial
// Discretion; leading ### optional). Slices partition raw_text so
// re-emitting a well-formed parse reproduces it byte for byte.
struct SectionParse {
    bool ok = false;
    std::string preamble;
    std::string analysis_slice;  // heading line included
    std::string examples_slice;
    std::string discretion_slice;
    std::string analysis_text;  // heading stripped
    std::string discretion_text;
    std::vector<std::string> positive_cases;
    std::vector<std::string> negative_cases;
    std::vector<std::string> problems;

    std::string emit() const {
        return preamble + analysis_slice + examples_slice + discretion_slice;
    }
};

SectionParse parse_interpretation_sections(const std::string& raw_text);

class Interpreter {
public:
    Interpreter(Gateway& gateway, const PromptLibrary& prompts,
                std::string model_id, std::string exemplar_text,
                int max_tokens = 8192);

    // Subsamples reasons to cfg.n_reasons with label balance, serializes
    // them as a JSON array of strings in case_id order, and renders the
    // generation template. `corpus` supplies court views / facts for the
    // non-default case sources (may be null for extracted_reason).
    std::string assemble_generation_input(
        const ConceptSpec& spec, const std::vector<ReasonRecord>& reasons,
        const GenerationConfig& cfg, const Corpus* corpus = nullptr);

    Interpretation generate(const ConceptSpec& spec,
                            const std::vector<ReasonRecord>& reasons,
                            const GenerationConfig& cfg,
                            const Corpus* corpus = nullptr);

    Interpretation generate_direct(const ConceptSpec& spec,
                                   const GenerationConfig& cfg);

    static Interpretation load_external(const std::string& path,
                                        InterpSource source);

    // selection used by assemble; exposed for tests
    static std::vector<const ReasonRecord*> subsample_reasons(
        const std::vector<ReasonRecord>& reasons, std::optional<size_t> n,
        std::uint64_t seed);

private:
    Interpretation run_generation(const ConceptSpec& spec,
                                  const std::string& prompt,
                                  const GenerationConfig& cfg,
                                  size_t n_reasons_used);

    Gateway& gateway_;
    const PromptLibrary& prompts_;
    std::string model_id_;
    std::string exemplar_;
    int max_tokens_;
};

}  // namespace atri
