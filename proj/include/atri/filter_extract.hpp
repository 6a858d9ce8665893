#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atri/corpus.hpp"
#include "atri/gateway.hpp"
#include "atri/prompt.hpp"
#include "atri/retrieval.hpp"

namespace atri {

enum class Verification { verbatim, normalized, failed };

const char* verification_name(Verification v);

struct ReasonRecord {
    std::string case_id;
    std::string concept_id;
    std::string reason;
    std::string label;  // "yes" | "no" | "" while unset
    Verification verification = Verification::failed;
    std::string source = "court_view";

    std::string to_json_line() const;
    static ReasonRecord from_json_line(const std::string& line);
};

std::vector<ReasonRecord> load_reasons(const std::string& path);
void save_reasons(const std::vector<ReasonRecord>& records,
                  const std::string& path);

struct BalanceConfig {
    int ratio_pos = 1;  // target positive:negative ratio
    int ratio_neg = 1;
    std::uint64_t seed = 0;
    std::optional<size_t> max_total;
};

// Extracts the content of the LAST [[...]] marker in a model reply.
// Prompts instruct reasoning before the verdict, so the verdict is terminal.
std::optional<std::string> parse_terminal_marker(const std::string& reply);

// Marker content to a binary label: 是/Yes -> "yes", 否/No -> "no".
std::optional<std::string> marker_to_label(const std::string& marker);

// Sentence-splits `reason` on terminal punctuation and checks each sentence
// against `court_view`: exact first, then whitespace-normalized. Empty
// reason fails.
Verification verify_reason(const std::string& reason,
                           const std::string& court_view);

struct LlmStageResult {
    bool parse_ok = false;
    std::string value;     // "relevant"/"irrelevant" or "yes"/"no"
    std::string raw_text;  // full model reply
};

class FilterExtract {
public:
    FilterExtract(Gateway& gateway, const PromptLibrary& prompts,
                  std::string model_id, int max_tokens = 4096);

    LlmStageResult filter_relevant(const CaseJudgment& c,
                                   const ConceptSpec& spec);
    LlmStageResult classify_label(const CaseJudgment& c,
                                  const ConceptSpec& spec);
    ReasonRecord extract_reason(const CaseJudgment& c,
                                const ConceptSpec& spec);

    struct D1Result {
        CaseSet d1;  // stage = D1
        std::vector<ReasonRecord> reasons;
        std::vector<std::string> diagnostics;  // per-case failure ledger
    };

    // filter_relevant -> classify_label -> extract_reason per case.
    // Per-case failures are ledgered, never aborting. With strict_verification
    // records that fail sentence verification are dropped; otherwise kept
    // and flagged.
    D1Result build_d1(const Corpus& corpus, const CaseSet& d0,
                      const ConceptSpec& spec,
                      bool strict_verification = false);

private:
    LlmRequest make_request(const std::string& prompt) const;

    Gateway& gateway_;
    const PromptLibrary& prompts_;
    std::string model_id_;
    int max_tokens_;
};

struct BalanceResult {
    CaseSet set;  // stage = D_balanced
    std::vector<ReasonRecord> reasons;
    std::vector<std::string> warnings;
};

// Keeps every negative; samples positives without replacement (seeded) down
// to floor(n_neg * ratio_pos / ratio_neg). Cannot up-sample: when positives
// run short they are all kept with a warning.
BalanceResult balance(const CaseSet& d1,
                      const std::vector<ReasonRecord>& reasons,
                      const BalanceConfig& cfg);

}  // namespace atri
