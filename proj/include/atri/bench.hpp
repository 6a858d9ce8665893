#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "atri/corpus.hpp"
#include "atri/filter_extract.hpp"
#include "atri/gateway.hpp"
#include "atri/interpreter.hpp"
#include "atri/prompt.hpp"
#include "atri/retrieval.hpp"

namespace atri {

struct EntailmentExample {
    std::string case_id;
    std::string concept_id;
    std::string fact;        // task input
    std::string gold_label;  // "yes" | "no"
    std::string gold_reason;

    std::string to_json_line() const;
    static EntailmentExample from_json_line(const std::string& line);
};

std::vector<EntailmentExample> load_test_set(const std::string& path);
void save_test_set(const std::vector<EntailmentExample>& examples,
                   const std::string& path);

enum class PredictMethod { random, zero_shot, cot, with_interpretation };

const char* method_name(PredictMethod m);
PredictMethod method_from_name(const std::string& s);

struct EntailmentPrediction {
    std::string case_id;
    std::string method;  // method name; with_interpretation carries source
    std::vector<std::string> votes;  // "yes" | "no" | "invalid"
    std::string label = "invalid";
    std::string reason;
    std::optional<int> consistency;  // 0..10; nullopt = unscored
    int judge_calls = 0;
};

// Strict majority of valid votes; any tie (possible once a vote is invalid)
// maps to "invalid". Permutation-invariant.
std::string majority_label(const std::vector<std::string>& votes);

struct MethodMetrics {
    double acc = 0, ma_p = 0, ma_r = 0, ma_f = 0;
    double mean_cs_with_zeros = 0;    // headline CS
    double mean_cs_scored_only = 0;
    size_t n_scored = 0;
    size_t n_yes = 0, n_no = 0, n_invalid = 0;
    size_t n_examples = 0;
};

// accuracy = correct/total (invalid counts wrong); per-class P/R/F over
// {yes,no} with 0-denominator -> 0; macro = unweighted class mean.
MethodMetrics compute_metrics(const std::vector<EntailmentPrediction>& preds,
                              const std::vector<std::string>& golds);

struct BenchReport {
    std::map<std::string, MethodMetrics> overall;  // method -> metrics
    std::map<std::string, std::map<std::string, MethodMetrics>> per_concept;
    std::string manifest_digest;
    nlohmann::json config_echo;

    std::string to_json() const;
    static BenchReport from_json(const std::string& s);
};

// Builds gold test examples by rerunning retrieval + strict filtering, then
// removing every case consumed for interpretation generation. Gold label and
// reason come from the court view; the example exposes only the facts.
std::vector<EntailmentExample> build_test_set(
    const Corpus& corpus, const RetrievalIndex& index, const ConceptSpec& spec,
    FilterExtract& fx, const CaseSet& exclusions,
    std::vector<std::string>* warnings = nullptr);

class EntailmentBench {
public:
    EntailmentBench(Gateway& gateway, const PromptLibrary& prompts,
                    std::string predict_model, std::string judge_model,
                    int n_reps = 3, std::uint64_t seed = 0,
                    int max_tokens = 4096);

    EntailmentPrediction predict_one(const EntailmentExample& example,
                                     PredictMethod method,
                                     const ConceptSpec& spec,
                                     const Interpretation* interpretation,
                                     std::string method_label = "");

    // 0 without any judge call when the label is wrong; otherwise the judge
    // model scores r̂ against r at temperature 0 ([[n]], 1<=n<=10, one retry).
    void score_consistency(EntailmentPrediction& pred,
                           const EntailmentExample& example,
                           const ConceptSpec& spec);

    struct MethodSpec {
        PredictMethod method;
        // concept_id -> interpretation; only consulted for
        // with_interpretation
        std::map<std::string, const Interpretation*> interps;
        std::string label;  // optional override of the report row name
    };

    struct RunConfig {
        std::vector<MethodSpec> methods;
        bool score_cs = true;
        int parallelism = 1;
    };

    struct RunResult {
        BenchReport report;
        std::vector<EntailmentPrediction> ledger;  // method-major order
        std::vector<std::string> failures;
    };

    RunResult run(const std::vector<EntailmentExample>& examples,
                  const std::map<std::string, ConceptSpec>& specs,
                  const RunConfig& cfg);

private:
    Gateway& gateway_;
    const PromptLibrary& prompts_;
    std::string predict_model_;
    std::string judge_model_;
    int n_reps_;
    std::uint64_t seed_;
    int max_tokens_;
};

}  // namespace atri
