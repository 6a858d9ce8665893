#include "atri/bench.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "atri/digest.hpp"
#include "atri/errors.hpp"
#include "atri/io.hpp"

namespace atri {

using json = nlohmann::ordered_json;

std::string EntailmentExample::to_json_line() const {
    json j;
    j["case_id"] = case_id;
    j["concept_id"] = concept_id;
    j["fact"] = fact;
    j["gold_label"] = gold_label;
    j["gold_reason"] = gold_reason;
    return j.dump();
}

EntailmentExample EntailmentExample::from_json_line(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw runtime_error("malformed test-set line");
    EntailmentExample e;
    e.case_id = j.value("case_id", "");
    e.concept_id = j.value("concept_id", "");
    e.fact = j.value("fact", "");
    e.gold_label = j.value("gold_label", "");
    e.gold_reason = j.value("gold_reason", "");
    if (e.fact.empty()) throw runtime_error("test example with empty fact");
    return e;
}

std::vector<EntailmentExample> load_test_set(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw runtime_error("cannot open test set: " + path);
    std::vector<EntailmentExample> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) out.push_back(EntailmentExample::from_json_line(line));
    return out;
}

void save_test_set(const std::vector<EntailmentExample>& examples,
                   const std::string& path) {
    std::string out;
    for (const auto& e : examples) {
        out += e.to_json_line();
        out += '\n';
    }
    io::write_file_atomic(path, out);
}

const char* method_name(PredictMethod m) {
    switch (m) {
        case PredictMethod::random: return "random";
        case PredictMethod::zero_shot: return "zero_shot";
        case PredictMethod::cot: return "cot";
        case PredictMethod::with_interpretation: return "with_interpretation";
    }
    return "random";
}

PredictMethod method_from_name(const std::string& s) {
    if (s == "random") return PredictMethod::random;
    if (s == "zero_shot") return PredictMethod::zero_shot;
    if (s == "cot") return PredictMethod::cot;
    if (s == "with_interpretation" || s == "atri" || s == "direct" ||
        s == "judicial" || s == "expert")
        return PredictMethod::with_interpretation;
    throw config_error("unknown prediction method: " + s);
}

std::string majority_label(const std::vector<std::string>& votes) {
    size_t yes = 0, no = 0;
    for (const auto& v : votes) {
        if (v == "yes") ++yes;
        else if (v == "no") ++no;
    }
    if (yes > no) return "yes";
    if (no > yes) return "no";
    return "invalid";
}

MethodMetrics compute_metrics(const std::vector<EntailmentPrediction>& preds,
                              const std::vector<std::string>& golds) {
    if (preds.size() != golds.size())
        throw runtime_error("compute_metrics: length mismatch");
    MethodMetrics m;
    m.n_examples = preds.size();
    if (preds.empty()) return m;

    size_t correct = 0;
    // confusion counts for the two classes
    std::map<std::string, size_t> tp, pred_n, gold_n;
    double cs_sum = 0, cs_scored_sum = 0;
    size_t cs_n = 0;
    for (size_t i = 0; i < preds.size(); ++i) {
        const auto& label = preds[i].label;
        if (label == "yes") ++m.n_yes;
        else if (label == "no") ++m.n_no;
        else ++m.n_invalid;
        ++gold_n[golds[i]];
        if (label == "yes" || label == "no") ++pred_n[label];
        if (label == golds[i]) {
            ++correct;
            ++tp[label];
        }
        if (preds[i].consistency) {
            cs_sum += *preds[i].consistency;
            ++cs_n;
            if (*preds[i].consistency > 0)
                cs_scored_sum += *preds[i].consistency;
        }
    }
    m.acc = static_cast<double>(correct) / static_cast<double>(preds.size());

    double p_sum = 0, r_sum = 0, f_sum = 0;
    for (const std::string cls : {"yes", "no"}) {
        double p = pred_n[cls] ? static_cast<double>(tp[cls]) / pred_n[cls] : 0;
        double r = gold_n[cls] ? static_cast<double>(tp[cls]) / gold_n[cls] : 0;
        double f = (p + r > 0) ? 2 * p * r / (p + r) : 0;
        p_sum += p;
        r_sum += r;
        f_sum += f;
    }
    m.ma_p = p_sum / 2;
    m.ma_r = r_sum / 2;
    m.ma_f = f_sum / 2;

    m.n_scored = cs_n;
    if (cs_n) m.mean_cs_with_zeros = cs_sum / static_cast<double>(cs_n);
    size_t nonzero = 0;
    for (const auto& p : preds)
        if (p.consistency && *p.consistency > 0) ++nonzero;
    if (nonzero)
        m.mean_cs_scored_only = cs_scored_sum / static_cast<double>(nonzero);
    return m;
}

namespace {

json metrics_to_json(const MethodMetrics& m) {
    return json{{"acc", m.acc},
                {"ma_p", m.ma_p},
                {"ma_r", m.ma_r},
                {"ma_f", m.ma_f},
                {"cs", m.mean_cs_with_zeros},
                {"cs_scored_only", m.mean_cs_scored_only},
                {"n_scored", m.n_scored},
                {"n_yes", m.n_yes},
                {"n_no", m.n_no},
                {"n_invalid", m.n_invalid},
                {"n_examples", m.n_examples}};
}

MethodMetrics metrics_from_json(const json& j) {
    MethodMetrics m;
    m.acc = j.value("acc", 0.0);
    m.ma_p = j.value("ma_p", 0.0);
    m.ma_r = j.value("ma_r", 0.0);
    m.ma_f = j.value("ma_f", 0.0);
    m.mean_cs_with_zeros = j.value("cs", 0.0);
    m.mean_cs_scored_only = j.value("cs_scored_only", 0.0);
    m.n_scored = j.value("n_scored", 0u);
    m.n_yes = j.value("n_yes", 0u);
    m.n_no = j.value("n_no", 0u);
    m.n_invalid = j.value("n_invalid", 0u);
    m.n_examples = j.value("n_examples", 0u);
    return m;
}

}  // namespace

std::string BenchReport::to_json() const {
    json j;
    j["schema"] = "atri-bench-report/1";
    j["manifest_digest"] = manifest_digest;
    j["config"] = config_echo;
    j["overall"] = json::object();
    for (const auto& [method, m] : overall)
        j["overall"][method] = metrics_to_json(m);
    j["per_concept"] = json::object();
    for (const auto& [cid, methods] : per_concept) {
        j["per_concept"][cid] = json::object();
        for (const auto& [method, m] : methods)
            j["per_concept"][cid][method] = metrics_to_json(m);
    }
    return j.dump(2) + "\n";
}

BenchReport BenchReport::from_json(const std::string& s) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw runtime_error("malformed report JSON");
    BenchReport r;
    r.manifest_digest = j.value("manifest_digest", "");
    if (j.contains("config")) r.config_echo = j["config"];
    const json overall = j.value("overall", json::object());
    for (auto& [method, m] : overall.items())
        r.overall[method] = metrics_from_json(m);
    const json per_concept = j.value("per_concept", json::object());
    for (auto& [cid, methods] : per_concept.items())
        for (auto& [method, m] : methods.items())
            r.per_concept[cid][method] = metrics_from_json(m);
    return r;
}

std::vector<EntailmentExample> build_test_set(
    const Corpus& corpus, const RetrievalIndex& index, const ConceptSpec& spec,
    FilterExtract& fx, const CaseSet& exclusions,
    std::vector<std::string>* warnings) {
    std::set<std::string> excluded(exclusions.case_ids.begin(),
                                   exclusions.case_ids.end());
    auto d0 = index.retrieve_d0(spec, warnings);
    auto d1 = fx.build_d1(corpus, d0, spec, /*strict_verification=*/true);

    std::vector<EntailmentExample> out;
    for (size_t i = 0; i < d1.d1.case_ids.size(); ++i) {
        const auto& id = d1.d1.case_ids[i];
        if (excluded.count(id)) continue;
        const CaseJudgment* c = corpus.find(id);
        const ReasonRecord& rec = d1.reasons[i];
        EntailmentExample e;
        e.case_id = id;
        e.concept_id = spec.concept_id;
        e.fact = c->facts;
        e.gold_label = rec.label;
        e.gold_reason = rec.reason;
        out.push_back(std::move(e));
    }
    if (out.empty() && warnings)
        warnings->push_back("test set empty for " + spec.concept_id);
    return out;
}

EntailmentBench::EntailmentBench(Gateway& gateway,
                                 const PromptLibrary& prompts,
                                 std::string predict_model,
                                 std::string judge_model, int n_reps,
                                 std::uint64_t seed, int max_tokens)
    : gateway_(gateway),
      prompts_(prompts),
      predict_model_(std::move(predict_model)),
      judge_model_(std::move(judge_model)),
      n_reps_(n_reps),
      seed_(seed),
      max_tokens_(max_tokens) {}

namespace {

// stable per-example RNG: seed mixed with the case id
std::mt19937_64 example_rng(std::uint64_t seed, const std::string& case_id,
                            const std::string& salt) {
    auto h = sha256_hex(std::to_string(seed) + "|" + case_id + "|" + salt);
    return std::mt19937_64(std::stoull(h.substr(0, 15), nullptr, 16));
}

// full response minus the terminal verdict marker
std::string strip_terminal_marker(const std::string& reply) {
    size_t open = reply.rfind("[[");
    if (open == std::string::npos) return reply;
    size_t close = reply.find("]]", open + 2);
    if (close == std::string::npos) return reply;
    std::string out = reply.substr(0, open) + reply.substr(close + 2);
    while (!out.empty() && (out.back() == '\n' || out.back() == ' ' ||
                            out.back() == '\r'))
        out.pop_back();
    return out;
}

}  // namespace

EntailmentPrediction EntailmentBench::predict_one(
    const EntailmentExample& example, PredictMethod method,
    const ConceptSpec& spec, const Interpretation* interpretation,
    std::string method_label) {
    EntailmentPrediction pred;
    pred.case_id = example.case_id;
    pred.method =
        method_label.empty() ? method_name(method) : std::move(method_label);

    if (method == PredictMethod::random) {
        auto rng = example_rng(seed_, example.case_id, "random");
        pred.label = (rng() % 2 == 0) ? "yes" : "no";
        pred.votes.assign(static_cast<size_t>(n_reps_), pred.label);
        return pred;
    }

    std::map<std::string, std::string> bindings = {
        {"article", spec.article_text},
        {"concept", spec.concept_text},
        {"fact", example.fact}};
    std::string template_id;
    switch (method) {
        case PredictMethod::zero_shot: template_id = "entailment_zero_shot"; break;
        case PredictMethod::cot: template_id = "entailment_cot"; break;
        case PredictMethod::with_interpretation:
            if (!interpretation)
                throw runtime_error(
                    "with_interpretation requires an interpretation");
            template_id = "entailment_with_interpretation";
            bindings["interpretation"] = interpretation->raw_text;
            break;
        default: break;
    }
    std::string prompt = prompts_.get(template_id).render(bindings);

    std::vector<LlmRequest> reqs;
    for (int rep = 0; rep < n_reps_; ++rep) {
        LlmRequest req;
        req.model_id = predict_model_;
        req.prompt = prompt;
        req.temperature = 0.0;  // prediction runs at temperature 0
        req.rep_index = rep;
        req.max_tokens = max_tokens_;
        reqs.push_back(std::move(req));
    }
    auto resps = gateway_.complete_batch(reqs, n_reps_);

    std::vector<std::string> texts;
    for (const auto& r : resps) {
        auto marker = parse_terminal_marker(r.text);
        auto label = marker ? marker_to_label(*marker) : std::nullopt;
        pred.votes.push_back(label ? *label : "invalid");
        texts.push_back(r.text);
    }
    pred.label = majority_label(pred.votes);
    if (pred.label != "invalid") {
        std::vector<size_t> matching;
        for (size_t i = 0; i < pred.votes.size(); ++i)
            if (pred.votes[i] == pred.label) matching.push_back(i);
        auto rng = example_rng(seed_, example.case_id, "reason");
        size_t chosen = matching[rng() % matching.size()];
        pred.reason = strip_terminal_marker(texts[chosen]);
    }
    return pred;
}

void EntailmentBench::score_consistency(EntailmentPrediction& pred,
                                        const EntailmentExample& example,
                                        const ConceptSpec& spec) {
    if (pred.label == "invalid") {
        pred.consistency = 0;
        return;
    }
    if (pred.label != example.gold_label) {
        pred.consistency = 0;  // wrong label: no judge call
        return;
    }
    std::string prompt =
        prompts_.get("consistency_judge")
            .render({{"crime", spec.article_id},
                     {"concept", spec.concept_text},
                     {"generated reason", pred.reason},
                     {"gold reason", example.gold_reason}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        LlmRequest req;
        req.model_id = judge_model_;
        req.prompt = prompt;
        req.temperature = 0.0;
        req.rep_index = attempt;
        req.max_tokens = max_tokens_;
        auto resp = gateway_.complete(req);
        ++pred.judge_calls;
        auto marker = parse_terminal_marker(resp.text);
        if (marker) {
            try {
                int n = std::stoi(*marker);
                if (n >= 1 && n <= 10) {
                    pred.consistency = n;
                    return;
                }
            } catch (...) {
            }
        }
    }
    pred.consistency = std::nullopt;  // unscored
}

EntailmentBench::RunResult EntailmentBench::run(
    const std::vector<EntailmentExample>& examples,
    const std::map<std::string, ConceptSpec>& specs, const RunConfig& cfg) {
    RunResult out;
    for (const auto& mspec : cfg.methods) {
        const PredictMethod method = mspec.method;
        std::string label = mspec.label;
        if (label.empty()) {
            label = method_name(method);
            if (method == PredictMethod::with_interpretation &&
                !mspec.interps.empty() && mspec.interps.begin()->second)
                label = std::string("with_interpretation_") +
                        interp_source_name(
                            mspec.interps.begin()->second->source);
        }

        std::vector<EntailmentPrediction> preds;
        std::vector<std::string> golds;
        std::vector<std::string> concepts;
        for (const auto& ex : examples) {
            auto sit = specs.find(ex.concept_id);
            if (sit == specs.end()) {
                out.failures.push_back(ex.case_id + ": unknown concept " +
                                       ex.concept_id);
                continue;
            }
            const Interpretation* interp = nullptr;
            if (method == PredictMethod::with_interpretation) {
                auto iit = mspec.interps.find(ex.concept_id);
                if (iit == mspec.interps.end() || !iit->second) {
                    out.failures.push_back(ex.case_id + " [" + label +
                                           "]: no interpretation for concept " +
                                           ex.concept_id);
                    continue;
                }
                interp = iit->second;
            }
            try {
                auto pred = predict_one(ex, method, sit->second, interp, label);
                if (cfg.score_cs && method != PredictMethod::random)
                    score_consistency(pred, ex, sit->second);
                preds.push_back(std::move(pred));
                golds.push_back(ex.gold_label);
                concepts.push_back(ex.concept_id);
            } catch (const std::exception& e) {
                out.failures.push_back(ex.case_id + " [" + label +
                                       "]: " + e.what());
            }
        }
        out.report.overall[label] = compute_metrics(preds, golds);

        // per-concept rows
        std::map<std::string, std::vector<EntailmentPrediction>> by_concept;
        std::map<std::string, std::vector<std::string>> by_concept_gold;
        for (size_t i = 0; i < preds.size(); ++i) {
            const auto& cid = concepts[i];
            by_concept[cid].push_back(preds[i]);
            by_concept_gold[cid].push_back(golds[i]);
        }
        for (const auto& [cid, cpreds] : by_concept)
            out.report.per_concept[cid][label] =
                compute_metrics(cpreds, by_concept_gold[cid]);

        out.ledger.insert(out.ledger.end(), preds.begin(), preds.end());
    }
    return out;
}

}  // namespace atri
