#include "atri/filter_extract.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <random>

#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "atri/text.hpp"

namespace atri {

using json = nlohmann::ordered_json;

const char* verification_name(Verification v) {
    switch (v) {
        case Verification::verbatim: return "verbatim";
        case Verification::normalized: return "normalized";
        case Verification::failed: return "failed";
    }
    return "failed";
}

namespace {
Verification verification_from_name(const std::string& s) {
    if (s == "verbatim") return Verification::verbatim;
    if (s == "normalized") return Verification::normalized;
    return Verification::failed;
}
}  // namespace

std::string ReasonRecord::to_json_line() const {
    json j;
    j["case_id"] = case_id;
    j["concept_id"] = concept_id;
    j["reason"] = reason;
    j["label"] = label;
    j["verification"] = verification_name(verification);
    j["source"] = source;
    return j.dump();
}

ReasonRecord ReasonRecord::from_json_line(const std::string& line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw runtime_error("malformed reason record line");
    ReasonRecord r;
    r.case_id = j.value("case_id", "");
    r.concept_id = j.value("concept_id", "");
    r.reason = j.value("reason", "");
    r.label = j.value("label", "");
    r.verification = verification_from_name(j.value("verification", "failed"));
    r.source = j.value("source", "court_view");
    return r;
}

std::vector<ReasonRecord> load_reasons(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw runtime_error("cannot open reasons file: " + path);
    std::vector<ReasonRecord> out;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) out.push_back(ReasonRecord::from_json_line(line));
    }
    return out;
}

void save_reasons(const std::vector<ReasonRecord>& records,
                  const std::string& path) {
    std::string out;
    for (const auto& r : records) {
        out += r.to_json_line();
        out += '\n';
    }
    io::write_file_atomic(path, out);
}

std::optional<std::string> parse_terminal_marker(const std::string& reply) {
    size_t open = reply.rfind("[[");
    if (open == std::string::npos) return std::nullopt;
    size_t close = reply.find("]]", open + 2);
    if (close == std::string::npos) return std::nullopt;
    return reply.substr(open + 2, close - open - 2);
}

std::optional<std::string> marker_to_label(const std::string& marker) {
    if (marker == "是" || marker == "Yes" || marker == "yes") return "yes";
    if (marker == "否" || marker == "No" || marker == "no") return "no";
    return std::nullopt;
}

Verification verify_reason(const std::string& reason,
                           const std::string& court_view) {
    auto sentences = text::split_sentences(reason);
    if (sentences.empty()) return Verification::failed;
    bool all_verbatim = true;
    const std::string stripped_view = text::strip_whitespace(court_view);
    for (const auto& s : sentences) {
        if (text::contains(court_view, s)) continue;
        all_verbatim = false;
        if (!text::contains(stripped_view, text::strip_whitespace(s)))
            return Verification::failed;
    }
    return all_verbatim ? Verification::verbatim : Verification::normalized;
}

FilterExtract::FilterExtract(Gateway& gateway, const PromptLibrary& prompts,
                             std::string model_id, int max_tokens)
    : gateway_(gateway),
      prompts_(prompts),
      model_id_(std::move(model_id)),
      max_tokens_(max_tokens) {}

LlmRequest FilterExtract::make_request(const std::string& prompt) const {
    LlmRequest req;
    req.model_id = model_id_;
    req.prompt = prompt;
    req.temperature = 0.0;
    req.rep_index = 0;
    req.max_tokens = max_tokens_;
    return req;
}

LlmStageResult FilterExtract::filter_relevant(const CaseJudgment& c,
                                              const ConceptSpec& spec) {
    auto prompt = prompts_.get("filter_has_reason")
                      .render({{"article", spec.article_text},
                               {"concept", spec.concept_text},
                               {"court view", c.court_view}});
    auto resp = gateway_.complete(make_request(prompt));
    LlmStageResult res;
    res.raw_text = resp.text;
    auto marker = parse_terminal_marker(resp.text);
    auto label = marker ? marker_to_label(*marker) : std::nullopt;
    if (label) {
        res.parse_ok = true;
        res.value = (*label == "yes") ? "relevant" : "irrelevant";
    }
    return res;
}

LlmStageResult FilterExtract::classify_label(const CaseJudgment& c,
                                             const ConceptSpec& spec) {
    auto prompt = prompts_.get("classify_label")
                      .render({{"article", spec.article_text},
                               {"concept", spec.concept_text},
                               {"court view", c.court_view}});
    auto resp = gateway_.complete(make_request(prompt));
    LlmStageResult res;
    res.raw_text = resp.text;
    auto marker = parse_terminal_marker(resp.text);
    auto label = marker ? marker_to_label(*marker) : std::nullopt;
    if (label) {
        res.parse_ok = true;
        res.value = *label;
    }
    return res;
}

ReasonRecord FilterExtract::extract_reason(const CaseJudgment& c,
                                           const ConceptSpec& spec) {
    auto prompt = prompts_.get("extract_reason")
                      .render({{"article", spec.article_text},
                               {"concept", spec.concept_text},
                               {"court view", c.court_view}});
    auto resp = gateway_.complete(make_request(prompt));
    ReasonRecord r;
    r.case_id = c.case_id;
    r.concept_id = spec.concept_id;
    r.reason = resp.text;
    r.verification = verify_reason(r.reason, c.court_view);
    return r;
}

FilterExtract::D1Result FilterExtract::build_d1(const Corpus& corpus,
                                                const CaseSet& d0,
                                                const ConceptSpec& spec,
                                                bool strict_verification) {
    if (d0.stage != CaseStage::D0)
        throw runtime_error("build_d1: input set is not stage D0");
    D1Result out;
    out.d1.concept_id = spec.concept_id;
    out.d1.stage = CaseStage::D1;

    for (const auto& id : d0.case_ids) {
        const CaseJudgment* c = corpus.find(id);
        if (!c) {
            out.diagnostics.push_back(id + ": not found in corpus");
            continue;
        }
        try {
            auto rel = filter_relevant(*c, spec);
            if (!rel.parse_ok) {
                out.diagnostics.push_back(id + ": parse_failed (filter)");
                continue;
            }
            if (rel.value != "relevant") continue;

            auto lab = classify_label(*c, spec);
            if (!lab.parse_ok) {
                out.diagnostics.push_back(id + ": parse_failed (classify)");
                continue;
            }
            ReasonRecord rec = extract_reason(*c, spec);
            rec.label = lab.value;
            if (rec.verification == Verification::failed) {
                if (strict_verification) {
                    out.diagnostics.push_back(
                        id + ": verification failed, dropped (strict)");
                    continue;
                }
                out.diagnostics.push_back(id +
                                          ": verification failed, kept");
            }
            out.d1.case_ids.push_back(id);
            out.d1.provenance[id] = "filtered";
            out.reasons.push_back(std::move(rec));
        } catch (const std::exception& e) {
            out.diagnostics.push_back(id + ": " + e.what());
        }
    }
    return out;
}

BalanceResult balance(const CaseSet& d1,
                      const std::vector<ReasonRecord>& reasons,
                      const BalanceConfig& cfg) {
    if (cfg.ratio_pos < 1 || cfg.ratio_neg < 1)
        throw config_error("balance: ratio terms must be >= 1");

    std::map<std::string, const ReasonRecord*> by_id;
    for (const auto& r : reasons) by_id[r.case_id] = &r;

    std::vector<std::string> pos, neg;
    for (const auto& id : d1.case_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) continue;
        if (it->second->label == "yes")
            pos.push_back(id);
        else if (it->second->label == "no")
            neg.push_back(id);
    }

    BalanceResult out;
    out.set.concept_id = d1.concept_id;
    out.set.stage = CaseStage::D_balanced;

    if (neg.empty()) {
        out.set.case_ids = d1.case_ids;
        out.set.stage = CaseStage::D_balanced;
        out.warnings.push_back("no negative cases; set returned unchanged");
        for (const auto& id : out.set.case_ids)
            if (by_id.count(id)) out.reasons.push_back(*by_id[id]);
        return out;
    }

    size_t target_pos =
        (neg.size() * static_cast<size_t>(cfg.ratio_pos)) /
        static_cast<size_t>(cfg.ratio_neg);
    std::vector<std::string> kept_pos;
    if (pos.size() <= target_pos) {
        kept_pos = pos;
        if (pos.size() < target_pos)
            out.warnings.push_back(
                "cannot up-sample positives: have " +
                std::to_string(pos.size()) + ", target " +
                std::to_string(target_pos));
    } else {
        // seeded Fisher-Yates, then truncate; std::shuffle is not
        // reproducible across standard libraries
        std::mt19937_64 rng(cfg.seed);
        std::vector<std::string> pool = pos;
        for (size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[rng() % i]);
        pool.resize(target_pos);
        kept_pos = std::move(pool);
    }

    std::vector<std::string> ids;
    ids.insert(ids.end(), kept_pos.begin(), kept_pos.end());
    ids.insert(ids.end(), neg.begin(), neg.end());
    std::sort(ids.begin(), ids.end());
    if (cfg.max_total && ids.size() > *cfg.max_total) ids.resize(*cfg.max_total);
    out.set.case_ids = std::move(ids);
    for (const auto& id : out.set.case_ids)
        out.reasons.push_back(*by_id.at(id));
    return out;
}

}  // namespace atri
