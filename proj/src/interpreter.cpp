#include "atri/interpreter.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <random>

#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "atri/text.hpp"

namespace atri {

using json = nlohmann::ordered_json;

const char* interp_source_name(InterpSource s) {
    switch (s) {
        case InterpSource::atri: return "atri";
        case InterpSource::direct: return "direct";
        case InterpSource::judicial: return "judicial";
        case InterpSource::expert: return "expert";
    }
    return "atri";
}

InterpSource interp_source_from_name(const std::string& s) {
    if (s == "atri") return InterpSource::atri;
    if (s == "direct") return InterpSource::direct;
    if (s == "judicial") return InterpSource::judicial;
    if (s == "expert") return InterpSource::expert;
    throw runtime_error("unknown interpretation source: " + s);
}

const char* case_source_name(CaseTextSource s) {
    switch (s) {
        case CaseTextSource::extracted_reason: return "extracted_reason";
        case CaseTextSource::court_view: return "court_view";
        case CaseTextSource::fact_and_court_view: return "fact_and_court_view";
    }
    return "extracted_reason";
}

CaseTextSource case_source_from_name(const std::string& s) {
    if (s == "extracted_reason") return CaseTextSource::extracted_reason;
    if (s == "court_view") return CaseTextSource::court_view;
    if (s == "fact_and_court_view") return CaseTextSource::fact_and_court_view;
    throw config_error("unknown case source: " + s);
}

void GenerationConfig::validate() const {
    static const std::set<std::string> allowed = {
        "analysis", "examples", "positive", "negative", "discretion"};
    for (const auto& d : drop)
        if (!allowed.count(d))
            throw config_error("unknown drop component: " + d);
    if (n_reasons && *n_reasons < 1)
        throw config_error("n_reasons must be >= 1 or 'all'");
}

std::string Interpretation::to_json() const {
    json j;
    j["concept_id"] = concept_id;
    j["source"] = interp_source_name(source);
    j["structured"] = structured;
    j["valid"] = valid;
    j["analysis"] = analysis;
    j["positive_cases"] = positive_cases;
    j["negative_cases"] = negative_cases;
    j["judicial_discretion"] = judicial_discretion;
    j["raw_text"] = raw_text;
    j["gen_meta"] = {{"model_id", gen_meta.model_id},
                     {"temperature", gen_meta.temperature},
                     {"n_reasons_used", gen_meta.n_reasons_used},
                     {"seed", gen_meta.seed},
                     {"attempts", gen_meta.attempts}};
    return j.dump(2) + "\n";
}

Interpretation Interpretation::from_json(const std::string& s) {
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw runtime_error("malformed interpretation JSON");
    Interpretation e;
    e.concept_id = j.value("concept_id", "");
    e.source = interp_source_from_name(j.value("source", "atri"));
    e.structured = j.value("structured", false);
    e.valid = j.value("valid", false);
    e.analysis = j.value("analysis", "");
    for (const auto& c : j.value("positive_cases", json::array()))
        e.positive_cases.push_back(c.get<std::string>());
    for (const auto& c : j.value("negative_cases", json::array()))
        e.negative_cases.push_back(c.get<std::string>());
    e.judicial_discretion = j.value("judicial_discretion", "");
    e.raw_text = j.value("raw_text", "");
    if (j.contains("gen_meta")) {
        const auto& m = j["gen_meta"];
        e.gen_meta.model_id = m.value("model_id", "");
        e.gen_meta.temperature = m.value("temperature", 0.9);
        e.gen_meta.n_reasons_used = m.value("n_reasons_used", 0u);
        e.gen_meta.seed = m.value("seed", std::uint64_t{0});
        e.gen_meta.attempts = m.value("attempts", 0);
    }
    return e;
}

void Interpretation::save(const std::string& path) const {
    io::write_file_atomic(path, to_json());
}

Interpretation Interpretation::load(const std::string& path) {
    return from_json(io::read_file(path));
}

namespace {

struct Heading {
    size_t pos = std::string::npos;
    size_t line_end = 0;  // offset past the heading's line (incl. newline)
};

// first occurrence of any of `needles` at a line start, heading line may be
// decorated with leading ### and whitespace
Heading find_heading(const std::string& s,
                     const std::vector<std::string>& needles, size_t from) {
    Heading best;
    for (const auto& n : needles) {
        size_t p = from;
        while ((p = s.find(n, p)) != std::string::npos) {
            // verify only ###, whitespace precede it on the line
            size_t ls = s.rfind('\n', p);
            ls = (ls == std::string::npos) ? 0 : ls + 1;
            bool clean = true;
            for (size_t k = ls; k < p; ++k) {
                char c = s[k];
                if (c != '#' && c != ' ' && c != '\t') {
                    clean = false;
                    break;
                }
            }
            if (clean) {
                if (ls < best.pos) {
                    best.pos = ls;
                    size_t le = s.find('\n', p);
                    best.line_end =
                        (le == std::string::npos) ? s.size() : le + 1;
                }
                break;
            }
            p += n.size();
        }
    }
    return best;
}

size_t count_occurrences(const std::string& s, const std::string& needle) {
    size_t count = 0, p = 0;
    while ((p = s.find(needle, p)) != std::string::npos) {
        ++count;
        p += needle.size();
    }
    return count;
}

// splits a span into blurbs on the per-case marker
std::vector<std::string> split_blurbs(const std::string& span,
                                      const std::vector<std::string>& marks) {
    // description sub-bullets reuse the case mark prefix; skip them
    static const std::vector<std::string> kNotCaseMarks = {"**案例说明",
                                                           "**Case Description"};
    std::vector<size_t> starts;
    for (const auto& m : marks) {
        size_t p = 0;
        while ((p = span.find(m, p)) != std::string::npos) {
            bool excluded = false;
            for (const auto& x : kNotCaseMarks)
                if (span.compare(p, x.size(), x) == 0) excluded = true;
            if (!excluded) starts.push_back(p);
            p += m.size();
        }
    }
    std::sort(starts.begin(), starts.end());
    std::vector<std::string> out;
    for (size_t i = 0; i < starts.size(); ++i) {
        size_t end = (i + 1 < starts.size()) ? starts[i + 1] : span.size();
        out.push_back(span.substr(starts[i], end - starts[i]));
    }
    return out;
}

}  // namespace

SectionParse parse_interpretation_sections(const std::string& raw_text) {
    SectionParse out;
    const std::vector<std::string> kAnalysis = {"解析", "Analysis"};
    const std::vector<std::string> kExamples = {"举例说明", "Example Cases"};
    const std::vector<std::string> kDiscretion = {"司法裁量",
                                                  "Judicial Discretion"};

    Heading ha = find_heading(raw_text, kAnalysis, 0);
    if (ha.pos == std::string::npos) {
        out.problems.push_back("missing Analysis heading");
        return out;
    }
    Heading he = find_heading(raw_text, kExamples, ha.line_end);
    if (he.pos == std::string::npos) {
        out.problems.push_back("missing Example Cases heading");
        return out;
    }
    Heading hd = find_heading(raw_text, kDiscretion, he.line_end);
    if (hd.pos == std::string::npos) {
        out.problems.push_back("missing Judicial Discretion heading");
        return out;
    }

    out.preamble = raw_text.substr(0, ha.pos);
    out.analysis_slice = raw_text.substr(ha.pos, he.pos - ha.pos);
    out.examples_slice = raw_text.substr(he.pos, hd.pos - he.pos);
    out.discretion_slice = raw_text.substr(hd.pos);

    out.analysis_text = raw_text.substr(ha.line_end, he.pos - ha.line_end);
    out.discretion_text = raw_text.substr(hd.line_end);

    // positive span runs from the 符合/meet list header to the
    // 不符合/do-not-meet header
    const std::string& ex = out.examples_slice;
    size_t neg_start = ex.find("**不符合");
    if (neg_start == std::string::npos)
        neg_start = ex.find("do not meet the definition");
    size_t pos_start = ex.find("**符合");
    if (pos_start == std::string::npos) {
        size_t p = ex.find("meet the definition");
        if (p != std::string::npos &&
            (neg_start == std::string::npos || p < neg_start))
            pos_start = p;
    }
    if (pos_start == std::string::npos || neg_start == std::string::npos ||
        pos_start >= neg_start) {
        out.problems.push_back("example-case lists not found");
        return out;
    }
    const std::vector<std::string> kCaseMarks = {"**案例", "**Case "};
    out.positive_cases = split_blurbs(
        ex.substr(pos_start, neg_start - pos_start), kCaseMarks);
    out.negative_cases = split_blurbs(ex.substr(neg_start), kCaseMarks);

    // each heading exactly once over the whole text
    for (const auto& needles :
         {kAnalysis, kExamples, kDiscretion}) {
        size_t total = 0;
        for (const auto& n : needles) {
            size_t p = 0;
            while ((p = raw_text.find(n, p)) != std::string::npos) {
                size_t ls = raw_text.rfind('\n', p);
                ls = (ls == std::string::npos) ? 0 : ls + 1;
                bool clean = true;
                for (size_t k = ls; k < p; ++k)
                    if (raw_text[k] != '#' && raw_text[k] != ' ' &&
                        raw_text[k] != '\t') {
                        clean = false;
                        break;
                    }
                if (clean) ++total;
                p += n.size();
            }
        }
        if (total != 1) {
            out.problems.push_back("heading not unique");
            return out;
        }
    }

    out.ok = true;
    return out;
}

Interpreter::Interpreter(Gateway& gateway, const PromptLibrary& prompts,
                         std::string model_id, std::string exemplar_text,
                         int max_tokens)
    : gateway_(gateway),
      prompts_(prompts),
      model_id_(std::move(model_id)),
      exemplar_(std::move(exemplar_text)),
      max_tokens_(max_tokens) {}

std::vector<const ReasonRecord*> Interpreter::subsample_reasons(
    const std::vector<ReasonRecord>& reasons, std::optional<size_t> n,
    std::uint64_t seed) {
    std::vector<const ReasonRecord*> pos, neg;
    for (const auto& r : reasons)
        (r.label == "yes" ? pos : neg).push_back(&r);

    auto by_id = [](const ReasonRecord* a, const ReasonRecord* b) {
        return a->case_id < b->case_id;
    };
    std::sort(pos.begin(), pos.end(), by_id);
    std::sort(neg.begin(), neg.end(), by_id);

    std::vector<const ReasonRecord*> picked;
    if (!n || *n >= reasons.size()) {
        picked.insert(picked.end(), pos.begin(), pos.end());
        picked.insert(picked.end(), neg.begin(), neg.end());
    } else {
        // equal split where possible, remainder to positives, shortfall on
        // one side backfilled from the other
        size_t want = *n;
        size_t want_pos = (want + 1) / 2;
        size_t want_neg = want / 2;
        if (pos.size() < want_pos) {
            want_neg += want_pos - pos.size();
            want_pos = pos.size();
        }
        if (neg.size() < want_neg) {
            want_pos = std::min(pos.size(), want_pos + want_neg - neg.size());
            want_neg = neg.size();
        }
        std::mt19937_64 rng(seed);
        auto take = [&](std::vector<const ReasonRecord*>& side, size_t k) {
            for (size_t i = side.size(); i > 1; --i)
                std::swap(side[i - 1], side[rng() % i]);
            side.resize(std::min(k, side.size()));
        };
        take(pos, want_pos);
        take(neg, want_neg);
        picked.insert(picked.end(), pos.begin(), pos.end());
        picked.insert(picked.end(), neg.begin(), neg.end());
    }
    std::sort(picked.begin(), picked.end(), by_id);
    return picked;
}

std::string Interpreter::assemble_generation_input(
    const ConceptSpec& spec, const std::vector<ReasonRecord>& reasons,
    const GenerationConfig& cfg, const Corpus* corpus) {
    cfg.validate();
    if (reasons.empty())
        throw runtime_error("assemble_generation_input: empty reason set");

    auto picked = subsample_reasons(reasons, cfg.n_reasons, cfg.seed);

    json arr = json::array();
    for (const auto* r : picked) {
        switch (cfg.case_source) {
            case CaseTextSource::extracted_reason:
                arr.push_back(r->reason);
                break;
            case CaseTextSource::court_view: {
                if (!corpus)
                    throw runtime_error("case_source=court_view needs corpus");
                const CaseJudgment* c = corpus->find(r->case_id);
                if (!c) throw runtime_error("case not found: " + r->case_id);
                arr.push_back(c->court_view);
                break;
            }
            case CaseTextSource::fact_and_court_view: {
                if (!corpus)
                    throw runtime_error(
                        "case_source=fact_and_court_view needs corpus");
                const CaseJudgment* c = corpus->find(r->case_id);
                if (!c) throw runtime_error("case not found: " + r->case_id);
                // facts are summarized first; the court view rides along
                auto summary_prompt =
                    prompts_.get("summarize_facts").render({{"fact", c->facts}});
                LlmRequest sreq;
                sreq.model_id = model_id_;
                sreq.prompt = summary_prompt;
                sreq.temperature = 0.0;
                sreq.max_tokens = max_tokens_;
                auto sresp = gateway_.complete(sreq);
                arr.push_back(sresp.text + "\n" + c->court_view);
                break;
            }
        }
    }

    std::string prompt =
        prompts_.get("generate_interpretation")
            .render({{"article", spec.article_text},
                     {"concept", spec.concept_text},
                     {"reasons", arr.dump()},
                     {"Interpretation Example", exemplar_}});

    // ablation instructions ride after the template body
    static const std::map<std::string, std::string> kDropNote = {
        {"analysis", "请在输出中省略“解析”部分的内容，仅保留标题。"},
        {"examples", "请在输出中省略“举例说明”部分的具体案例，仅保留标题。"},
        {"positive", "请在“举例说明”部分省略符合定义的案例。"},
        {"negative", "请在“举例说明”部分省略不符合定义的案例。"},
        {"discretion", "请在输出中省略“司法裁量”部分的内容，仅保留标题。"}};
    for (const auto& d : cfg.drop) prompt += "\n" + kDropNote.at(d);
    return prompt;
}

Interpretation Interpreter::run_generation(const ConceptSpec& spec,
                                           const std::string& prompt,
                                           const GenerationConfig& cfg,
                                           size_t n_reasons_used) {
    Interpretation best;
    best.concept_id = spec.concept_id;
    best.gen_meta.model_id = model_id_;
    best.gen_meta.temperature = cfg.temperature;
    best.gen_meta.n_reasons_used = n_reasons_used;
    best.gen_meta.seed = cfg.seed;

    for (int attempt = 0; attempt <= cfg.retry_budget; ++attempt) {
        LlmRequest req;
        req.model_id = model_id_;
        req.prompt = prompt;
        req.temperature = cfg.temperature;
        req.rep_index = attempt;  // fresh sample per retry
        req.max_tokens = max_tokens_;
        auto resp = gateway_.complete(req);

        auto parse = parse_interpretation_sections(resp.text);
        best.raw_text = resp.text;
        best.gen_meta.attempts = attempt + 1;
        best.structured = parse.ok;
        if (parse.ok) {
            best.analysis = parse.analysis_text;
            best.positive_cases = parse.positive_cases;
            best.negative_cases = parse.negative_cases;
            best.judicial_discretion = parse.discretion_text;

            bool counts_ok = true;
            if (!cfg.drop.count("examples")) {
                if (!cfg.drop.count("positive") &&
                    best.positive_cases.size() <
                        static_cast<size_t>(cfg.min_example_cases))
                    counts_ok = false;
                if (!cfg.drop.count("negative") &&
                    best.negative_cases.size() <
                        static_cast<size_t>(cfg.min_example_cases))
                    counts_ok = false;
            }
            bool sections_ok =
                (cfg.drop.count("analysis") || !best.analysis.empty()) &&
                (cfg.drop.count("discretion") ||
                 !best.judicial_discretion.empty());
            if (counts_ok && sections_ok) {
                best.valid = true;
                return best;
            }
        }
    }
    best.valid = false;  // best-effort parse, flagged
    return best;
}

Interpretation Interpreter::generate(const ConceptSpec& spec,
                                     const std::vector<ReasonRecord>& reasons,
                                     const GenerationConfig& cfg,
                                     const Corpus* corpus) {
    auto prompt = assemble_generation_input(spec, reasons, cfg, corpus);
    auto picked = subsample_reasons(reasons, cfg.n_reasons, cfg.seed);
    auto interp = run_generation(spec, prompt, cfg, picked.size());
    interp.source = InterpSource::atri;
    return interp;
}

Interpretation Interpreter::generate_direct(const ConceptSpec& spec,
                                            const GenerationConfig& cfg) {
    cfg.validate();
    std::string prompt =
        prompts_.get("generate_interpretation")
            .render({{"article", spec.article_text},
                     {"concept", spec.concept_text},
                     {"reasons", "[]"},
                     {"Interpretation Example", exemplar_}});
    auto interp = run_generation(spec, prompt, cfg, 0);
    interp.source = InterpSource::direct;
    return interp;
}

Interpretation Interpreter::load_external(const std::string& path,
                                          InterpSource source) {
    if (source != InterpSource::judicial && source != InterpSource::expert)
        throw config_error("external interpretations are judicial or expert");
    std::string content = io::read_file(path);
    if (content.empty())
        throw runtime_error("external interpretation file is empty: " + path);
    Interpretation e;
    e.raw_text = text::normalize(content);
    e.source = source;
    e.structured = false;
    e.valid = true;
    return e;
}

}  // namespace atri
