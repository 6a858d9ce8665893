#include "atri/corpus.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <regex>
#include <sstream>

#include "atri/errors.hpp"
#include "atri/io.hpp"
#include "atri/text.hpp"

namespace atri {

using json = nlohmann::ordered_json;

std::optional<ArticleId> ArticleId::parse(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= s.size())
        return std::nullopt;
    ArticleId id;
    id.law_code = s.substr(0, colon);
    for (char c : id.law_code)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
              c == '_'))
            return std::nullopt;
    const std::string num = s.substr(colon + 1);
    for (char c : num)
        if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    try {
        id.number = std::stoi(num);
    } catch (...) {
        return std::nullopt;
    }
    if (id.number <= 0) return std::nullopt;
    return id;
}

void ConceptSpec::validate() const {
    if (concept_id.empty()) throw config_error("concept_id empty");
    if (concept_text.empty())
        throw config_error("concept empty for " + concept_id);
    if (!ArticleId::parse(article_id))
        throw config_error("bad article_id '" + article_id + "' for " +
                           concept_id);
    if (!text::contains(text::normalize(article_text),
                        text::normalize(concept_text)))
        throw config_error("concept '" + concept_text +
                           "' does not occur in article_text of " +
                           concept_id);
}

size_t codepoint_count(const std::string& s) {
    size_t i = 0, n = 0;
    while (i < s.size()) {
        text::decode_utf8(s, i);
        ++n;
    }
    return n;
}

namespace {

std::string get_str(const json& j, const char* field, size_t line) {
    auto it = j.find(field);
    if (it == j.end() || !it->is_string())
        throw runtime_error("line " + std::to_string(line) +
                            ": missing or non-string field '" + field + "'");
    return text::normalize(it->get<std::string>());
}

CaseJudgment parse_record(const json& j, size_t line) {
    CaseJudgment c;
    c.case_id = get_str(j, "case_id", line);
    if (c.case_id.empty())
        throw runtime_error("line " + std::to_string(line) +
                            ": empty case_id");
    auto yit = j.find("year");
    if (yit == j.end() || !yit->is_number_integer())
        throw runtime_error("line " + std::to_string(line) +
                            ": missing or non-integer field 'year'");
    c.year = yit->get<int>();
    c.header = get_str(j, "header", line);
    c.facts = get_str(j, "facts", line);
    c.court_view = get_str(j, "court_view", line);
    c.verdict = get_str(j, "verdict", line);
    c.conclusion = get_str(j, "conclusion", line);
    // facts / court_view / verdict are required nonempty; header and
    // conclusion may be empty
    for (auto [name, val] : {std::pair<const char*, const std::string*>{
                                 "facts", &c.facts},
                             {"court_view", &c.court_view},
                             {"verdict", &c.verdict}}) {
        if (val->empty())
            throw runtime_error("line " + std::to_string(line) +
                                ": missing required section '" + name + "'");
    }
    auto ait = j.find("cited_articles");
    if (ait == j.end() || !ait->is_array())
        throw runtime_error("line " + std::to_string(line) +
                            ": missing field 'cited_articles'");
    for (const auto& a : *ait) {
        if (!a.is_string())
            throw runtime_error("line " + std::to_string(line) +
                                ": non-string cited_articles entry");
        std::string s = text::normalize(a.get<std::string>());
        if (!ArticleId::parse(s))
            throw runtime_error("line " + std::to_string(line) +
                                ": bad article id '" + s +
                                "' in cited_articles");
        c.cited_articles.insert(std::move(s));
    }
    return c;
}

}  // namespace

Corpus Corpus::ingest_records(const std::vector<CaseJudgment>& records,
                              SchemaMode mode) {
    Corpus corpus;
    for (const auto& c : records) {
        auto [it, inserted] =
            corpus.by_id_.try_emplace(c.case_id, corpus.cases_.size());
        if (!inserted) {
            if (mode == SchemaMode::strict)
                throw runtime_error("duplicate case_id: " + c.case_id);
            corpus.warnings_.push_back("duplicate case_id (last wins): " +
                                       c.case_id);
            corpus.cases_[it->second] = c;
            continue;
        }
        corpus.cases_.push_back(c);
        if (c.year != 0 && (c.year < 1985 || c.year > 2021))
            corpus.warnings_.push_back("case " + c.case_id + ": year " +
                                       std::to_string(c.year) +
                                       " outside 1985-2021");
    }
    return corpus;
}

Corpus Corpus::ingest_file(const std::string& path, SchemaMode mode) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw runtime_error("cannot open corpus file: " + path);
    std::vector<CaseJudgment> records;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw runtime_error("line " + std::to_string(lineno) +
                                ": malformed JSON record");
        records.push_back(parse_record(j, lineno));
    }
    return ingest_records(records, mode);
}

const CaseJudgment* Corpus::find(const std::string& case_id) const {
    auto it = by_id_.find(case_id);
    return it == by_id_.end() ? nullptr : &cases_[it->second];
}

CorpusStats Corpus::stats() const {
    CorpusStats s;
    s.n_cases = cases_.size();
    double cv = 0, fl = 0;
    for (const auto& c : cases_) {
        cv += static_cast<double>(codepoint_count(c.court_view));
        fl += static_cast<double>(codepoint_count(c.facts));
    }
    if (!cases_.empty()) {
        s.mean_court_view_len = cv / static_cast<double>(cases_.size());
        s.mean_fact_len = fl / static_cast<double>(cases_.size());
    }
    return s;
}

std::string Corpus::emit() const {
    std::string out;
    for (const auto& c : cases_) {
        json j;
        j["case_id"] = c.case_id;
        j["year"] = c.year;
        j["header"] = c.header;
        j["facts"] = c.facts;
        j["court_view"] = c.court_view;
        j["verdict"] = c.verdict;
        j["conclusion"] = c.conclusion;
        j["cited_articles"] = c.cited_articles;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void Corpus::emit_file(const std::string& path) const {
    io::write_file_atomic(path, emit());
}

namespace {

// position of `mark` in `s` at or after `from`, npos if absent
size_t find_mark(const std::string& s, const char* mark, size_t from) {
    return s.find(mark, from);
}

}  // namespace

SegmentedJudgment segment_judgment(const std::string& raw_text) {
    if (raw_text.empty()) throw runtime_error("segment_judgment: empty input");
    const std::string raw = text::normalize(raw_text);
    SegmentedJudgment out;

    struct Slot {
        const char* mark;
        std::string* target;
        bool required;
    };
    Slot slots[] = {
        {kHeaderMark, &out.sections.header, false},
        {kFactsMark, &out.sections.facts, true},
        {kCourtViewMark, &out.sections.court_view, true},
        {kVerdictMark, &out.sections.verdict, true},
        {kConclusionMark, &out.sections.conclusion, false},
    };

    // locate markers in order; a marker is only accepted after the previous
    // one so shuffled text falls through to the unsegmentable path
    size_t pos[5];
    size_t cursor = 0;
    bool any = false;
    for (int i = 0; i < 5; ++i) {
        pos[i] = find_mark(raw, slots[i].mark, cursor);
        if (pos[i] != std::string::npos) {
            cursor = pos[i];
            any = true;
        }
    }
    if (!any || pos[1] == std::string::npos ||
        pos[2] == std::string::npos) {
        out.sections.facts = raw;
        out.unsegmentable = true;
        out.warnings.push_back("no section delimiters found; raw text "
                               "placed in facts");
        return out;
    }
    for (int i = 0; i < 5; ++i) {
        if (pos[i] == std::string::npos) {
            out.warnings.push_back(std::string("missing delimiter ") +
                                   slots[i].mark + "; section left empty");
            continue;
        }
        size_t start = pos[i] + std::string(slots[i].mark).size();
        size_t end = raw.size();
        for (int k = i + 1; k < 5; ++k) {
            if (pos[k] != std::string::npos) {
                end = pos[k];
                break;
            }
        }
        *slots[i].target = raw.substr(start, end - start);
    }
    return out;
}

std::string join_sections(const CaseJudgment& c) {
    std::string out;
    out += kHeaderMark;
    out += c.header;
    out += kFactsMark;
    out += c.facts;
    out += kCourtViewMark;
    out += c.court_view;
    out += kVerdictMark;
    out += c.verdict;
    out += kConclusionMark;
    out += c.conclusion;
    return out;
}

std::vector<ConceptSpec> load_concepts(const std::string& path) {
    json j = json::parse(io::read_file(path), nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw config_error("concept file is not a JSON array: " + path);
    std::vector<ConceptSpec> out;
    for (const auto& e : j) {
        ConceptSpec spec;
        spec.concept_id = text::normalize(e.value("concept_id", ""));
        spec.concept_text = text::normalize(e.value("concept", ""));
        spec.article_id = text::normalize(e.value("article_id", ""));
        spec.article_text = text::normalize(e.value("article_text", ""));
        spec.validate();
        out.push_back(std::move(spec));
    }
    return out;
}

std::set<std::string> cited_articles_of(const CaseJudgment& c,
                                        const std::string& default_law_code,
                                        CitationSource* source_out) {
    if (!c.cited_articles.empty()) {
        if (source_out) *source_out = CitationSource::field;
        return c.cited_articles;
    }
    if (source_out) *source_out = CitationSource::regex;
    std::set<std::string> out;
    // scan court view for 第<number>条
    const std::string& cv = c.court_view;
    size_t i = 0;
    const std::string kDi = "第";
    const std::string kTiao = "条";
    while ((i = cv.find(kDi, i)) != std::string::npos) {
        size_t numStart = i + kDi.size();
        size_t end = cv.find(kTiao, numStart);
        if (end == std::string::npos) break;
        // keep the window small so unrelated 第…条 spans don't match
        if (end - numStart <= 30) {
            long n = text::parse_cjk_number(
                cv.substr(numStart, end - numStart));
            if (n > 0)
                out.insert(default_law_code + ":" + std::to_string(n));
        }
        i = numStart;
    }
    return out;
}

}  // namespace atri
