#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace atri {

// Canonical article identifier: "<law-code>:<article-number>",
// e.g. "PRC-CL:264".
struct ArticleId {
    std::string law_code;
    int number = 0;

    std::string str() const { return law_code + ":" + std::to_string(number); }
    static std::optional<ArticleId> parse(const std::string& s);

    auto operator<=>(const ArticleId&) const = default;
};

enum class CitationSource { field, regex };

struct CaseJudgment {
    std::string case_id;
    int year = 0;
    std::string header;
    std::string facts;
    std::string court_view;
    std::string verdict;
    std::string conclusion;
    std::set<std::string> cited_articles;  // canonical article ids
    CitationSource citation_source = CitationSource::field;
};

struct ConceptSpec {
    std::string concept_id;
    std::string concept_text;  // the vague concept c, verbatim
    std::string article_id;    // canonical
    std::string article_text;  // full text of article a

    // throws on invariant violation (concept must occur in article_text
    // after normalization; article_id must parse)
    void validate() const;
};

struct CorpusStats {
    size_t n_cases = 0;
    size_t n_positive = 0;
    size_t n_negative = 0;
    double mean_court_view_len = 0;  // characters (code points)
    double mean_fact_len = 0;
    double mean_reason_len = 0;
};

enum class SchemaMode { strict, lenient };

// Immutable after ingestion; safe for concurrent readers.
class Corpus {
public:
    static Corpus ingest_file(const std::string& path, SchemaMode mode);
    static Corpus ingest_records(const std::vector<CaseJudgment>& records,
                                 SchemaMode mode);

    const std::vector<CaseJudgment>& cases() const { return cases_; }
    const CaseJudgment* find(const std::string& case_id) const;
    const std::vector<std::string>& warnings() const { return warnings_; }

    CorpusStats stats() const;

    // one JSON record per line, field order fixed; re-ingesting the output
    // yields field-identical cases
    std::string emit() const;
    void emit_file(const std::string& path) const;

private:
    std::vector<CaseJudgment> cases_;
    std::map<std::string, size_t> by_id_;
    std::vector<std::string> warnings_;
};

struct SegmentedJudgment {
    CaseJudgment sections;  // case_id/year/cited_articles left empty
    bool unsegmentable = false;
    std::vector<std::string> warnings;
};

// Section delimiters of the raw judgment format.
inline constexpr const char* kHeaderMark = "【首部】";
inline constexpr const char* kFactsMark = "【事实】";
inline constexpr const char* kCourtViewMark = "【本院认为】";
inline constexpr const char* kVerdictMark = "【判决】";
inline constexpr const char* kConclusionMark = "【尾部】";

// Splits raw text on the five delimiter markers. Unsegmentable text lands
// entirely in facts with a warning; a missing trailing marker leaves that
// section empty with a warning. Throws on empty input.
SegmentedJudgment segment_judgment(const std::string& raw_text);

// Inverse of segment_judgment for fully delimited inputs.
std::string join_sections(const CaseJudgment& c);

// Loads a concept file (JSON list) and validates each entry.
std::vector<ConceptSpec> load_concepts(const std::string& path);

// Cited-article lookup with the 第<number>条 regex fallback over the court
// view when the structured field is empty. `default_law_code` names the law
// for fallback hits.
std::set<std::string> cited_articles_of(const CaseJudgment& c,
                                        const std::string& default_law_code,
                                        CitationSource* source_out = nullptr);

// Code-point count of a UTF-8 string.
size_t codepoint_count(const std::string& s);

}  // namespace atri
