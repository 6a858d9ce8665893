#include "atri/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <random>

#include "atri/errors.hpp"
#include "atri/io.hpp"

namespace atri {

using json = nlohmann::ordered_json;

namespace {

const char* kPositivePlaces[] = {"住宅", "家庭院落", "租住的房屋",
                                 "农家小院", "封闭的私人住所"};
const char* kNegativePlaces[] = {"商铺", "营业厅", "办公楼", "仓库",
                                 "临街门面"};
const char* kSurnames[] = {"张某", "李某", "王某", "刘某", "陈某",
                           "杨某", "赵某", "黄某", "周某", "吴某"};

// avoids the unspecified behavior of std::uniform_int_distribution so output
// bytes are identical across standard libraries
size_t pick(std::mt19937_64& rng, size_t n) { return rng() % n; }

}  // namespace

SyntheticCorpus generate_synthetic_corpus(
    const SyntheticParams& params, const std::vector<ConceptSpec>& concepts) {
    if (concepts.empty())
        throw config_error("generate_synthetic_corpus: empty concept list");
    if (params.n_cases < 1)
        throw config_error("generate_synthetic_corpus: n_cases must be >= 1");
    if (params.positive_fraction < 0 || params.positive_fraction > 1)
        throw config_error(
            "generate_synthetic_corpus: positive_fraction outside [0,1]");

    const size_t n = params.n_cases;
    const size_t n_pos = static_cast<size_t>(
        std::lround(params.positive_fraction * static_cast<double>(n)));

    // exact label quota, shuffled deterministically
    std::vector<bool> positive(n, false);
    for (size_t i = 0; i < n_pos; ++i) positive[i] = true;
    std::mt19937_64 rng(params.seed);
    for (size_t i = n; i > 1; --i) {
        size_t j = pick(rng, i);
        std::swap(positive[i - 1], positive[j]);
    }

    SyntheticCorpus out;
    out.cases.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        const ConceptSpec& spec = concepts[i % concepts.size()];
        const bool pos = positive[i];
        const char* place = pos ? kPositivePlaces[pick(rng, 5)]
                                : kNegativePlaces[pick(rng, 5)];
        const char* name = kSurnames[pick(rng, 10)];
        const char* feature = pos ? kPositiveFeature : kNegativeFeature;
        const int year = 1990 + static_cast<int>(pick(rng, 31));

        CaseJudgment c;
        c.case_id = "SYN-" + std::to_string(params.seed) + "-" +
                    std::to_string(i);
        c.year = year;
        c.header = "某某人民法院刑事判决书（" + std::to_string(year) +
                   "）刑初字第" + std::to_string(i + 1) + "号";
        c.facts = std::string("经审理查明，被告人") + name + "于" +
                  std::to_string(year) + "年进入" + place +
                  "实施了相关行为。该" + place + feature + "。";
        std::string reason = std::string("经查，该") + place + feature +
                             "，" + (pos ? "应当认定为" : "不应认定为") +
                             "“" + spec.concept_text + "”。";
        c.court_view = std::string("本院认为，被告人") + name +
                       "的行为已构成犯罪，其行为涉及“" + spec.concept_text +
                       "”的认定。" + reason;
        c.verdict = std::string("判决如下：被告人") + name +
                    "罪名成立，判处有期徒刑" +
                    std::to_string(1 + pick(rng, 5)) + "年。";
        c.conclusion =
            "如不服本判决，可在接到判决书的第二日起十日内提出上诉。";
        c.cited_articles.insert(spec.article_id);
        out.cases.push_back(std::move(c));

        SidecarEntry gt;
        gt.case_id = out.cases.back().case_id;
        gt.concept_id = spec.concept_id;
        gt.label = pos ? "yes" : "no";
        gt.planted_reason = reason;
        out.sidecar.push_back(std::move(gt));
    }
    return out;
}

std::string SyntheticCorpus::emit_sidecar() const {
    std::string out;
    for (const auto& e : sidecar) {
        json j;
        j["case_id"] = e.case_id;
        j["concept_id"] = e.concept_id;
        j["label"] = e.label;
        j["planted_reason"] = e.planted_reason;
        out += j.dump();
        out += '\n';
    }
    return out;
}

std::vector<SidecarEntry> load_sidecar(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw runtime_error("cannot open sidecar file: " + path);
    std::vector<SidecarEntry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw runtime_error("malformed sidecar line in " + path);
        SidecarEntry e;
        e.case_id = j.value("case_id", "");
        e.concept_id = j.value("concept_id", "");
        e.label = j.value("label", "");
        e.planted_reason = j.value("planted_reason", "");
        out.push_back(std::move(e));
    }
    return out;
}

}  // namespace atri
