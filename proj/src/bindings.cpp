#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "atri/bench.hpp"
#include "atri/corpus.hpp"
#include "atri/digest.hpp"
#include "atri/filter_extract.hpp"
#include "atri/prompt.hpp"
#include "atri/retrieval.hpp"
#include "atri/synthetic.hpp"
#include "atri/text.hpp"

namespace py = pybind11;
using namespace atri;

namespace {

py::dict segment_to_dict(const std::string& raw) {
    auto seg = segment_judgment(raw);
    py::dict d;
    d["header"] = seg.sections.header;
    d["facts"] = seg.sections.facts;
    d["court_view"] = seg.sections.court_view;
    d["verdict"] = seg.sections.verdict;
    d["conclusion"] = seg.sections.conclusion;
    d["unsegmentable"] = seg.unsegmentable;
    d["warnings"] = seg.warnings;
    return d;
}

py::dict metrics_from_labels(const std::vector<std::string>& pred_labels,
                             const std::vector<std::string>& golds) {
    std::vector<EntailmentPrediction> preds;
    preds.reserve(pred_labels.size());
    for (const auto& l : pred_labels) {
        EntailmentPrediction p;
        p.label = l;
        preds.push_back(std::move(p));
    }
    auto m = compute_metrics(preds, golds);
    py::dict d;
    d["acc"] = m.acc;
    d["ma_p"] = m.ma_p;
    d["ma_r"] = m.ma_r;
    d["ma_f"] = m.ma_f;
    d["n_yes"] = m.n_yes;
    d["n_no"] = m.n_no;
    d["n_invalid"] = m.n_invalid;
    return d;
}

py::tuple generate_synthetic(const std::string& concepts_path,
                             std::uint64_t seed, size_t n_cases,
                             double positive_fraction) {
    auto concepts = load_concepts(concepts_path);
    SyntheticParams p{seed, n_cases, positive_fraction};
    auto syn = generate_synthetic_corpus(p, concepts);
    Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
    return py::make_tuple(corpus.emit(), syn.emit_sidecar());
}

std::vector<std::string> retrieve_d0_ids(const std::string& corpus_path,
                                         const std::string& concepts_path,
                                         const std::string& concept_id) {
    Corpus corpus = Corpus::ingest_file(corpus_path, SchemaMode::strict);
    auto concepts = load_concepts(concepts_path);
    auto index = RetrievalIndex::build(corpus);
    for (const auto& spec : concepts)
        if (spec.concept_id == concept_id)
            return index.retrieve_d0(spec).case_ids;
    throw std::invalid_argument("unknown concept id: " + concept_id);
}

std::string render_prompt(const std::string& assets_dir,
                          const std::string& lang,
                          const std::string& template_id,
                          const std::map<std::string, std::string>& bindings) {
    PromptLibrary lib(assets_dir, lang);
    return lib.get(template_id).render(bindings);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "vague-concept interpretation pipeline core";

    m.def("normalize", [](const std::string& s) { return text::normalize(s); });
    m.def("split_sentences",
          [](const std::string& s) { return text::split_sentences(s); });
    m.def("strip_whitespace",
          [](const std::string& s) { return text::strip_whitespace(s); });
    m.def("parse_cjk_number",
          [](const std::string& s) { return text::parse_cjk_number(s); });
    m.def("sha256_hex", [](const std::string& s) { return sha256_hex(s); });

    m.def("segment_judgment", &segment_to_dict);
    m.def("majority_label", &majority_label);
    m.def("entailment_metrics", &metrics_from_labels);
    m.def("parse_terminal_marker", [](const std::string& reply) {
        return parse_terminal_marker(reply);
    });
    m.def("verify_reason",
          [](const std::string& reason, const std::string& court_view) {
              return std::string(
                  verification_name(verify_reason(reason, court_view)));
          });

    m.def("generate_synthetic", &generate_synthetic, py::arg("concepts_path"),
          py::arg("seed"), py::arg("n_cases"), py::arg("positive_fraction"));
    m.def("retrieve_d0", &retrieve_d0_ids, py::arg("corpus_path"),
          py::arg("concepts_path"), py::arg("concept_id"));
    m.def("render_prompt", &render_prompt, py::arg("assets_dir"),
          py::arg("lang"), py::arg("template_id"), py::arg("bindings"));
}
