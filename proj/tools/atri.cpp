// atri: pipeline driver. Subcommands: ingest | generate-synthetic | retrieve
// | filter | interpret | bench | report. Exit codes: 0 ok, 1 runtime, 2
// usage, 3 config, 4 provider.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "atri/bench.hpp"
#include "atri/corpus.hpp"
#include "atri/digest.hpp"
#include "atri/errors.hpp"
#include "atri/filter_extract.hpp"
#include "atri/gateway.hpp"
#include "atri/interpreter.hpp"
#include "atri/io.hpp"
#include "atri/manifest.hpp"
#include "atri/prompt.hpp"
#include "atri/report.hpp"
#include "atri/retrieval.hpp"
#include "atri/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace atri;

namespace {

// Applies config-file values to options the user did not pass on the command
// line. Flags always win.
struct ConfigBinder {
    std::vector<std::pair<CLI::Option*, std::function<void(const json&)>>>
        binds;

    template <typename T>
    void bind(CLI::Option* opt, const std::string& key, T& target) {
        binds.emplace_back(opt, [key, &target](const json& cfg) {
            if (cfg.contains(key)) target = cfg.at(key).get<T>();
        });
    }

    void apply(const json& cfg) {
        for (auto& [opt, fn] : binds)
            if (opt->count() == 0) fn(cfg);
    }
};

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(
        std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string join_argv(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

struct GatewayOpts {
    std::string cache_dir = "cache";
    std::string fixture;  // empty -> <assets>/fixtures/synthetic_rules.json
    bool live = false;
    std::string base_url;
    std::string model = "fixture-model";
    std::string judge_model = "fixture-model";
    int parallelism = 4;

    void add_to(CLI::App* cmd, ConfigBinder& b, bool with_judge = false) {
        b.bind(cmd->add_option("--cache-dir", cache_dir,
                               "LLM response cache directory"),
               "cache_dir", cache_dir);
        b.bind(cmd->add_option("--fixture", fixture,
                               "scripted fixture rules file (offline runs)"),
               "fixture", fixture);
        b.bind(cmd->add_flag("--live", live,
                             "use the HTTP provider (default is offline)"),
               "live", live);
        b.bind(cmd->add_option("--base-url", base_url, "provider base URL"),
               "base_url", base_url);
        b.bind(cmd->add_option("--model", model, "model id"), "model", model);
        if (with_judge)
            b.bind(cmd->add_option("--judge-model", judge_model,
                                   "consistency judge model id"),
                   "judge_model", judge_model);
        b.bind(cmd->add_option("--parallelism", parallelism,
                               "max in-flight LLM requests"),
               "parallelism", parallelism);
    }

    std::shared_ptr<Gateway> make(const std::string& assets_dir) const {
        GatewayConfig gc;
        gc.cache_dir = cache_dir;
        gc.live = live;
        gc.base_url = base_url;
        gc.fixture_file =
            !fixture.empty()
                ? fs::path(fixture)
                : fs::path(assets_dir) / "fixtures" / "synthetic_rules.json";
        return make_gateway(gc);
    }
};

struct Ctx {
    std::string command_line;
    std::string config_path;
    json config = json::object();
    std::string assets_dir = "assets";
    std::string lang = "zh";

    RunManifest manifest() const {
        RunManifest m;
        m.command_line = command_line;
        m.config_digest =
            config_path.empty() ? "" : sha256_file(config_path);
        m.started_at = now_iso();
        return m;
    }

    void add_prompt_digests(RunManifest& m) const {
        fs::path dir = fs::path(assets_dir) / "prompts" / lang;
        for (const auto& id : PromptLibrary::known_template_ids()) {
            fs::path p = dir / (id + ".txt");
            if (fs::exists(p)) m.prompt_digests[id] = sha256_file(p.string());
        }
    }

    PromptLibrary prompts() const { return PromptLibrary(assets_dir, lang); }
};

void finish_manifest(RunManifest& m, const Gateway* gw,
                     const std::string& out_path) {
    if (gw) {
        m.cache_hits = gw->stats().cache_hits.load();
        m.cache_misses = gw->stats().cache_misses.load();
        m.transport_calls = gw->stats().transport_calls.load();
    }
    m.finished_at = now_iso();
    m.save(out_path + ".manifest.json");
}

// Artifacts reference the run they came from.
void save_caseset(const CaseSet& cs, const std::string& path,
                  const std::string& manifest_digest) {
    json j = json::parse(cs.to_json());
    j["manifest_digest"] = manifest_digest;
    io::write_file_atomic(path, j.dump(2) + "\n");
}

std::map<std::string, ConceptSpec> concept_map(
    const std::vector<ConceptSpec>& concepts) {
    std::map<std::string, ConceptSpec> m;
    for (const auto& c : concepts) m[c.concept_id] = c;
    return m;
}

const ConceptSpec& pick_concept(const std::map<std::string, ConceptSpec>& m,
                                const std::string& id) {
    auto it = m.find(id);
    if (it == m.end())
        throw config_error("unknown concept id: " + id);
    return it->second;
}

// ---- subcommand handlers ----

struct IngestCmd {
    std::string in, out;
    std::string mode = "strict";
    bool stats = false;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("ingest",
                                  "validate and normalize a case corpus");
        app->add_option("--in", in, "input JSONL corpus")->required();
        app->add_option("--out", out, "normalized output JSONL")->required();
        binder.bind(app->add_option("--mode", mode, "strict|lenient"), "mode",
                    mode);
        app->add_flag("--stats", stats, "print corpus statistics");
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        SchemaMode sm;
        if (mode == "strict")
            sm = SchemaMode::strict;
        else if (mode == "lenient")
            sm = SchemaMode::lenient;
        else
            throw config_error("bad --mode: " + mode);
        Corpus corpus = Corpus::ingest_file(in, sm);
        print_warnings(corpus.warnings());
        corpus.emit_file(out);
        m.corpus_digest = sha256_file(out);
        if (stats) {
            auto s = corpus.stats();
            json j{{"n_cases", s.n_cases},
                   {"mean_court_view_len", s.mean_court_view_len},
                   {"mean_fact_len", s.mean_fact_len}};
            std::cout << j.dump(2) << "\n";
        }
        finish_manifest(m, nullptr, out);
        return 0;
    }
};

struct SyntheticCmd {
    std::string concepts_path, out, sidecar_out;
    std::uint64_t seed = 0;
    size_t n_cases = 100;
    double positive_fraction = 0.5;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("generate-synthetic",
                                  "emit a deterministic synthetic corpus");
        app->add_option("--concepts", concepts_path, "concept spec file")
            ->required();
        app->add_option("--out", out, "corpus JSONL output")->required();
        app->add_option("--sidecar", sidecar_out,
                        "gold label/reason sidecar JSONL")
            ->required();
        binder.bind(app->add_option("--seed", seed, "RNG seed"), "seed", seed);
        binder.bind(app->add_option("--n-cases", n_cases, "corpus size"),
                    "n_cases", n_cases);
        binder.bind(app->add_option("--positive-fraction", positive_fraction,
                                    "fraction of yes-label cases"),
                    "positive_fraction", positive_fraction);
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        m.seeds["synthetic"] = seed;
        auto concepts = load_concepts(concepts_path);
        SyntheticParams p{seed, n_cases, positive_fraction};
        auto syn = generate_synthetic_corpus(p, concepts);
        Corpus corpus = Corpus::ingest_records(syn.cases, SchemaMode::strict);
        corpus.emit_file(out);
        io::write_file_atomic(sidecar_out, syn.emit_sidecar());
        m.corpus_digest = sha256_file(out);
        finish_manifest(m, nullptr, out);
        return 0;
    }
};

struct RetrieveCmd {
    std::string corpus_path, concepts_path, concept_id, out;
    std::string law_code = "PRC-CL";
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("retrieve",
                                  "exact-match retrieval of candidate cases");
        binder.bind(app->add_option("--corpus", corpus_path, "corpus JSONL"),
                    "corpus", corpus_path);
        binder.bind(
            app->add_option("--concepts", concepts_path, "concept spec file"),
            "concepts", concepts_path);
        app->add_option("--concept", concept_id, "concept id")->required();
        app->add_option("--out", out, "D0 case-set output")->required();
        binder.bind(app->add_option("--law-code", law_code,
                                    "law code for citation fallback"),
                    "law_code", law_code);
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        if (corpus_path.empty() || concepts_path.empty())
            throw config_error("retrieve needs --corpus and --concepts");
        m.corpus_digest = sha256_file(corpus_path);
        Corpus corpus = Corpus::ingest_file(corpus_path, SchemaMode::strict);
        auto specs = concept_map(load_concepts(concepts_path));
        const auto& spec = pick_concept(specs, concept_id);
        auto index = RetrievalIndex::build(corpus, law_code);
        std::vector<std::string> warnings;
        CaseSet d0 = index.retrieve_d0(spec, &warnings);
        print_warnings(warnings);
        save_caseset(d0, out, m.input_digest());
        finish_manifest(m, nullptr, out);
        std::cout << "retrieved " << d0.case_ids.size() << " cases\n";
        return 0;
    }
};

struct FilterCmd {
    std::string corpus_path, concepts_path, concept_id, in, out, reasons_out;
    std::string balance_spec;  // "P:N"
    std::string balanced_out, balanced_reasons_out;
    std::uint64_t seed = 0;
    bool strict_verification = false;
    GatewayOpts gw;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand(
            "filter", "LLM filter, label, and reason extraction over D0");
        binder.bind(app->add_option("--corpus", corpus_path, "corpus JSONL"),
                    "corpus", corpus_path);
        binder.bind(
            app->add_option("--concepts", concepts_path, "concept spec file"),
            "concepts", concepts_path);
        app->add_option("--concept", concept_id, "concept id")->required();
        app->add_option("--in", in, "D0 case-set file")->required();
        app->add_option("--out", out, "D1 case-set output")->required();
        app->add_option("--reasons", reasons_out, "reason records JSONL")
            ->required();
        app->add_option("--balance", balance_spec,
                        "also emit a balanced subset, ratio P:N");
        app->add_option("--balanced-out", balanced_out,
                        "balanced case-set output");
        app->add_option("--balanced-reasons", balanced_reasons_out,
                        "balanced reason records JSONL");
        binder.bind(app->add_option("--seed", seed, "balancing RNG seed"),
                    "seed", seed);
        binder.bind(app->add_flag("--strict-verification", strict_verification,
                                  "drop reasons that fail verification"),
                    "strict_verification", strict_verification);
        gw.add_to(app, binder);
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        if (corpus_path.empty() || concepts_path.empty())
            throw config_error("filter needs --corpus and --concepts");
        m.corpus_digest = sha256_file(corpus_path);
        ctx.add_prompt_digests(m);
        m.seeds["balance"] = seed;
        m.model_ids["filter"] = gw.model;

        Corpus corpus = Corpus::ingest_file(corpus_path, SchemaMode::strict);
        auto specs = concept_map(load_concepts(concepts_path));
        const auto& spec = pick_concept(specs, concept_id);
        CaseSet d0 = CaseSet::load(in);
        auto gateway = gw.make(ctx.assets_dir);
        auto prompts = ctx.prompts();
        FilterExtract fx(*gateway, prompts, gw.model);
        auto r = fx.build_d1(corpus, d0, spec, strict_verification);
        print_warnings(r.diagnostics);
        std::string digest = m.input_digest();
        save_caseset(r.d1, out, digest);
        save_reasons(r.reasons, reasons_out);

        if (!balance_spec.empty()) {
            int p = 0, n = 0;
            if (std::sscanf(balance_spec.c_str(), "%d:%d", &p, &n) != 2 ||
                p <= 0 || n <= 0)
                throw config_error("bad --balance, expected P:N");
            BalanceConfig bc;
            bc.ratio_pos = p;
            bc.ratio_neg = n;
            bc.seed = seed;
            auto br = balance(r.d1, r.reasons, bc);
            print_warnings(br.warnings);
            std::string bout = !balanced_out.empty()
                                   ? balanced_out
                                   : out + ".balanced.json";
            std::string brout = !balanced_reasons_out.empty()
                                    ? balanced_reasons_out
                                    : reasons_out + ".balanced.jsonl";
            save_caseset(br.set, bout, digest);
            save_reasons(br.reasons, brout);
        }
        finish_manifest(m, gateway.get(), out);
        std::cout << "kept " << r.d1.case_ids.size() << " of "
                  << d0.case_ids.size() << " cases\n";
        return 0;
    }
};

struct InterpretCmd {
    std::string concepts_path, concept_id, reasons_path, out;
    std::string corpus_path;
    std::string n_reasons = "all";
    std::string case_source = "extracted_reason";
    std::vector<std::string> drop;
    bool direct = false;
    std::string external_path, external_source;
    std::string exemplar_path;
    double temperature = 0.9;
    std::uint64_t seed = 0;
    int retry_budget = 2;
    GatewayOpts gw;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("interpret",
                                  "generate or import an interpretation");
        binder.bind(
            app->add_option("--concepts", concepts_path, "concept spec file"),
            "concepts", concepts_path);
        app->add_option("--concept", concept_id, "concept id")->required();
        app->add_option("--reasons", reasons_path, "reason records JSONL");
        app->add_option("--out", out, "interpretation JSON output")
            ->required();
        binder.bind(app->add_option("--corpus", corpus_path,
                                    "corpus JSONL (non-default case source)"),
                    "corpus", corpus_path);
        app->add_option("--n-reasons", n_reasons,
                        "how many reasons to use (count or 'all')");
        app->add_option("--case-source", case_source,
                        "extracted_reason|court_view|fact_and_court_view");
        app->add_option("--drop", drop,
                        "sections to drop from the generation instruction")
            ->delimiter(',');
        app->add_flag("--direct", direct,
                      "generate from the bare concept, no reasons");
        app->add_option("--external", external_path,
                        "import an externally written interpretation");
        app->add_option("--source", external_source,
                        "source tag for --external (judicial|expert)");
        binder.bind(app->add_option("--exemplar", exemplar_path,
                                    "one-shot exemplar text file"),
                    "exemplar", exemplar_path);
        binder.bind(app->add_option("--temperature", temperature,
                                    "generation temperature"),
                    "temperature", temperature);
        binder.bind(app->add_option("--seed", seed, "subsampling seed"),
                    "seed", seed);
        binder.bind(
            app->add_option("--retry-budget", retry_budget,
                            "re-generation attempts on invalid structure"),
            "retry_budget", retry_budget);
        gw.add_to(app, binder);
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        if (!external_path.empty()) {
            if (external_source != "judicial" && external_source != "expert")
                throw config_error(
                    "--external needs --source judicial|expert");
            auto interp = Interpreter::load_external(
                external_path, interp_source_from_name(external_source));
            interp.concept_id = concept_id;
            io::write_file_atomic(out, interp.to_json());
            finish_manifest(m, nullptr, out);
            return 0;
        }

        if (concepts_path.empty())
            throw config_error("interpret needs --concepts");
        auto specs = concept_map(load_concepts(concepts_path));
        const auto& spec = pick_concept(specs, concept_id);
        ctx.add_prompt_digests(m);
        m.seeds["interpret"] = seed;
        m.model_ids["interpret"] = gw.model;

        std::string exemplar = io::read_file(
            !exemplar_path.empty()
                ? fs::path(exemplar_path)
                : fs::path(ctx.assets_dir) / "exemplar_e0.txt");
        auto gateway = gw.make(ctx.assets_dir);
        auto prompts = ctx.prompts();
        Interpreter interp(*gateway, prompts, gw.model, exemplar);

        GenerationConfig cfg;
        if (n_reasons != "all") cfg.n_reasons = std::stoul(n_reasons);
        cfg.case_source = case_source_from_name(case_source);
        cfg.drop.insert(drop.begin(), drop.end());
        cfg.temperature = temperature;
        cfg.seed = seed;
        cfg.retry_budget = retry_budget;
        cfg.validate();

        Interpretation result;
        if (direct) {
            result = interp.generate_direct(spec, cfg);
        } else {
            if (reasons_path.empty())
                throw config_error("interpret needs --reasons (or --direct)");
            auto reasons = load_reasons(reasons_path);
            std::unique_ptr<Corpus> corpus;
            if (cfg.case_source != CaseTextSource::extracted_reason) {
                if (corpus_path.empty())
                    throw config_error(
                        "--case-source " + case_source + " needs --corpus");
                corpus = std::make_unique<Corpus>(
                    Corpus::ingest_file(corpus_path, SchemaMode::strict));
                m.corpus_digest = sha256_file(corpus_path);
            }
            result = interp.generate(spec, reasons, cfg, corpus.get());
        }
        io::write_file_atomic(out, result.to_json());
        finish_manifest(m, gateway.get(), out);
        std::cout << (result.valid ? "valid" : "invalid")
                  << " interpretation after " << result.gen_meta.attempts
                  << " attempt(s)\n";
        return result.valid ? 0 : 1;
    }
};

struct BenchCmd {
    bool build = false;
    std::string corpus_path, concepts_path, test_set_path, out;
    std::vector<std::string> exclusions;
    std::vector<std::string> methods{"random"};
    std::vector<std::string> interpretation_paths;
    std::string ledger_out;
    int n_reps = 3;
    std::uint64_t seed = 0;
    bool no_cs = false;
    std::string law_code = "PRC-CL";
    GatewayOpts gw;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("bench",
                                  "legal concept entailment benchmark");
        app->add_flag("--build-test-set", build,
                      "build the gold test set instead of running");
        binder.bind(app->add_option("--corpus", corpus_path, "corpus JSONL"),
                    "corpus", corpus_path);
        binder.bind(
            app->add_option("--concepts", concepts_path, "concept spec file"),
            "concepts", concepts_path);
        app->add_option("--test-set", test_set_path, "test set JSONL");
        app->add_option("--exclusions", exclusions,
                        "case-set files to exclude (interpretation inputs)");
        app->add_option("--methods", methods,
                        "random,zero_shot,cot,atri,direct,judicial,expert")
            ->delimiter(',');
        app->add_option("--interpretation", interpretation_paths,
                        "interpretation JSON files (repeatable)");
        app->add_option("--out", out, "report JSON / test-set output")
            ->required();
        app->add_option("--ledger", ledger_out,
                        "per-prediction ledger JSONL");
        binder.bind(app->add_option("--n-reps", n_reps,
                                    "votes per example (majority)"),
                    "n_reps", n_reps);
        binder.bind(app->add_option("--seed", seed, "bench seed"), "seed",
                    seed);
        binder.bind(app->add_flag("--no-cs", no_cs,
                                  "skip consistency scoring"),
                    "no_cs", no_cs);
        binder.bind(app->add_option("--law-code", law_code,
                                    "law code for citation fallback"),
                    "law_code", law_code);
        gw.add_to(app, binder, /*with_judge=*/true);
    }

    int run_build(Ctx& ctx, RunManifest& m) {
        if (corpus_path.empty() || concepts_path.empty())
            throw config_error(
                "bench --build-test-set needs --corpus and --concepts");
        m.corpus_digest = sha256_file(corpus_path);
        ctx.add_prompt_digests(m);
        m.model_ids["filter"] = gw.model;
        Corpus corpus = Corpus::ingest_file(corpus_path, SchemaMode::strict);
        auto concepts = load_concepts(concepts_path);
        auto index = RetrievalIndex::build(corpus, law_code);
        auto gateway = gw.make(ctx.assets_dir);
        auto prompts = ctx.prompts();
        FilterExtract fx(*gateway, prompts, gw.model);

        std::vector<CaseSet> excl_sets;
        for (const auto& p : exclusions) excl_sets.push_back(CaseSet::load(p));

        std::vector<EntailmentExample> all;
        for (const auto& spec : concepts) {
            CaseSet excl;
            excl.concept_id = spec.concept_id;
            for (const auto& e : excl_sets)
                if (e.concept_id == spec.concept_id || e.concept_id.empty())
                    excl.case_ids.insert(excl.case_ids.end(),
                                         e.case_ids.begin(),
                                         e.case_ids.end());
            std::vector<std::string> warnings;
            auto examples =
                build_test_set(corpus, index, spec, fx, excl, &warnings);
            print_warnings(warnings);
            all.insert(all.end(), examples.begin(), examples.end());
        }
        save_test_set(all, out);
        finish_manifest(m, gateway.get(), out);
        std::cout << "test set: " << all.size() << " examples\n";
        return 0;
    }

    int run(Ctx& ctx) {
        auto m = ctx.manifest();
        if (build) return run_build(ctx, m);

        if (test_set_path.empty() || concepts_path.empty())
            throw config_error("bench needs --test-set and --concepts");
        ctx.add_prompt_digests(m);
        m.seeds["bench"] = seed;
        m.model_ids["predict"] = gw.model;
        m.model_ids["judge"] = gw.judge_model;

        auto examples = load_test_set(test_set_path);
        auto specs = concept_map(load_concepts(concepts_path));

        std::vector<Interpretation> interps;
        for (const auto& p : interpretation_paths)
            interps.push_back(Interpretation::load(p));

        EntailmentBench::RunConfig rc;
        rc.score_cs = !no_cs;
        rc.parallelism = gw.parallelism;
        for (const auto& name : methods) {
            EntailmentBench::MethodSpec ms;
            ms.method = method_from_name(name);
            if (ms.method == PredictMethod::with_interpretation) {
                bool any_source = name == "with_interpretation";
                for (const auto& it : interps)
                    if (any_source || interp_source_name(it.source) == name)
                        ms.interps[it.concept_id] = &it;
                if (ms.interps.empty())
                    throw config_error("method '" + name +
                                       "' has no matching --interpretation");
                ms.label = "with_interpretation_" +
                           std::string(any_source
                                           ? interp_source_name(
                                                 interps.front().source)
                                           : name.c_str());
            }
            rc.methods.push_back(std::move(ms));
        }

        auto gateway = gw.make(ctx.assets_dir);
        auto prompts = ctx.prompts();
        EntailmentBench bench(*gateway, prompts, gw.model, gw.judge_model,
                              n_reps, seed);
        auto result = bench.run(examples, specs, rc);
        print_warnings(result.failures);

        result.report.manifest_digest = m.input_digest();
        result.report.config_echo =
            json{{"methods", methods}, {"n_reps", n_reps}, {"seed", seed},
                 {"score_cs", !no_cs}};
        io::write_file_atomic(out, result.report.to_json());
        if (!ledger_out.empty()) {
            std::string lines;
            for (const auto& p : result.ledger) {
                json j{{"case_id", p.case_id},
                       {"method", p.method},
                       {"votes", p.votes},
                       {"label", p.label},
                       {"reason", p.reason},
                       {"judge_calls", p.judge_calls}};
                if (p.consistency) j["consistency"] = *p.consistency;
                lines += j.dump() + "\n";
            }
            io::write_file_atomic(ledger_out, lines);
        }
        finish_manifest(m, gateway.get(), out);
        return 0;
    }
};

struct ReportCmd {
    std::string in, compare_path, csv_out, out;
    CLI::App* app = nullptr;
    ConfigBinder binder;

    void setup(CLI::App& root) {
        app = root.add_subcommand("report", "render a benchmark report");
        app->add_option("--in", in, "report JSON file")->required();
        app->add_option("--compare", compare_path,
                        "second report, rendered side by side");
        app->add_option("--csv", csv_out, "CSV output path");
        app->add_option("--out", out,
                        "text output path (default stdout)");
    }

    int run(Ctx&) {
        auto report = BenchReport::from_json(io::read_file(in));
        std::optional<BenchReport> cmp;
        if (!compare_path.empty())
            cmp = BenchReport::from_json(io::read_file(compare_path));
        std::string text =
            render_report_text(report, cmp ? &*cmp : nullptr);
        if (out.empty())
            std::cout << text;
        else
            io::write_file_atomic(out, text);
        if (!csv_out.empty())
            io::write_file_atomic(csv_out, render_report_csv(report));
        return 0;
    }
};

json load_config_file(const std::string& path) {
    try {
        return json::parse(io::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("bad config file: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App root{"atri pipeline"};
    root.require_subcommand(0, 1);

    Ctx ctx;
    ctx.command_line = join_argv(argc, argv);
    root.add_option("--config", ctx.config_path,
                    "JSON config file; flags override its values");
    root.add_option("--assets", ctx.assets_dir, "prompt/fixture asset root");
    root.add_option("--lang", ctx.lang, "prompt language (zh|en)");

    IngestCmd ingest;
    SyntheticCmd synth;
    RetrieveCmd retrieve;
    FilterCmd filter;
    InterpretCmd interpret;
    BenchCmd bench;
    ReportCmd report;
    ingest.setup(root);
    synth.setup(root);
    retrieve.setup(root);
    filter.setup(root);
    interpret.setup(root);
    bench.setup(root);
    report.setup(root);
    // global options (--config/--assets/--lang) may follow the subcommand
    for (auto* sc : root.get_subcommands(nullptr)) sc->fallthrough();

    try {
        try {
            root.parse(argc, argv);
        } catch (const CLI::CallForHelp& e) {
            return root.exit(e);
        } catch (const CLI::ParseError& e) {
            std::cerr << "error [usage]: " << e.what() << "\n";
            return 2;
        }

        if (!ctx.config_path.empty()) {
            ctx.config = load_config_file(ctx.config_path);
            if (ctx.config.contains("assets") &&
                root.get_option("--assets")->count() == 0)
                ctx.assets_dir = ctx.config["assets"].get<std::string>();
            if (ctx.config.contains("lang") &&
                root.get_option("--lang")->count() == 0)
                ctx.lang = ctx.config["lang"].get<std::string>();
        }

        if (ingest.app->parsed()) {
            ingest.binder.apply(ctx.config);
            return ingest.run(ctx);
        }
        if (synth.app->parsed()) {
            synth.binder.apply(ctx.config);
            return synth.run(ctx);
        }
        if (retrieve.app->parsed()) {
            retrieve.binder.apply(ctx.config);
            return retrieve.run(ctx);
        }
        if (filter.app->parsed()) {
            filter.binder.apply(ctx.config);
            return filter.run(ctx);
        }
        if (interpret.app->parsed()) {
            interpret.binder.apply(ctx.config);
            return interpret.run(ctx);
        }
        if (bench.app->parsed()) {
            bench.binder.apply(ctx.config);
            return bench.run(ctx);
        }
        if (report.app->parsed()) {
            report.binder.apply(ctx.config);
            return report.run(ctx);
        }
        std::cerr << "error [usage]: no subcommand given\n";
        std::cerr << root.help();
        return 2;
    } catch (const AtriError& e) {
        std::cerr << "error [" << AtriError::category_name(e.category())
                  << "]: " << e.what() << "\n";
        switch (e.category()) {
            case ErrorCategory::usage: return 2;
            case ErrorCategory::config: return 3;
            case ErrorCategory::provider: return 4;
            default: return 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error [runtime]: " << e.what() << "\n";
        return 1;
    }
}
