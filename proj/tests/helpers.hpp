#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>

#include "atri/corpus.hpp"
#include "atri/gateway.hpp"
#include "atri/prompt.hpp"
#include "atri/synthetic.hpp"

namespace testutil {

inline std::filesystem::path assets_dir() { return ATRI_ASSETS_DIR; }

// fresh unique directory under the system temp root, removed on destruction
struct TmpDir {
    std::filesystem::path path;

    TmpDir() {
        static std::atomic<unsigned> counter{0};
        auto base = std::filesystem::temp_directory_path();
        path = base / ("atri-test-" + std::to_string(::getpid()) + "-" +
                       std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TmpDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TmpDir(const TmpDir&) = delete;
    TmpDir& operator=(const TmpDir&) = delete;

    std::filesystem::path operator/(const std::string& name) const {
        return path / name;
    }
};

inline std::vector<atri::ConceptSpec> test_concepts() {
    return atri::load_concepts(
        (assets_dir() / "concepts_synthetic.json").string());
}

struct FixtureGateway {
    TmpDir cache;
    std::shared_ptr<atri::FixtureBackend> backend;
    std::shared_ptr<atri::Gateway> gateway;

    explicit FixtureGateway(const std::string& rules_file =
                                "fixtures/synthetic_rules.json") {
        backend = std::make_shared<atri::FixtureBackend>(
            atri::FixtureBackend::from_file(assets_dir() / rules_file));
        gateway =
            std::make_shared<atri::Gateway>(backend, cache / "cache");
    }
};

// shared immutable instance; safe to bind by const reference
inline const atri::PromptLibrary& zh_prompts() {
    static atri::PromptLibrary lib(assets_dir(), "zh");
    return lib;
}

inline atri::SyntheticCorpus make_synthetic(std::uint64_t seed, size_t n,
                                            double frac) {
    atri::SyntheticParams p{seed, n, frac};
    return atri::generate_synthetic_corpus(p, test_concepts());
}

}  // namespace testutil
