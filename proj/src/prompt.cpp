#include "atri/prompt.hpp"

#include <vector>

#include "atri/errors.hpp"
#include "atri/io.hpp"

namespace atri {

namespace {

// slot names may contain spaces (e.g. {{court view}})
std::set<std::string> scan_slots(const std::string& body) {
    std::set<std::string> slots;
    size_t i = 0;
    while ((i = body.find("{{", i)) != std::string::npos) {
        size_t end = body.find("}}", i + 2);
        if (end == std::string::npos) break;
        slots.insert(body.substr(i + 2, end - i - 2));
        i = end + 2;
    }
    return slots;
}

}  // namespace

PromptTemplate PromptTemplate::from_body(std::string template_id,
                                         std::string language,
                                         std::string body) {
    PromptTemplate t;
    t.template_id = std::move(template_id);
    t.language = std::move(language);
    t.body = std::move(body);
    t.required_slots = scan_slots(t.body);
    return t;
}

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& bindings, bool strict) const {
    for (const auto& slot : required_slots)
        if (!bindings.count(slot))
            throw runtime_error("template " + template_id +
                                ": missing binding for slot '" + slot + "'");
    if (strict)
        for (const auto& [k, _] : bindings)
            if (!required_slots.count(k))
                throw runtime_error("template " + template_id +
                                    ": unknown slot '" + k + "'");
    std::string out;
    out.reserve(body.size());
    size_t i = 0;
    while (i < body.size()) {
        size_t open = body.find("{{", i);
        if (open == std::string::npos) {
            out.append(body, i, std::string::npos);
            break;
        }
        size_t close = body.find("}}", open + 2);
        if (close == std::string::npos) {
            out.append(body, i, std::string::npos);
            break;
        }
        out.append(body, i, open - i);
        out += bindings.at(body.substr(open + 2, close - open - 2));
        i = close + 2;
    }
    if (out.find("{{") != std::string::npos)
        throw runtime_error("template " + template_id +
                            ": rendered output contains residual '{{'");
    return out;
}

PromptLibrary::PromptLibrary(std::filesystem::path assets_dir,
                             std::string language)
    : assets_dir_(std::move(assets_dir)), language_(std::move(language)) {}

const PromptTemplate& PromptLibrary::get(const std::string& template_id) const {
    auto it = cache_.find(template_id);
    if (it != cache_.end()) return it->second;
    auto path = assets_dir_ / "prompts" / language_ / (template_id + ".txt");
    if (!std::filesystem::exists(path))
        throw config_error("prompt asset not found: " + path.string());
    auto t = PromptTemplate::from_body(template_id, language_,
                                       io::read_file(path));
    return cache_.emplace(template_id, std::move(t)).first->second;
}

const std::vector<std::string>& PromptLibrary::known_template_ids() {
    static const std::vector<std::string> ids = {
        "filter_has_reason",       "classify_label",
        "extract_reason",          "generate_interpretation",
        "consistency_judge",       "entailment_zero_shot",
        "entailment_cot",          "entailment_with_interpretation",
    };
    return ids;
}

}  // namespace atri
