#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace atri {

struct PromptTemplate {
    std::string template_id;
    std::string language;  // "zh" | "en"
    std::string body;      // {{placeholder}} slots
    std::set<std::string> required_slots;

    static PromptTemplate from_body(std::string template_id,
                                    std::string language, std::string body);

    // Replaces every {{slot}} occurrence. Missing required slot throws; an
    // unknown binding throws in strict mode. Rendered output never contains
    // a residual "{{".
    std::string render(const std::map<std::string, std::string>& bindings,
                       bool strict = true) const;
};

// Loads assets/prompts/<language>/<template_id>.txt style asset trees.
class PromptLibrary {
public:
    PromptLibrary() = default;
    PromptLibrary(std::filesystem::path assets_dir, std::string language);

    const PromptTemplate& get(const std::string& template_id) const;
    const std::filesystem::path& assets_dir() const { return assets_dir_; }
    const std::string& language() const { return language_; }

    static const std::vector<std::string>& known_template_ids();

private:
    std::filesystem::path assets_dir_;
    std::string language_ = "zh";
    mutable std::map<std::string, PromptTemplate> cache_;
};

}  // namespace atri
