#pragma once

#include <stdexcept>
#include <string>

namespace atri {

// Error categories map onto CLI exit codes: usage=2, config=3, provider=4,
// everything else=1.
enum class ErrorCategory { runtime, usage, config, provider };

class AtriError : public std::runtime_error {
public:
    AtriError(ErrorCategory cat, std::string msg)
        : std::runtime_error(std::move(msg)), category_(cat) {}

    ErrorCategory category() const noexcept { return category_; }

    static const char* category_name(ErrorCategory c) {
        switch (c) {
            case ErrorCategory::usage: return "usage";
            case ErrorCategory::config: return "config";
            case ErrorCategory::provider: return "provider";
            default: return "runtime";
        }
    }

private:
    ErrorCategory category_;
};

inline AtriError runtime_error(std::string msg) {
    return AtriError(ErrorCategory::runtime, std::move(msg));
}
inline AtriError config_error(std::string msg) {
    return AtriError(ErrorCategory::config, std::move(msg));
}
inline AtriError provider_error(std::string msg) {
    return AtriError(ErrorCategory::provider, std::move(msg));
}

}  // namespace atri
