#pragma once

#include <string>
#include <string_view>

namespace atri {

// SHA-256 hex digest.
std::string sha256_hex(std::string_view data);

// Digest of a file's bytes; throws on missing file.
std::string sha256_file(const std::string& path);

}  // namespace atri
