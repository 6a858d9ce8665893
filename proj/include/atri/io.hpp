#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace atri::io {

std::string read_file(const std::filesystem::path& path);

// write-temp-then-rename; creates parent directories
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace atri::io
