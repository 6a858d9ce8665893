#include "atri/io.hpp"

#include <fstream>
#include <sstream>

#include "atri/errors.hpp"

namespace atri::io {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw runtime_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view content) {
    auto parent = path.parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw runtime_error("cannot write file: " + tmp.string());
        out.write(content.data(),
                  static_cast<std::streamsize>(content.size()));
        if (!out) throw runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace atri::io
