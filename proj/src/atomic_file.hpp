#ifndef FCMM_SRC_ATOMIC_FILE_HPP
#define FCMM_SRC_ATOMIC_FILE_HPP

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fcmm::detail {

// Writes to a sibling temp file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace fcmm::detail

#endif  // FCMM_SRC_ATOMIC_FILE_HPP
