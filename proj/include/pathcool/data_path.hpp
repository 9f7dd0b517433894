#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

namespace pathcool {

/// Bundled data directory: PATHCOOL_DATA_DIR env var wins, otherwise the
/// compile-time location inside the source tree.
inline std::string data_dir() {
  if (const char* env = std::getenv("PATHCOOL_DATA_DIR")) return env;
#ifdef PATHCOOL_DATA_DIR
  return PATHCOOL_DATA_DIR;
#else
  return "data";
#endif
}

inline std::string data_file(const std::string& name) {
  return (std::filesystem::path(data_dir()) / name).string();
}

}  // namespace pathcool
