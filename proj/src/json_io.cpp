#include "pbd/json_io.hpp"

#include <fstream>
#include <sstream>

namespace pbd::json_io {

json read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::NotFound, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ParseError, path.string() + ": " + e.what());
  }
}

void write_file(const std::filesystem::path& path, const json& doc) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::StorageFailure, "cannot write " + tmp.string());
    out << doc.dump(2) << '\n';
    if (!out) throw Error(Errc::StorageFailure, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::StorageFailure, "rename " + tmp.string() + ": " + ec.message());
}

}  // namespace pbd::json_io
