#include "workbench/emit.hpp"

#include <fmt/format.h>

#include <fstream>

#include "hhdmft/errors.hpp"

namespace hhdmft::detail {

std::string num(double v) { return fmt::format("{:.17g}", v); }

Emitter::Emitter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  if (!std::filesystem::exists(dir_, ec)) {
    if (!std::filesystem::create_directories(dir_, ec) || ec) {
      throw IoError(fmt::format("cannot create output directory {}: {}", dir_.string(), ec.message()));
    }
    created_dir_ = true;
  } else if (!std::filesystem::is_directory(dir_, ec)) {
    throw IoError(fmt::format("output path {} is not a directory", dir_.string()));
  }
}

void Emitter::write(const std::string& name, const std::string& content) {
  const auto path = dir_ / name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  files_.push_back(path);
  out << content;
  out.flush();
  if (!out) throw IoError(fmt::format("failed writing {}", path.string()));
}

void Emitter::csv(const std::string& name, const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows) {
  std::vector<std::vector<std::string>> text;
  text.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<std::string> t;
    for (double v : r) t.push_back(num(v));
    text.push_back(std::move(t));
  }
  csv_text(name, header, text);
}

void Emitter::csv_text(const std::string& name, const std::vector<std::string>& header,
                       const std::vector<std::vector<std::string>>& rows) {
  std::string out = fmt::format("{}\n", fmt::join(header, ","));
  for (const auto& r : rows) {
    if (r.size() != header.size()) throw InternalConsistencyError(fmt::format("ragged row in {}", name));
    out += fmt::format("{}\n", fmt::join(r, ","));
  }
  write(name, out);
}

void Emitter::json(const std::string& name, const Json& value) { write(name, value.dump(2) + "\n"); }

void Emitter::text(const std::string& name, const std::string& content) { write(name, content); }

void Emitter::rollback() noexcept {
  std::error_code ec;
  for (const auto& f : files_) std::filesystem::remove(f, ec);
  files_.clear();
  if (created_dir_) std::filesystem::remove(dir_, ec);
}

std::vector<std::string> Emitter::file_names() const {
  std::vector<std::string> out;
  for (const auto& f : files_) out.push_back(f.filename().string());
  return out;
}

}  // namespace hhdmft::detail
