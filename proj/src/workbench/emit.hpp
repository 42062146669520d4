#pragma once

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

namespace hhdmft::detail {

using Json = nlohmann::ordered_json;

/// Round-trip formatting with 17 significant digits.
std::string num(double v);

/// Writes artifacts into one directory and remembers them so a failed run
/// can remove what it produced.
class Emitter {
 public:
  explicit Emitter(std::filesystem::path dir);

  void csv(const std::string& name, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows);
  void csv_text(const std::string& name, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);
  void json(const std::string& name, const Json& value);
  void text(const std::string& name, const std::string& content);

  void rollback() noexcept;
  const std::vector<std::filesystem::path>& files() const noexcept { return files_; }
  std::vector<std::string> file_names() const;

 private:
  void write(const std::string& name, const std::string& content);

  std::filesystem::path dir_;
  std::vector<std::filesystem::path> files_;
  bool created_dir_ = false;
};

}  // namespace hhdmft::detail
