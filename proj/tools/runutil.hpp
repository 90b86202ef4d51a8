#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace tlp::cli {

std::uint64_t fnv1a64(const std::string& bytes);
std::string fnv1a64_hex(const std::string& bytes);

std::string slurp_file(const std::filesystem::path& p);

// Artifacts accumulate in <out>/.stage and move into <out> only after the
// whole run has succeeded; a failed run leaves previous outputs untouched.
class Stage {
 public:
  explicit Stage(std::filesystem::path out_dir);
  ~Stage();
  Stage(const Stage&) = delete;
  Stage& operator=(const Stage&) = delete;

  void add_text(const std::string& rel, const std::string& content);
  std::vector<std::string> artifacts() const;  // relative paths, sorted
  void promote();

 private:
  std::filesystem::path out_, stage_;
  std::vector<std::string> rels_;
  bool promoted_ = false;
};

}  // namespace tlp::cli
