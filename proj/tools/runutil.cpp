#include "runutil.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "taylorlp/errors.hpp"

namespace fs = std::filesystem;

namespace tlp::cli {

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out = "0x";
  for (int shift = 60; shift >= 0; shift -= 4) out += digits[(h >> shift) & 0xF];
  return out;
}

std::string slurp_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw io_error("read failed: " + p.string());
  return ss.str();
}

Stage::Stage(fs::path out_dir) : out_(std::move(out_dir)), stage_(out_ / ".stage") {
  std::error_code ec;
  fs::create_directories(out_, ec);
  if (ec) throw io_error("cannot create output directory " + out_.string() + ": " + ec.message());
  fs::remove_all(stage_, ec);  // leftover from an interrupted run
  fs::create_directories(stage_, ec);
  if (ec) throw io_error("cannot create staging directory " + stage_.string() + ": " + ec.message());
}

Stage::~Stage() {
  if (!promoted_) {
    std::error_code ec;
    fs::remove_all(stage_, ec);
  }
}

void Stage::add_text(const std::string& rel, const std::string& content) {
  const fs::path dst = stage_ / rel;
  std::error_code ec;
  fs::create_directories(dst.parent_path(), ec);
  if (ec) throw io_error("cannot create " + dst.parent_path().string() + ": " + ec.message());
  std::ofstream out(dst, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + dst.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw io_error("write failed: " + dst.string());
  rels_.push_back(rel);
}

std::vector<std::string> Stage::artifacts() const {
  std::vector<std::string> out = rels_;
  std::sort(out.begin(), out.end());
  return out;
}

void Stage::promote() {
  std::vector<std::string> rels = artifacts();
  for (const auto& rel : rels) {
    const fs::path dst = out_ / rel;
    std::error_code ec;
    fs::create_directories(dst.parent_path(), ec);
    if (ec) throw io_error("cannot create " + dst.parent_path().string() + ": " + ec.message());
    fs::rename(stage_ / rel, dst, ec);
    if (ec) throw io_error("cannot promote " + rel + ": " + ec.message());
  }
  std::error_code ec;
  fs::remove_all(stage_, ec);
  promoted_ = true;
}

}  // namespace tlp::cli
