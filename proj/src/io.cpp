#include "mymove/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "mymove/errors.hpp"

namespace mymove {

namespace fs = std::filesystem;

namespace {

void write_all(int fd, const void* data, std::size_t size, const std::string& what) {
  const auto* p = static_cast<const std::uint8_t*>(data);
  std::size_t off = 0;
  while (off < size) {
    ssize_t n = ::write(fd, p + off, size - off);
    if (n <= 0) throw Error(ErrorCode::kStorage, fmt::format("write failed for {}", what));
    off += static_cast<std::size_t>(n);
  }
}

void ensure_parent(const fs::path& path) {
  if (!path.has_parent_path()) return;
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  if (ec) throw Error(ErrorCode::kStorage, fmt::format("mkdir {}: {}", path.parent_path().string(), ec.message()));
}

}  // namespace

void write_file_atomic(const std::string& path_str, std::span<const std::uint8_t> bytes) {
  fs::path path(path_str);
  ensure_parent(path);
  fs::path tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kStorage, fmt::format("cannot open {}", tmp.string()));
  try {
    write_all(fd, bytes.data(), bytes.size(), tmp.string());
    if (::fsync(fd) != 0) throw Error(ErrorCode::kStorage, fmt::format("fsync failed for {}", tmp.string()));
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kStorage, fmt::format("rename to {}: {}", path.string(), ec.message()));
}

void write_file_atomic(const std::string& path, std::string_view text) {
  write_file_atomic(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorage, fmt::format("cannot open {}", path));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string read_file_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorage, fmt::format("cannot open {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AppendLog::AppendLog(std::string path) : path_(std::move(path)) {
  ensure_parent(path_);
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kStorage, fmt::format("cannot open log {}", path_));
  // Drop a torn final record so the next append starts on a fresh line.
  std::ifstream in(path_, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!text.empty() && text.back() != '\n') {
    auto keep = text.rfind('\n');
    keep = keep == std::string::npos ? 0 : keep + 1;
    spdlog::warn("{}: truncating torn final record ({} bytes)", path_, text.size() - keep);
    if (::ftruncate(fd_, static_cast<off_t>(keep)) != 0)
      throw Error(ErrorCode::kStorage, fmt::format("cannot truncate torn record in {}", path_));
  }
}

AppendLog::~AppendLog() {
  if (fd_ >= 0) ::close(fd_);
}

void AppendLog::append(std::string_view line) {
  std::string rec(line);
  rec += '\n';
  std::lock_guard lock(mu_);
  write_all(fd_, rec.data(), rec.size(), path_);
  if (::fdatasync(fd_) != 0) throw Error(ErrorCode::kStorage, fmt::format("fdatasync failed for {}", path_));
}

std::vector<std::string> AppendLog::read_all() const {
  std::vector<std::string> out;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return out;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      spdlog::warn("{}: ignoring torn final record ({} bytes)", path_, text.size() - pos);
      break;
    }
    if (nl > pos) out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace mymove
