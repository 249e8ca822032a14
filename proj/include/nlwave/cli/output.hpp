#pragma once

// CSV formatting and atomic file output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/collocation.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/evolve.hpp"

namespace nlwave::cli {

/// 17 significant digits: enough to round-trip any double.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
public:
  explicit CsvWriter(std::initializer_list<std::string_view> header) {
    bool first = true;
    for (auto h : header) {
      if (!first) {
        text_ += ',';
      }
      text_ += h;
      first = false;
    }
    text_ += '\n';
  }

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    ((append(fields, first)), ...);
    text_ += '\n';
  }

  void comment(const std::string& line) { text_ += "# " + line + "\n"; }

  const std::string& str() const noexcept { return text_; }

private:
  void append(double v, bool& first) { sep(first), text_ += fmt(v); }
  void append(int v, bool& first) { sep(first), text_ += std::to_string(v); }
  void append(long v, bool& first) { sep(first), text_ += std::to_string(v); }
  void append(std::size_t v, bool& first) { sep(first), text_ += std::to_string(v); }
  void append(bool v, bool& first) { sep(first), text_ += v ? "true" : "false"; }
  void append(std::string_view v, bool& first) { sep(first), text_ += v; }
  void append(const std::string& v, bool& first) { sep(first), text_ += v; }
  void append(const char* v, bool& first) { sep(first), text_ += v; }

  void sep(bool& first) {
    if (!first) {
      text_ += ',';
    }
    first = false;
  }

  std::string text_;
};

inline std::string snapshots_csv(std::span<const Snapshot> snaps) {
  CsvWriter csv{"t", "x", "u"};
  for (const auto& s : snaps) {
    for (std::size_t i = 0; i < s.xs.size(); ++i) {
      csv.row(s.t, s.xs[i], s.us[i]);
    }
  }
  return csv.str();
}

inline std::string snapshots_csv(std::span<const Snapshot2D> snaps) {
  CsvWriter csv{"t", "x", "y", "u"};
  for (const auto& s : snaps) {
    const std::size_t n = s.centers.size();
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        csv.row(s.t, s.centers[i], s.centers[j], s.us[i * n + j]);
      }
    }
  }
  return csv.str();
}

/// Files produced by a command; nothing touches the disk until commit().
class OutputSet {
public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  /// Each file is written to a temporary name and renamed into place.
  void commit(const std::filesystem::path& dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
      throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    for (const auto& [name, content] : files_) {
      const auto target = dir / name;
      auto tmp = target;
      tmp += ".tmp";
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
          throw Error("cannot write " + tmp.string());
        }
      }
      std::filesystem::rename(tmp, target, ec);
      if (ec) {
        throw Error("cannot rename " + tmp.string() + " to " + target.string() + ": " + ec.message());
      }
    }
  }

  const std::vector<std::pair<std::string, std::string>>& files() const noexcept { return files_; }

private:
  std::vector<std::pair<std::string, std::string>> files_;
};

} // namespace nlwave::cli
