#pragma once

// Deterministic CSV / JSON emission and all-or-nothing output staging.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "scmref/errors.hpp"

namespace scmref::report {

using json = nlohmann::json;

/// 9 significant digits, "nan" / "inf" spelled out.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

/// Value rounded to 9 significant digits, for JSON documents. Non-finite
/// values become null.
inline json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(fmt(v));
}

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(const std::vector<std::string>& cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width does not match header");
    rows_.push_back(cells);
  }

  void add_numbers(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(fmt(v));
    add(cells);
  }

  std::string str() const {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k) out += ',';
        out += cells[k];
      }
      out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Files are collected in memory and only written by commit(): each goes to
/// a hidden temporary name in the target directory, then all are renamed.
class StagedOutput {
 public:
  explicit StagedOutput(std::string dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  void add_json(const std::string& name, const json& doc) { add(name, doc.dump(2) + "\n"); }

  const std::map<std::string, std::string>& files() const noexcept { return files_; }

  std::vector<std::string> commit() const {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw InputError("cannot create output directory '" + dir_ + "': " + ec.message());
    std::vector<std::pair<fs::path, fs::path>> staged;
    auto cleanup = [&staged] {
      std::error_code ignore;
      for (const auto& s : staged) fs::remove(s.first, ignore);
    };
    for (const auto& [name, content] : files_) {
      const fs::path final_path = fs::path(dir_) / name;
      const fs::path tmp = fs::path(dir_) / ("." + name + ".tmp");
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << content;
      out.close();
      if (!out) {
        cleanup();
        throw InputError("cannot write '" + tmp.string() + "'");
      }
      staged.emplace_back(tmp, final_path);
    }
    std::vector<std::string> written;
    for (const auto& [tmp, final_path] : staged) {
      fs::rename(tmp, final_path, ec);
      if (ec) {
        cleanup();
        throw InputError("cannot rename into '" + final_path.string() + "': " + ec.message());
      }
      written.push_back(final_path.string());
    }
    return written;
  }

 private:
  std::string dir_;
  std::map<std::string, std::string> files_;
};

}  // namespace scmref::report
