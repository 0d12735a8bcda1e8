#pragma once

// Report serialization: JSON with 17 significant digits, CSV, and atomic
// file writes (temp file + rename).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "carleman/errors.hpp"

namespace carleman::cli {

using nlohmann::json;

inline std::string fmt17(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {
inline void dump_to(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(std::size_t(indent * (depth + 1)), ' ');
  const std::string close(std::size_t(indent * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump_to(it.value(), out, indent, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_to(j[i], out, indent, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: out += fmt17(j.get<double>()); return;
    default: out += j.dump(); return;
  }
}
}  // namespace detail

/// JSON text with every float printed as %.17g; non-finite values become null.
inline std::string dump_json(const json& j, int indent = 2) {
  std::string out;
  detail::dump_to(j, out, indent, 0);
  out += "\n";
  return out;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) text_ += (i ? "," : "") + header[i];
    text_ += "\n";
  }

  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) text_ += ",";
      text_ += std::isfinite(cells[i]) ? fmt17(cells[i]) : (std::isnan(cells[i]) ? "nan" : (cells[i] > 0 ? "inf" : "-inf"));
    }
    text_ += "\n";
  }

  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

/// Writes content to dir/name through a temporary file and a rename.
inline void write_atomic(const std::filesystem::path& dir, const std::string& name, const std::string& content) {
  std::filesystem::create_directories(dir);
  const auto final_path = dir / name;
  const auto tmp = dir / ("." + name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, final_path);
}

}  // namespace carleman::cli
