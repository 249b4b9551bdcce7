#pragma once

// CSV and SVG emitters shared by the subcommands.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "opsq/cli/config.hpp"

namespace opsq::cli {

inline constexpr const char* kVersion = "0.1.0";

/// 17 significant digits, '.' separator.
inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// FNV-1a 64 of the canonical (sorted-key, compact) JSON text.
inline std::string config_hash(const Json& config) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// A CSV table held in memory; cells are either numbers or text.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw Error("CSV row width does not match header");
    rows_.push_back(std::move(cells));
  }
  void add_numbers(const std::vector<double>& values) {
    std::vector<std::string> cells;
    for (double v : values) cells.push_back(format_number(v));
    add_row(std::move(cells));
  }

  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(header_.begin(), header_.end(), name);
    if (it == header_.end()) throw Error("no CSV column named " + name);
    const auto c = static_cast<std::size_t>(it - header_.begin());
    std::vector<double> out;
    for (const auto& r : rows_) out.push_back(std::stod(r[c]));
    return out;
  }

  std::string render(const std::string& comment) const {
    std::string out = "# " + comment + "\n";
    auto line = [&out](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
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

struct Provenance {
  std::string hash;
  std::optional<std::uint64_t> seed;

  std::string comment() const {
    return std::string("opsq ") + kVersion + " config_hash=" + hash +
           " seed=" + (seed ? std::to_string(*seed) : std::string("none"));
  }
};

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("failed writing " + file.string());
}

/// Static line chart of column y against column x.
inline std::string render_svg(const Table& t, const std::string& x, const std::string& y,
                              const std::string& title) {
  const auto xs = t.column(x), ys = t.column(y);
  const double w = 640, h = 400, left = 70, right = 20, top = 40, bottom = 50;
  double x0 = *std::min_element(xs.begin(), xs.end()), x1 = *std::max_element(xs.begin(), xs.end());
  double y0 = *std::min_element(ys.begin(), ys.end()), y1 = *std::max_element(ys.begin(), ys.end());
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  auto px = [&](double v) { return left + (v - x0) / (x1 - x0) * (w - left - right); };
  auto py = [&](double v) { return h - bottom - (v - y0) / (y1 - y0) * (h - top - bottom); };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return std::string(buf);
  };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  s += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">" +
       title + "</text>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(h - bottom) + "\" x2=\"" + fmt(w - right) +
       "\" y2=\"" + fmt(h - bottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
       fmt(h - bottom) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4, yv = y0 + (y1 - y0) * k / 4;
    s += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(h - bottom + 18) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(xv) + "</text>\n";
    s += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(py(yv) + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(yv) + "</text>\n";
  }
  s += "<text x=\"" + fmt((left + w - right) / 2) + "\" y=\"" + fmt(h - 10) +
       "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + x + "</text>\n";
  s += "<text x=\"16\" y=\"" + fmt((top + h - bottom) / 2) + "\" transform=\"rotate(-90 16 " +
       fmt((top + h - bottom) / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
       y + "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ' ';
    s += fmt(px(xs[i])) + "," + fmt(py(ys[i]));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace opsq::cli
