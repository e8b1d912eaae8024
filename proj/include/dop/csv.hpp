#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dop::csv {

/// 17 significant digits, shortest form (%.17g). Part of the on-disk contract.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Writer {
 public:
  explicit Writer(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path);
  }

  void header(const std::vector<std::string>& cols) { line(cols); }

  void row(const std::vector<double>& vals) {
    std::vector<std::string> cells;
    cells.reserve(vals.size());
    for (double v : vals) cells.push_back(fmt(v));
    line(cells);
  }

  void line(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      out_ << cells[i];
    }
    out_ << '\n';
  }

  /// trailer entry: `# key,value`
  void trailer(const std::string& key, double value) {
    out_ << "# " << key << ',' << fmt(value) << '\n';
  }
  void trailer(const std::string& key, const std::string& value) {
    out_ << "# " << key << ',' << value << '\n';
  }

  void close() {
    out_.close();
    if (out_.fail()) throw std::runtime_error("write failure on close");
  }

 private:
  std::ofstream out_;
};

}  // namespace dop::csv
