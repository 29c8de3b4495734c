#pragma once

// Output plumbing: shortest round-trip number formatting, CSV tables, content
// digests, the output-directory inventory and a minimal SVG scatter plot.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace gmclab {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

struct CsvCell {
  std::string text;
  CsvCell(double v) : text(format_double(v)) {}
  CsvCell(int v) : text(std::to_string(v)) {}
  CsvCell(unsigned v) : text(std::to_string(v)) {}
  CsvCell(long v) : text(std::to_string(v)) {}
  CsvCell(long long v) : text(std::to_string(v)) {}
  CsvCell(unsigned long v) : text(std::to_string(v)) {}
  CsvCell(unsigned long long v) : text(std::to_string(v)) {}
  CsvCell(bool v) : text(v ? "true" : "false") {}
  CsvCell(const char* v) : text(v) {}
  CsvCell(std::string v) : text(std::move(v)) {}
};

class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  const std::string& text() const { return text_; }
  std::size_t rows() const { return rows_; }

 private:
  std::size_t columns_;
  std::size_t rows_ = 0;
  std::string text_;
};

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

struct OutputFile {
  std::string name;
  std::uint64_t bytes = 0;
  std::string sha256;
};

/// Creates the directory and records every file written through it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path path_of(const std::string& name) const { return root_ / name; }
  void write(const std::string& name, const std::string& content);
  /// Registers a file produced by another writer.
  void record(const std::string& name);
  const std::vector<OutputFile>& files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<OutputFile> files_;
};

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = false;
};

/// Scatter/line plot on linear axes; points are clipped to the data range.
std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<SvgSeries>& series);

}  // namespace gmclab
