/// @file output.hpp
/// @brief Artifact writers: CSV with round-trip number formatting, JSON,
/// native SVG line plots and SHA-256 content hashes.
#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "dinilab/runner/json_reader.hpp"

namespace dinilab::runner {

namespace fs = std::filesystem;

/// %.17g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double v);

class CsvWriter {
 public:
  using Cell = std::variant<double, long long, unsigned long long, std::string>;

  CsvWriter(const fs::path& path, const std::vector<std::string>& header);
  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);
  /// Flushes and throws IoError if any write failed.
  void close();

 private:
  fs::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

/// Pretty-printed JSON, non-finite numbers written as strings.
void write_json(const fs::path& path, const Json& value);

/// Replaces non-finite doubles by "inf", "-inf" or "nan" strings.
Json json_number_value(double v);

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line plot with a log-10 y axis; non-positive y values are skipped.
void write_log_plot(const fs::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<PlotSeries>& series);

/// Lower-case hex SHA-256 of the file contents.
std::string sha256_file(const fs::path& path);

}  // namespace dinilab::runner
