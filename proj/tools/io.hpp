#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace swe::cli {

/// Scientific notation with 17 significant digits, '.' decimal point.
std::string format_double(double v);

class CsvWriter {
 public:
  using Cell = std::variant<long long, double, std::string>;

  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<Cell>& cells);

 private:
  std::ofstream out_;
  std::size_t columns_;
};

/// One JSON manifest per run: config hash, version, timestamps and the
/// wall time and summary of every stage.
class RunManifest {
 public:
  RunManifest(std::string command, const std::string& config_bytes);

  /// Times `body` and records it as a stage whose summary `body` fills in.
  template <class F>
  void stage(const std::string& name, F&& body) {
    nlohmann::json summary = nlohmann::json::object();
    const auto start = std::chrono::steady_clock::now();
    try {
      body(summary);
    } catch (...) {
      record(name, start, summary, false);
      throw;
    }
    record(name, start, summary, true);
  }

  nlohmann::json& extra() { return doc_["results"]; }
  const nlohmann::json& document() const { return doc_; }

  /// Writes manifest.json into `dir`, replacing any earlier one.
  void write(const std::filesystem::path& dir, int exit_code, const std::string& message);

 private:
  void record(const std::string& name, std::chrono::steady_clock::time_point start, nlohmann::json& summary,
              bool ok);

  nlohmann::json doc_;
};

std::string utc_timestamp();

}  // namespace swe::cli
