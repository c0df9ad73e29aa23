#include "io.hpp"

#include <charconv>
#include <cmath>
#include <ctime>

#include "swe/errors.hpp"
#include "swe/hash.hpp"

#ifndef SWE_ASSIM_VERSION
#define SWE_ASSIM_VERSION "unknown"
#endif

namespace swe::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary | std::ios::trunc), columns_(header.size()) {
  if (!out_) throw Error("cannot open '" + path.string() + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

void CsvWriter::row(const std::vector<Cell>& cells) {
  if (cells.size() != columns_) throw Error("csv row has the wrong number of columns");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    std::visit(
        [this](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            out_ << format_double(v);
          } else {
            out_ << v;
          }
        },
        cells[i]);
  }
  out_ << '\n';
  if (!out_) throw Error("csv write failed");
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest::RunManifest(std::string command, const std::string& config_bytes) {
  doc_["command"] = std::move(command);
  doc_["config_sha256"] = sha256_hex(config_bytes);
  doc_["code_version"] = SWE_ASSIM_VERSION;
  doc_["started_at"] = utc_timestamp();
  doc_["stages"] = nlohmann::json::array();
  doc_["results"] = nlohmann::json::object();
}

void RunManifest::record(const std::string& name, std::chrono::steady_clock::time_point start,
                         nlohmann::json& summary, bool ok) {
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  doc_["stages"].push_back({{"name", name}, {"wall_seconds", wall}, {"completed", ok}, {"summary", summary}});
}

void RunManifest::write(const std::filesystem::path& dir, int exit_code, const std::string& message) {
  doc_["finished_at"] = utc_timestamp();
  doc_["exit_code"] = exit_code;
  doc_["message"] = message;
  const auto path = dir / "manifest.json";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << doc_.dump(2) << '\n';
}

}  // namespace swe::cli
