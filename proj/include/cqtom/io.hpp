#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "cqtom/config.hpp"

namespace cqtom::cli {

/// Formats a real with 17 significant digits, '.' decimal separator.
std::string format_real(double v);

/// CSV writer: header row, comma separator, reals at 17 significant digits.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row_mixed(const std::vector<std::string>& cells);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

std::uint64_t fnv1a64_file(const std::string& path);

nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const nlohmann::json& j);

/// Records the command, the full config, resolved parameters, and a checksum
/// per output file; enough to reproduce every output bit-exactly.
class RunManifest {
 public:
  RunManifest(std::string command, const ExperimentConfig& cfg);
  void resolved(const std::string& key, double value);
  void resolved_text(const std::string& key, const std::string& value);
  void add_output(const std::string& path);
  void timing_ms(const std::string& stage, double ms);
  void write(const std::string& path) const;

 private:
  std::string command_;
  ExperimentConfig cfg_;
  std::vector<std::pair<std::string, std::string>> resolved_;
  std::vector<std::string> outputs_;
  std::vector<std::pair<std::string, double>> timings_;
};

}  // namespace cqtom::cli
