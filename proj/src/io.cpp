#include "cqtom/io.hpp"

#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

namespace cqtom::cli {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : path_(path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  out_.open(path);
  if (!out_) throw ConfigError("cannot open output file: " + path);
  for (std::size_t i = 0; i < header.size(); ++i)
    out_ << (i ? "," : "") << header[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << (i ? "," : "") << format_real(values[i]);
  out_ << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << (i ? "," : "") << cells[i];
  out_ << "\n";
}

std::uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot checksum missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["state"] = cfg.state.text;
  j["lambda_tau"] = cfg.lambda_tau;
  j["n"] = cfg.n;
  j["N"] = cfg.N;
  j["phases"] = cfg.phases;
  j["alpha"] = cfg.alpha;
  j["beta_max"] = cfg.beta_max;
  j["Phi"] = cfg.Phi;
  j["gamma_mode"] = cfg.gamma_mode;
  if (cfg.mu) j["mu"] = *cfg.mu;
  j["master_seed"] = cfg.master_seed;
  if (cfg.dim) j["dim"] = *cfg.dim;
  j["grid_lo"] = cfg.grid_lo;
  j["grid_hi"] = cfg.grid_hi;
  j["grid_h"] = cfg.grid_h;
  j["epsilon"] = cfg.epsilon;
  j["out_dir"] = cfg.out_dir;
  j["enumeration_cap"] = cfg.enumeration_cap;
  j["track_count"] = cfg.track_count;
  j["sweep_n"] = cfg.sweep_n;
  if (!cfg.calibration_path.empty()) j["calibration"] = cfg.calibration_path;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.state = parse_state(j.at("state").get<std::string>());
  cfg.lambda_tau = j.at("lambda_tau");
  cfg.n = j.at("n");
  cfg.N = j.at("N");
  cfg.phases = j.at("phases").get<std::vector<double>>();
  cfg.alpha = j.at("alpha");
  cfg.beta_max = j.at("beta_max");
  cfg.Phi = j.at("Phi");
  cfg.gamma_mode = j.at("gamma_mode");
  if (j.contains("mu")) cfg.mu = j["mu"].get<double>();
  cfg.master_seed = j.at("master_seed");
  if (j.contains("dim")) cfg.dim = j["dim"].get<int>();
  cfg.grid_lo = j.at("grid_lo");
  cfg.grid_hi = j.at("grid_hi");
  cfg.grid_h = j.at("grid_h");
  cfg.epsilon = j.at("epsilon");
  cfg.out_dir = j.at("out_dir");
  cfg.enumeration_cap = j.at("enumeration_cap");
  cfg.track_count = j.at("track_count");
  cfg.sweep_n = j.at("sweep_n").get<std::vector<int>>();
  if (j.contains("calibration"))
    cfg.calibration_path = j["calibration"].get<std::string>();
  return cfg;
}

RunManifest::RunManifest(std::string command, const ExperimentConfig& cfg)
    : command_(std::move(command)), cfg_(cfg) {}

void RunManifest::resolved(const std::string& key, double value) {
  resolved_.emplace_back(key, format_real(value));
}

void RunManifest::resolved_text(const std::string& key,
                                const std::string& value) {
  resolved_.emplace_back(key, value);
}

void RunManifest::add_output(const std::string& path) {
  outputs_.push_back(path);
}

void RunManifest::timing_ms(const std::string& stage, double ms) {
  timings_.emplace_back(stage, ms);
}

void RunManifest::write(const std::string& path) const {
  json j;
  j["command"] = command_;
  j["config"] = config_to_json(cfg_);
  json res = json::object();
  for (const auto& [k, v] : resolved_) res[k] = v;
  j["resolved"] = res;
  json outs = json::array();
  for (const auto& p : outputs_) {
    char hex[20];
    std::snprintf(hex, sizeof(hex), "%016llx",
                  static_cast<unsigned long long>(fnv1a64_file(p)));
    outs.push_back({{"file", p},
                    {"fnv1a64", hex},
                    {"bytes", std::filesystem::file_size(p)}});
  }
  j["outputs"] = outs;
  json tim = json::object();
  for (const auto& [k, v] : timings_) tim[k] = v;
  j["timings_ms"] = tim;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

}  // namespace cqtom::cli
