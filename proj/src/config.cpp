#include "cqtom/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace cqtom::cli {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

double parse_real(const std::string& s) {
  // allow "pi", "pi/4", "-3pi/4" style fractions of pi
  std::string t = trim(s);
  const auto pos = t.find("pi");
  if (pos == std::string::npos) return std::stod(t);
  double num = 1.0;
  const std::string head = trim(t.substr(0, pos));
  if (head == "-") num = -1.0;
  else if (!head.empty()) num = std::stod(head);
  double den = 1.0;
  std::string rest = trim(t.substr(pos + 2));
  if (!rest.empty()) {
    if (rest[0] != '/') throw ConfigError("bad angle literal: " + s);
    den = std::stod(rest.substr(1));
  }
  return num * std::numbers::pi / den;
}

StateComponent parse_component(const std::string& text) {
  StateComponent c;
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ConfigError("state component needs the form name(args): " + text);
  const std::string name = trim(text.substr(0, open));
  const auto args = split(text.substr(open + 1, close - open - 1), ',');
  if (name == "coherent") {
    if (args.size() < 1 || args.size() > 2)
      throw ConfigError("coherent(|beta|[,Phi]): " + text);
    c.kind = StateComponent::kCoherent;
    c.beta_abs = parse_real(args[0]);
    c.Phi = args.size() == 2 ? parse_real(args[1]) : 0.0;
  } else if (name == "fock") {
    if (args.size() != 1) throw ConfigError("fock(k): " + text);
    c.kind = StateComponent::kFock;
    c.k = std::stoi(args[0]);
    if (c.k < 0) throw ConfigError("fock(k): k must be >= 0");
  } else {
    throw ConfigError("unknown state kind: " + name);
  }
  return c;
}

}  // namespace

bool StateSpec::is_single_coherent() const {
  return components.size() == 1 &&
         components[0].kind == StateComponent::kCoherent;
}

double StateSpec::max_beta_abs() const {
  double b = 0.0;
  for (const auto& c : components)
    if (c.kind == StateComponent::kCoherent) b = std::max(b, c.beta_abs);
  return b;
}

StateSpec parse_state(const std::string& text) {
  StateSpec spec;
  spec.text = trim(text);
  const std::string t = spec.text;
  if (t.rfind("mixed", 0) == 0) {
    const auto open = t.find('(');
    const auto close = t.rfind(')');
    if (open == std::string::npos || close == std::string::npos)
      throw ConfigError("mixed(w1*s1 + w2*s2 + ...): " + text);
    // split on '+' at paren depth zero
    const std::string inner = t.substr(open + 1, close - open - 1);
    std::vector<std::string> terms;
    int depth = 0;
    std::string cur;
    for (char ch : inner) {
      if (ch == '(') ++depth;
      if (ch == ')') --depth;
      if (ch == '+' && depth == 0) {
        terms.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    terms.push_back(cur);
    double total = 0.0;
    for (const auto& term : terms) {
      const auto star = term.find('*');
      if (star == std::string::npos)
        throw ConfigError("mixed term needs weight*component: " + term);
      StateComponent c = parse_component(trim(term.substr(star + 1)));
      c.weight = parse_real(term.substr(0, star));
      if (c.weight <= 0.0) throw ConfigError("mixture weights must be > 0");
      total += c.weight;
      spec.components.push_back(c);
    }
    for (auto& c : spec.components) c.weight /= total;
  } else {
    spec.components.push_back(parse_component(t));
  }
  return spec;
}

ExperimentConfig::ExperimentConfig() {
  state = parse_state("coherent(3,pi/4)");
  Phi = std::numbers::pi / 4.0;
  phases = {-3.0 * std::numbers::pi / 4.0};
  for (int n = 100; n <= 1000; n += 100) sweep_n.push_back(n);
  if (const char* env = std::getenv("CQTOM_OUT")) out_dir = env;
  if (out_dir.empty()) out_dir = "out";
}

meas::GammaMode gamma_mode_of(const std::string& name) {
  if (name == "series") return meas::GammaMode::kSeries;
  if (name == "approx") return meas::GammaMode::kApprox;
  if (name == "unity") return meas::GammaMode::kUnity;
  throw ConfigError("gamma_mode must be series, approx, or unity: " + name);
}

void apply_key(ExperimentConfig& cfg, const std::string& key,
               const std::string& value) try {
  if (key == "state") cfg.state = parse_state(value);
  else if (key == "lambda_tau") cfg.lambda_tau = parse_real(value);
  else if (key == "n") cfg.n = std::stoi(value);
  else if (key == "N" || key == "runs") cfg.N = std::stoi(value);
  else if (key == "phases") {
    cfg.phases.clear();
    for (const auto& p : split(value, ',')) cfg.phases.push_back(parse_real(p));
  } else if (key == "alpha") cfg.alpha = parse_real(value);
  else if (key == "beta_max") cfg.beta_max = parse_real(value);
  else if (key == "Phi") cfg.Phi = parse_real(value);
  else if (key == "gamma_mode") cfg.gamma_mode = value;
  else if (key == "mu") cfg.mu = parse_real(value);
  else if (key == "master_seed" || key == "seed")
    cfg.master_seed = std::stoull(value);
  else if (key == "dim") cfg.dim = std::stoi(value);
  else if (key == "grid_lo") cfg.grid_lo = parse_real(value);
  else if (key == "grid_hi") cfg.grid_hi = parse_real(value);
  else if (key == "grid_h") cfg.grid_h = parse_real(value);
  else if (key == "epsilon") cfg.epsilon = parse_real(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "threads") cfg.threads = std::stoi(value);
  else if (key == "enumeration_cap") cfg.enumeration_cap = std::stoi(value);
  else if (key == "track_count") cfg.track_count = std::stoi(value);
  else if (key == "sweep_n") {
    cfg.sweep_n.clear();
    const auto parts = split(value, ':');
    if (parts.size() == 3) {
      const int lo = std::stoi(parts[0]), hi = std::stoi(parts[1]),
                step = std::stoi(parts[2]);
      for (int n = lo; n <= hi; n += step) cfg.sweep_n.push_back(n);
    } else {
      for (const auto& p : split(value, ',')) cfg.sweep_n.push_back(std::stoi(p));
    }
  } else if (key == "calibration") cfg.calibration_path = value;
  else throw ConfigError("unknown config key: " + key);
} catch (const ConfigError&) {
  throw;
} catch (const std::exception&) {
  throw ConfigError("bad value for " + key + ": " + value);
}

void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;  // sections group keys
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value: " + line);
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

int resolve_dim(const ExperimentConfig& cfg) {
  if (cfg.dim) {
    if (*cfg.dim < 2) throw ConfigError("dim must be >= 2");
    return *cfg.dim;
  }
  int d = 2;
  for (const auto& c : cfg.state.components) {
    if (c.kind == StateComponent::kCoherent)
      d = std::max(d, fock::default_dim(c.beta_abs));
    else
      d = std::max(d, c.k + 3);
  }
  return d;
}

traj::InitialState build_state(const StateSpec& spec, int dim) {
  traj::InitialState st;
  for (const auto& c : spec.components) {
    fock::Vector psi =
        c.kind == StateComponent::kCoherent
            ? fock::coherent_state(
                  c.beta_abs *
                      fock::Complex{std::cos(c.Phi), std::sin(c.Phi)},
                  dim)
            : fock::fock_state(c.k, dim);
    st.components.emplace_back(c.weight, std::move(psi));
  }
  return st;
}

}  // namespace cqtom::cli
