#include "pgpce/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace pgpce::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw UsageError("invalid value '" + value + "' for " + key);
  }
  return out;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "problem", "dataset",    "model",   "predictions",        "out",
      "n",       "n_test",     "seed",    "rank_tol",           "variance_threshold",
      "p_max",   "ridge",      "min_cluster_size", "restarts",   "max_k",
      "sigma_model", "degree_selection", "theta", "karcher_max_iters", "karcher_tol",
      "karcher_step_size"};
  return keys;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (key == "problem") problem = value;
  else if (key == "dataset") dataset = value;
  else if (key == "model") model = value;
  else if (key == "predictions") predictions = value;
  else if (key == "out") out = value;
  else if (key == "n") n = parse_number<std::size_t>(key, value);
  else if (key == "n_test") n_test = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "rank_tol") rank_tol = parse_number<double>(key, value);
  else if (key == "variance_threshold") variance_threshold = parse_number<double>(key, value);
  else if (key == "p_max") p_max = parse_number<int>(key, value);
  else if (key == "ridge") ridge = parse_number<double>(key, value);
  else if (key == "min_cluster_size") min_cluster_size = parse_number<int>(key, value);
  else if (key == "restarts") restarts = parse_number<int>(key, value);
  else if (key == "max_k") max_k = parse_number<int>(key, value);
  else if (key == "theta") thetas.push_back(value);
  else if (key == "karcher_max_iters") karcher.max_iters = parse_number<int>(key, value);
  else if (key == "karcher_tol") karcher.tol = parse_number<double>(key, value);
  else if (key == "karcher_step_size") karcher.step_size = parse_number<double>(key, value);
  else if (key == "sigma_model") {
    if (value == "diagonal") sigma_model = SingularValueModel::Diagonal;
    else if (value == "aligned-core") sigma_model = SingularValueModel::AlignedCore;
    else throw UsageError("sigma_model must be 'diagonal' or 'aligned-core', got '" + value + "'");
  } else if (key == "degree_selection") {
    if (value == "cap") degree_selection = DegreeSelection::Cap;
    else if (value == "loo") degree_selection = DegreeSelection::LeaveOneOut;
    else throw UsageError("degree_selection must be 'cap' or 'loo', got '" + value + "'");
  } else {
    throw UsageError("unknown config key '" + key + "'");
  }
}

SurrogateConfig RunConfig::surrogate() const {
  SurrogateConfig cfg;
  cfg.rank_tol = rank_tol;
  cfg.variance_threshold = variance_threshold;
  cfg.p_max = p_max;
  cfg.ridge = ridge;
  cfg.sigma_model = sigma_model;
  cfg.degree_selection = degree_selection;
  cfg.clustering.min_cluster_size = min_cluster_size;
  cfg.clustering.restarts = restarts;
  cfg.clustering.max_k = max_k;
  cfg.clustering.seed = seed;
  cfg.karcher = karcher;
  cfg.clustering.karcher = karcher;
  try {
    cfg.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    bool known = false;
    for (const auto& k : config_keys()) known = known || k == key;
    if (!known) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

}  // namespace pgpce::cli
