#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pgpce/errors.hpp"
#include "pgpce/surrogate.hpp"

namespace pgpce::cli {

/// Raised for bad command lines and config files; maps to exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Settings shared by every verb. Populated from defaults, then the config
/// file, then explicit command-line flags.
struct RunConfig {
  std::string problem;
  std::string dataset;
  std::string model;
  std::string predictions;
  std::string out = ".";
  std::size_t n = 100;
  std::size_t n_test = 0;
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;
  double variance_threshold = 0.99;
  int p_max = 2;
  double ridge = 1e-10;
  int min_cluster_size = 5;
  int restarts = 8;
  std::optional<int> max_k;
  SingularValueModel sigma_model = SingularValueModel::AlignedCore;
  DegreeSelection degree_selection = DegreeSelection::LeaveOneOut;
  /// Config file only (karcher_max_iters, karcher_tol, karcher_step_size).
  KarcherConfig karcher;
  std::vector<std::string> thetas;

  SurrogateConfig surrogate() const;
  /// Applies one key=value setting. Throws UsageError for unknown keys or
  /// unparsable values.
  void set(const std::string& key, const std::string& value);
};

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Every key accepted by RunConfig::set.
const std::vector<std::string>& config_keys();

}  // namespace pgpce::cli
