#include "pgpce/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "pgpce/benchmarks.hpp"
#include "pgpce/cli/csv.hpp"
#include "pgpce/cli/run_config.hpp"
#include "pgpce/dataset_io.hpp"
#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"
#include "pgpce/model_io.hpp"
#include "pgpce/random.hpp"

namespace pgpce::cli {
namespace {

namespace fs = std::filesystem;

// Test sets drawn by `generate --n-test` use a seed stream distinct from the
// training draw.
constexpr std::uint64_t kTestStream = 0x7465737473657473ULL;

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out);
  return (fs::path(cfg.out) / name).string();
}

std::string shape(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

Vector parse_theta(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse --theta '" + text + "'");
    }
  }
  return Eigen::Map<Vector>(values.data(), static_cast<Index>(values.size()));
}

const BenchmarkProblem& problem_or_usage(const std::string& name) {
  if (name.empty()) throw UsageError("--problem is required; valid problems: " + problem_names());
  try {
    return find_problem(name);
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
}

// Training data from --dataset, or generated from --problem / --n / --seed.
Dataset training_data(const RunConfig& cfg, std::string& source) {
  if (!cfg.dataset.empty()) {
    source = cfg.dataset;
    return load_snapshot_dataset(cfg.dataset);
  }
  const BenchmarkProblem& p = problem_or_usage(cfg.problem);
  source = p.name + " (generated, N=" + std::to_string(cfg.n) + ", seed=" + std::to_string(cfg.seed) + ")";
  return generate_dataset(p, cfg.n, cfg.seed);
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  Dataset data;
  std::string label;
  const bool external = !cfg.problem.empty() && fs::is_regular_file(cfg.problem);
  if (external || (cfg.problem.empty() && !cfg.dataset.empty())) {
    label = external ? cfg.problem : cfg.dataset;
    data = load_snapshot_dataset(label);
  } else {
    const BenchmarkProblem& p = problem_or_usage(cfg.problem);
    label = p.name;
    data = generate_dataset(p, cfg.n, cfg.seed);
    if (cfg.n_test > 0) {
      const Dataset test = generate_dataset(p, cfg.n_test, mix_seed(cfg.seed ^ kTestStream));
      const std::string test_path = out_path(cfg, "test.pgds");
      save_dataset(test, test_path);
      out << "wrote " << test_path << ": " << label << ", N=" << test.size() << "\n";
    }
  }
  const std::string path = out_path(cfg, "dataset.pgds");
  save_dataset(data, path);
  out << "wrote " << path << ": " << label << ", N=" << data.size() << ", inputs="
      << data.input_dim() << ", response " << shape(data.rows(), data.cols())
      << ", seed=" << cfg.seed << "\n";
  return 0;
}

std::string summary_text(const TrainedSurrogate& m, const std::string& source, std::size_t n) {
  std::ostringstream os;
  os << "training data: " << source << "\n";
  os << "samples: " << n << ", inputs: " << m.input_dim() << ", response: " << shape(m.rows, m.cols)
     << ", subspace dimension p: " << m.p << "\n";
  os << "clusters: " << m.locals.size() << (m.fallback ? " (fallback: no valid k >= 2)" : "") << "\n";
  os << "\ncluster-count scores\n";
  for (const auto& e : m.curve) {
    os << "  k=" << e.k << "  objective=" << format_number(e.objective)
       << "  smallest=" << e.smallest_cluster;
    if (e.valid) os << "  score=" << format_number(e.score);
    else os << "  (too small, stop)";
    os << "\n";
  }
  os << "\nlocal models\n";
  for (std::size_t h = 0; h < m.locals.size(); ++h) {
    const auto& l = m.locals[h];
    os << "  cluster " << h << ": size=" << l.members.size() << " d_u=" << l.pga_u.d
       << " d_v=" << l.pga_v.d << " degrees=" << l.pce_bu.index_set.max_degree << "/"
       << l.pce_bv.index_set.max_degree << "/" << l.pce_sigma.index_set.max_degree
       << " cond=" << format_number(l.pce_bu.condition_number)
       << (l.pga_u.concentrated ? "" : " (U spread beyond pi/4)") << "\n";
  }
  return os.str();
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
  const SurrogateConfig scfg = cfg.surrogate();
  std::string source;
  const Dataset data = training_data(cfg, source);
  const TrainedSurrogate model = train(data, scfg);

  const std::string model_path = cfg.model.empty() ? out_path(cfg, "model.pgsm") : cfg.model;
  if (!cfg.model.empty() && fs::path(cfg.model).has_parent_path()) {
    fs::create_directories(fs::path(cfg.model).parent_path());
  }
  save_model(model, model_path);

  int best_k = static_cast<int>(model.locals.size());
  std::vector<CsvRow> curve;
  for (const auto& e : model.curve) {
    curve.push_back({std::to_string(e.k), e.valid ? format_number(e.score) : "",
                     format_number(e.objective), std::to_string(e.smallest_cluster),
                     e.valid ? "1" : "0", (e.valid && e.k == best_k) ? "1" : "0"});
  }
  write_text(out_path(cfg, "report.csv"),
             format_csv({"k", "score", "objective", "smallest_cluster", "valid", "selected"}, curve));

  std::vector<CsvRow> clusters;
  for (std::size_t h = 0; h < model.locals.size(); ++h) {
    const auto& l = model.locals[h];
    clusters.push_back({std::to_string(h), std::to_string(l.members.size()),
                        std::to_string(l.pga_u.d), std::to_string(l.pga_v.d),
                        std::to_string(l.pce_bu.index_set.max_degree),
                        std::to_string(l.pce_bv.index_set.max_degree),
                        std::to_string(l.pce_sigma.index_set.max_degree),
                        format_number(l.pga_u.explained_fraction),
                        format_number(l.pga_v.explained_fraction),
                        format_number(l.pce_bu.condition_number),
                        format_number(l.pce_bv.condition_number),
                        format_number(l.pce_sigma.condition_number),
                        l.pga_u.concentrated ? "1" : "0"});
  }
  write_text(out_path(cfg, "clusters.csv"),
             format_csv({"cluster", "size", "d_u", "d_v", "degree_bu", "degree_bv", "degree_sigma", "explained_u", "explained_v",
                         "cond_bu", "cond_bv", "cond_sigma", "concentrated_u"},
                        clusters));
  const std::string summary = summary_text(model, source, data.size());
  write_text(out_path(cfg, "summary.txt"), summary);
  out << summary << "wrote " << model_path << "\n";
  return 0;
}

TrainedSurrogate require_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw UsageError("--model is required");
  return load_model(cfg.model);
}

int cmd_predict(const RunConfig& cfg, std::ostream& out) {
  const TrainedSurrogate model = require_model(cfg);
  Matrix thetas;
  if (!cfg.thetas.empty()) {
    thetas.resize(static_cast<Index>(cfg.thetas.size()), model.input_dim());
    for (std::size_t i = 0; i < cfg.thetas.size(); ++i) {
      const Vector t = parse_theta(cfg.thetas[i]);
      if (t.size() != model.input_dim()) {
        throw UsageError("--theta '" + cfg.thetas[i] + "' has " + std::to_string(t.size()) +
                             " values, model expects " + std::to_string(model.input_dim()));
      }
      thetas.row(static_cast<Index>(i)) = t.transpose();
    }
  } else if (!cfg.dataset.empty()) {
    thetas = load_snapshot_dataset(cfg.dataset).thetas;
    if (thetas.cols() != model.input_dim()) throw DimensionError("dataset inputs do not match the model");
  } else {
    throw UsageError("predict needs --theta or --dataset");
  }

  Dataset preds;
  preds.thetas = thetas;
  preds.distribution = model.distribution;
  for (Index i = 0; i < thetas.rows(); ++i) {
    const Prediction p = predict_detailed(model, thetas.row(i).transpose());
    out << "sample " << i << ": cluster " << p.cluster << (p.extrapolated ? " (extrapolated)" : "")
        << "\n";
    preds.responses.push_back(p.response);
  }
  const std::string path = cfg.predictions.empty() ? out_path(cfg, "predictions.pgds") : cfg.predictions;
  save_dataset(preds, path);
  out << "wrote " << path << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out) {
  if (cfg.dataset.empty()) throw UsageError("evaluate needs --dataset (the reference set)");
  const Dataset ref = load_snapshot_dataset(cfg.dataset);
  std::vector<Matrix> preds;
  std::vector<int> clusters;
  if (!cfg.predictions.empty()) {
    const Dataset p = load_snapshot_dataset(cfg.predictions);
    if (p.size() != ref.size() || p.rows() != ref.rows() || p.cols() != ref.cols()) {
      throw DimensionError("predictions " + std::to_string(p.size()) + " x " + shape(p.rows(), p.cols()) +
                           " do not match reference " + std::to_string(ref.size()) + " x " +
                           shape(ref.rows(), ref.cols()));
    }
    preds = p.responses;
    clusters.assign(ref.size(), -1);
  } else {
    const TrainedSurrogate model = require_model(cfg);
    if (model.rows != ref.rows() || model.cols != ref.cols() || model.input_dim() != ref.input_dim()) {
      throw DimensionError("model response " + shape(model.rows, model.cols) +
                           " does not match reference " + shape(ref.rows(), ref.cols()));
    }
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const Prediction p = predict_detailed(model, ref.thetas.row(static_cast<Index>(i)).transpose());
      preds.push_back(p.response);
      clusters.push_back(p.cluster);
    }
  }

  std::vector<CsvRow> rows;
  double sum_l2 = 0.0, max_l2 = -1.0, sum_r2 = 0.0, min_r2 = std::numeric_limits<double>::infinity();
  std::size_t worst = 0, n_r2 = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const double l2 = l2_error(preds[i], ref.responses[i]);
    double r2 = std::numeric_limits<double>::quiet_NaN();
    try {
      r2 = r2_score(preds[i], ref.responses[i]);
      sum_r2 += r2;
      min_r2 = std::min(min_r2, r2);
      ++n_r2;
    } catch (const PreconditionError&) {
      // Constant reference: R^2 undefined for this sample.
    }
    sum_l2 += l2;
    if (l2 > max_l2) {
      max_l2 = l2;
      worst = i;
    }
    rows.push_back({std::to_string(i), format_number(l2), std::isnan(r2) ? "" : format_number(r2),
                    clusters[i] < 0 ? "" : std::to_string(clusters[i])});
  }
  write_text(out_path(cfg, "metrics.csv"), format_csv({"sample", "l2", "r2", "cluster"}, rows));
  const double n = static_cast<double>(ref.size());
  const double mean_r2 = n_r2 ? sum_r2 / static_cast<double>(n_r2) : std::numeric_limits<double>::quiet_NaN();
  write_text(out_path(cfg, "metrics_summary.csv"),
             format_csv({"samples", "mean_l2", "max_l2", "worst_sample", "mean_r2", "min_r2"},
                        {{std::to_string(ref.size()), format_number(sum_l2 / n), format_number(max_l2),
                          std::to_string(worst), n_r2 ? format_number(mean_r2) : "",
                          n_r2 ? format_number(min_r2) : ""}}));
  out << "samples: " << ref.size() << "\nmean L2: " << format_number(sum_l2 / n)
      << "\nmax L2: " << format_number(max_l2) << " (sample " << worst << ")\n";
  if (n_r2) out << "mean R2: " << format_number(mean_r2) << "\nmin R2: " << format_number(min_r2) << "\n";
  return 0;
}

int cmd_moments(const RunConfig& cfg, std::ostream& out) {
  const TrainedSurrogate model = require_model(cfg);
  const Moments m = estimate_moments(model, cfg.n, cfg.seed);
  write_text(out_path(cfg, "mean.csv"), matrix_csv(m.mean));
  write_text(out_path(cfg, "std.csv"), matrix_csv(m.std));
  write_text(out_path(cfg, "moments_summary.csv"),
             format_csv({"samples", "seed", "rows", "cols", "mean_of_mean", "max_std"},
                        {{std::to_string(cfg.n), std::to_string(cfg.seed), std::to_string(m.mean.rows()),
                          std::to_string(m.mean.cols()), format_number(m.mean.mean()),
                          format_number(m.std.maxCoeff())}}));
  out << "samples: " << cfg.n << ", seed: " << cfg.seed << "\nmean of mean field: "
      << format_number(m.mean.mean()) << "\nmax std: " << format_number(m.std.maxCoeff()) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Grassmannian PGA + polynomial chaos surrogates", "pgpce"};
  app.require_subcommand(1);

  std::string config_path;
  std::map<std::string, std::string> raw;
  std::vector<std::string> thetas;
  app.add_option("--config", config_path, "key=value config file");
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  const Flag flags[] = {
      {"--problem", "problem", "benchmark name or dataset path"},
      {"--dataset", "dataset", "dataset file (.pgds)"},
      {"--model", "model", "model file (.pgsm)"},
      {"--predictions", "predictions", "predictions file (.pgds)"},
      {"--out", "out", "output directory"},
      {"--n", "n", "sample count (training or Monte Carlo)"},
      {"--n-test", "n_test", "test-set size for generate"},
      {"--seed", "seed", "random seed"},
      {"--rank-tol", "rank_tol", "relative singular-value cutoff"},
      {"--variance-threshold", "variance_threshold", "PGA explained-variance threshold"},
      {"--p-max", "p_max", "maximum PCE total degree"},
      {"--ridge", "ridge", "PCE ridge weight"},
      {"--min-cluster-size", "min_cluster_size", "smallest admissible cluster"},
      {"--restarts", "restarts", "K-means restarts per k"},
      {"--max-k", "max_k", "largest cluster count tried"},
      {"--sigma-model", "sigma_model", "diagonal or aligned-core"},
      {"--degree-selection", "degree_selection", "cap or loo"},
  };
  for (const auto& f : flags) {
    app.add_option_function<std::string>(f.name, [&raw, key = std::string(f.key)](const std::string& v) { raw[key] = v; }, f.help);
  }
  app.add_option("--theta", thetas, "comma-separated input vector (repeatable)");

  const char* verbs[][2] = {{"generate", "write a benchmark dataset"},
                            {"train", "train a surrogate and write model + report"},
                            {"predict", "predict responses at given inputs"},
                            {"evaluate", "L2 / R2 metrics against a reference dataset"},
                            {"moments", "Monte Carlo mean and std fields"}};
  for (const auto& v : verbs) app.add_subcommand(v[0], v[1])->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return 2;
  }

  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      for (const auto& [k, v] : read_config_file(config_path)) cfg.set(k, v);
    }
    for (const auto& [k, v] : raw) cfg.set(k, v);
    if (!thetas.empty()) cfg.thetas = thetas;
    // Reject a bad configuration whatever the verb.
    cfg.surrogate();

    if (verb == "generate") return cmd_generate(cfg, out);
    if (verb == "train") return cmd_train(cfg, out);
    if (verb == "predict") return cmd_predict(cfg, out);
    if (verb == "evaluate") return cmd_evaluate(cfg, out);
    return cmd_moments(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << verb << ": " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pgpce::cli
