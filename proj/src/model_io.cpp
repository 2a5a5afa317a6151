#include "pgpce/model_io.hpp"

#include <cmath>

#include "pgpce/binary_io.hpp"
#include "pgpce/errors.hpp"

namespace pgpce {
namespace {

constexpr std::uint64_t kMaxCount = 1u << 24;

void put_distribution(io::Writer& w, const InputDistribution& dist) {
  w.u64(static_cast<std::uint64_t>(dist.dim()));
  for (const auto& m : dist.marginals) {
    w.u32(0);
    w.f64(m.lo);
    w.f64(m.hi);
  }
}

InputDistribution get_distribution(io::Reader& r) {
  const std::uint64_t d = r.count(kMaxCount, "input dimension");
  std::vector<UniformMarginal> marginals;
  for (std::uint64_t k = 0; k < d; ++k) {
    if (r.u32() != 0) r.fail("unsupported marginal kind");
    const double lo = r.f64();
    const double hi = r.f64();
    marginals.push_back({lo, hi});
  }
  try {
    return InputDistribution(std::move(marginals));
  } catch (const PreconditionError& e) {
    r.fail(e.what());
  }
}

OrthoFrame get_frame(io::Reader& r) {
  const std::uint64_t at = r.offset();
  Matrix m = r.matrix();
  try {
    return OrthoFrame(std::move(m));
  } catch (const Error& e) {
    throw FormatError(std::string("invalid frame: ") + e.what(), at);
  }
}

void put_pga(io::Writer& w, const PGAModel& m) {
  w.matrix(m.mean.matrix());
  w.matrix(m.basis);
  w.vector(m.eigenvalues);
  w.vector(m.tangent_mean);
  w.u64(static_cast<std::uint64_t>(m.d));
  w.f64(m.explained_fraction);
  w.u32(m.concentrated ? 1 : 0);
}

PGAModel get_pga(io::Reader& r) {
  OrthoFrame mean = get_frame(r);
  const std::uint64_t at = r.offset();
  Matrix basis = r.matrix();
  Vector eig = r.vector();
  Vector tmean = r.vector();
  const auto d = static_cast<Index>(r.u64());
  const double frac = r.f64();
  const bool conc = r.u32() != 0;
  if (basis.rows() != mean.matrix().size() || basis.cols() != d || d < 1 ||
      tmean.size() != basis.rows()) {
    throw FormatError("inconsistent PGA section", at);
  }
  return PGAModel{std::move(mean), std::move(basis), std::move(eig), std::move(tmean), d, frac, conc};
}

void put_pce(io::Writer& w, const PCEModel& m) {
  w.u32(static_cast<std::uint32_t>(m.index_set.dim));
  w.u32(static_cast<std::uint32_t>(m.index_set.max_degree));
  put_distribution(w, m.distribution);
  w.matrix(m.coefficients);
  w.f64(m.ridge);
  w.f64(m.condition_number);
  w.f64(m.loo_error);
}

PCEModel get_pce(io::Reader& r) {
  const std::uint64_t at = r.offset();
  const auto dim = static_cast<int>(r.u32());
  const auto degree = static_cast<int>(r.u32());
  PCEModel m;
  try {
    m.index_set = build_index_set(dim, degree);
  } catch (const Error& e) {
    throw FormatError(std::string("invalid PCE basis: ") + e.what(), at);
  }
  m.distribution = get_distribution(r);
  m.coefficients = r.matrix();
  m.ridge = r.f64();
  m.condition_number = r.f64();
  m.loo_error = r.f64();
  if (m.distribution.dim() != dim || m.coefficients.rows() != static_cast<Index>(m.index_set.size())) {
    throw FormatError("inconsistent PCE section", at);
  }
  return m;
}

}  // namespace

std::string encode_model(const TrainedSurrogate& model) {
  io::Writer w;
  w.bytes("PGSM");
  w.u32(kModelFormatVersion);
  w.u64(static_cast<std::uint64_t>(model.p));
  w.u64(static_cast<std::uint64_t>(model.rows));
  w.u64(static_cast<std::uint64_t>(model.cols));
  w.u64(static_cast<std::uint64_t>(model.locals.size()));

  const SurrogateConfig& c = model.config;
  w.f64(c.rank_tol);
  w.f64(c.variance_threshold);
  w.u32(static_cast<std::uint32_t>(c.p_max));
  w.f64(c.ridge);
  w.u32(static_cast<std::uint32_t>(c.sigma_model));
  w.u32(static_cast<std::uint32_t>(c.degree_selection));
  w.u32(static_cast<std::uint32_t>(c.clustering.min_cluster_size));
  w.u32(static_cast<std::uint32_t>(c.clustering.k_start));
  w.u32(static_cast<std::uint32_t>(c.clustering.max_k.value_or(0)));
  w.u32(static_cast<std::uint32_t>(c.clustering.restarts));
  w.u64(c.clustering.seed);
  w.u32(static_cast<std::uint32_t>(c.karcher.max_iters));
  w.f64(c.karcher.step_size);
  w.f64(c.karcher.tol);

  put_distribution(w, model.distribution);
  w.matrix(model.thetas);
  w.u64(model.labels.size());
  for (int l : model.labels) w.u32(static_cast<std::uint32_t>(l));
  w.u64(model.curve.size());
  for (const auto& e : model.curve) {
    w.u32(static_cast<std::uint32_t>(e.k));
    w.f64(e.score);
    w.f64(e.objective);
    w.u64(e.smallest_cluster);
    w.u32(e.valid ? 1 : 0);
  }
  w.u32(model.fallback ? 1 : 0);

  for (const auto& local : model.locals) {
    put_pga(w, local.pga_u);
    put_pga(w, local.pga_v);
    put_pce(w, local.pce_bu);
    put_pce(w, local.pce_bv);
    put_pce(w, local.pce_sigma);
    w.u64(local.members.size());
    for (std::size_t m : local.members) w.u64(m);
    w.matrix(local.centroid_u.matrix());
  }
  return w.data();
}

TrainedSurrogate decode_model(std::string bytes) {
  io::Reader r(std::move(bytes));
  r.expect_magic("PGSM");
  const std::uint64_t at_version = r.offset();
  const std::uint32_t version = r.u32();
  if (version != kModelFormatVersion) {
    throw FormatError("unsupported model version " + std::to_string(version), at_version);
  }
  TrainedSurrogate model;
  model.p = static_cast<Index>(r.count(kMaxCount, "subspace dimension"));
  model.rows = static_cast<Index>(r.count(kMaxCount, "response rows"));
  model.cols = static_cast<Index>(r.count(kMaxCount, "response columns"));
  const std::uint64_t n_locals = r.count(kMaxCount, "cluster count");

  SurrogateConfig& c = model.config;
  c.rank_tol = r.f64();
  c.variance_threshold = r.f64();
  c.p_max = static_cast<int>(r.u32());
  c.ridge = r.f64();
  const std::uint64_t at_kind = r.offset();
  const std::uint32_t kind = r.u32();
  if (kind > 1) throw FormatError("unknown singular-value model " + std::to_string(kind), at_kind);
  c.sigma_model = static_cast<SingularValueModel>(kind);
  const std::uint64_t at_sel = r.offset();
  const std::uint32_t sel = r.u32();
  if (sel > 1) throw FormatError("unknown degree selection " + std::to_string(sel), at_sel);
  c.degree_selection = static_cast<DegreeSelection>(sel);
  c.clustering.min_cluster_size = static_cast<int>(r.u32());
  c.clustering.k_start = static_cast<int>(r.u32());
  const auto max_k = static_cast<int>(r.u32());
  if (max_k > 0) c.clustering.max_k = max_k;
  c.clustering.restarts = static_cast<int>(r.u32());
  c.clustering.seed = r.u64();
  c.karcher.max_iters = static_cast<int>(r.u32());
  c.karcher.step_size = r.f64();
  c.karcher.tol = r.f64();
  c.clustering.karcher = c.karcher;

  model.distribution = get_distribution(r);
  const std::uint64_t at_thetas = r.offset();
  model.thetas = r.matrix();
  if (model.thetas.cols() != model.distribution.dim()) {
    throw FormatError("training inputs do not match the distribution", at_thetas);
  }
  const std::uint64_t n_labels = r.count(kMaxCount, "label count");
  if (n_labels != static_cast<std::uint64_t>(model.thetas.rows())) r.fail("label count mismatch");
  for (std::uint64_t i = 0; i < n_labels; ++i) {
    const std::uint32_t l = r.u32();
    if (l >= n_locals) r.fail("cluster label out of range");
    model.labels.push_back(static_cast<int>(l));
  }
  const std::uint64_t n_curve = r.count(kMaxCount, "trace length");
  for (std::uint64_t i = 0; i < n_curve; ++i) {
    ClusterCountScore e;
    e.k = static_cast<int>(r.u32());
    e.score = r.f64();
    e.objective = r.f64();
    e.smallest_cluster = r.u64();
    e.valid = r.u32() != 0;
    model.curve.push_back(e);
  }
  model.fallback = r.u32() != 0;

  for (std::uint64_t h = 0; h < n_locals; ++h) {
    PGAModel pu = get_pga(r);
    PGAModel pv = get_pga(r);
    PCEModel bu = get_pce(r);
    PCEModel bv = get_pce(r);
    PCEModel sig = get_pce(r);
    const std::uint64_t n_members = r.count(kMaxCount, "member count");
    std::vector<std::size_t> members;
    for (std::uint64_t i = 0; i < n_members; ++i) members.push_back(r.u64());
    OrthoFrame centroid = get_frame(r);
    if (pu.rows() != model.rows || pv.rows() != model.cols || pu.cols() != model.p ||
        bu.output_dim() != pu.d || bv.output_dim() != pv.d) {
      r.fail("local model " + std::to_string(h) + " has inconsistent dimensions");
    }
    model.locals.push_back(LocalModel{std::move(pu), std::move(pv), std::move(bu), std::move(bv),
                                      std::move(sig), std::move(members), std::move(centroid)});
  }
  r.expect_end();
  return model;
}

void save_model(const TrainedSurrogate& model, const std::string& path) {
  io::write_file(path, encode_model(model));
}

TrainedSurrogate load_model(const std::string& path) {
  return decode_model(io::read_file(path));
}

}  // namespace pgpce
