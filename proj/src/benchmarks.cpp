#include "pgpce/benchmarks.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pgpce/errors.hpp"
#include "pgpce/log.hpp"
#include "pgpce/random.hpp"

namespace pgpce {

Matrix rk4_solve(const ODESpec& spec) {
  if (spec.n_steps < 1) throw PreconditionError("rk4_solve: n_steps must be >= 1");
  if (!(spec.t_end > spec.t0)) throw PreconditionError("rk4_solve: t_end must exceed t0");
  if (!spec.rhs) throw PreconditionError("rk4_solve: missing right-hand side");

  const double h = (spec.t_end - spec.t0) / spec.n_steps;
  Matrix out(spec.state_dim(), spec.n_steps);
  Vector y = spec.initial;
  for (int j = 0; j < spec.n_steps; ++j) {
    const double t = spec.t0 + j * h;
    const Vector k1 = spec.rhs(t, y);
    const Vector k2 = spec.rhs(t + 0.5 * h, y + 0.5 * h * k1);
    const Vector k3 = spec.rhs(t + 0.5 * h, y + 0.5 * h * k2);
    const Vector k4 = spec.rhs(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!y.allFinite()) {
      throw NumericalError("rk4_solve: non-finite state at step " + std::to_string(j + 1));
    }
    out.col(j) = y;
  }
  return out;
}

Matrix sphere_response(double r, double theta, double phi) {
  Matrix y(3, 1);
  y << r * std::cos(phi) * std::cos(theta), r * std::cos(phi) * std::sin(theta), r * std::sin(phi);
  return y;
}

namespace lotka_volterra {
ODESpec ode(double alpha, double beta, double u0, double v0) {
  ODESpec spec;
  spec.rhs = [alpha, beta](double, const Vector& s) {
    Vector d(2);
    d << alpha * s(0) - beta * s(0) * s(1), kDelta * s(0) * s(1) - kGamma * s(1);
    return d;
  };
  spec.t0 = 0.0;
  spec.t_end = kHorizon;
  spec.n_steps = kSteps;
  spec.initial = Vector(2);
  spec.initial << u0, v0;
  return spec;
}
}  // namespace lotka_volterra

Matrix lotka_volterra_response(double alpha, double beta) {
  if (alpha < 0.9 || alpha > 1.0 || beta < 0.1 || beta > 0.15) {
    std::ostringstream os;
    os << "lotka-volterra: (alpha, beta) = (" << alpha << ", " << beta
       << ") outside [0.9, 1] x [0.1, 0.15]";
    log::warn(os.str());
  }
  return rk4_solve(lotka_volterra::ode(alpha, beta)).transpose();
}

namespace cstr {
double rate(double temperature, double pre_exp) {
  return pre_exp * std::exp(-kActivation / (kGasConst * temperature));
}

Vector rhs(const Vector& s, double coolant_temp, double pre_exp) {
  const double c = s(0);
  const double temp = s(1);
  const double k = rate(temp, pre_exp);
  Vector d(2);
  d(0) = (kFlow * (kFeedConc - c) - kVolume * k * c) / kVolume;
  d(1) = (kMassFlow * kHeatCap * (kFeedTemp - temp) + (-kReactionEnthalpy) * kVolume * k * c +
          kUA * (coolant_temp - temp)) /
         (kVolume * kDensity * kHeatCap);
  return d;
}

ODESpec ode(double coolant_temp, double pre_exp) {
  ODESpec spec;
  spec.rhs = [coolant_temp, pre_exp](double, const Vector& s) { return rhs(s, coolant_temp, pre_exp); };
  spec.t0 = 0.0;
  spec.t_end = kStep * kSteps;
  spec.n_steps = kSteps;
  spec.initial = Vector(2);
  spec.initial << kConc0, kTemp0;
  return spec;
}
}  // namespace cstr

Matrix cstr_response(double coolant_temp, double pre_exp) {
  if (coolant_temp < 305.0 || coolant_temp > 310.0) {
    std::ostringstream os;
    os << "cstr: coolant temperature " << coolant_temp << " outside [305, 310]";
    log::warn(os.str());
  }
  return rk4_solve(cstr::ode(coolant_temp, pre_exp)).transpose();
}

const std::vector<BenchmarkProblem>& benchmark_problems() {
  static const std::vector<BenchmarkProblem> problems = [] {
    std::vector<BenchmarkProblem> v;
    // phi is tied to theta, so the inputs are (r, theta).
    v.push_back({"sphere",
                 InputDistribution({{0.0, 2.0}, {0.0, std::numbers::pi}}),
                 3, 1,
                 [](const Vector& x) { return sphere_response(x(0), x(1), x(1)); }});
    v.push_back({"lotka-volterra",
                 InputDistribution({{0.9, 1.0}, {0.1, 0.15}}),
                 lotka_volterra::kSteps, 2,
                 [](const Vector& x) { return lotka_volterra_response(x(0), x(1)); }});
    v.push_back({"cstr",
                 InputDistribution({{305.0, 310.0}}),
                 cstr::kSteps, 2,
                 [](const Vector& x) { return cstr_response(x(0)); }});
    return v;
  }();
  return problems;
}

std::string problem_names() {
  std::string out;
  for (const auto& p : benchmark_problems()) out += (out.empty() ? "" : ", ") + p.name;
  return out;
}

const BenchmarkProblem& find_problem(std::string_view name) {
  for (const auto& p : benchmark_problems()) {
    if (p.name == name) return p;
  }
  throw PreconditionError("unknown problem '" + std::string(name) + "'; valid problems: " +
                          problem_names());
}

Dataset evaluate_problem(const BenchmarkProblem& problem, const Matrix& thetas) {
  if (thetas.cols() != problem.distribution.dim()) {
    throw DimensionError(problem.name + " expects " + std::to_string(problem.distribution.dim()) +
                         " inputs per sample");
  }
  Dataset data;
  data.thetas = thetas;
  data.distribution = problem.distribution;
  data.responses.reserve(static_cast<std::size_t>(thetas.rows()));
  for (Index i = 0; i < thetas.rows(); ++i) {
    data.responses.push_back(problem.generator(thetas.row(i).transpose()));
  }
  return data;
}

Dataset generate_dataset(const BenchmarkProblem& problem, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw PreconditionError("generate_dataset: N must be >= 1");
  Rng rng(seed);
  const int d = problem.distribution.dim();
  Matrix thetas(static_cast<Index>(n), d);
  for (Index i = 0; i < thetas.rows(); ++i) {
    for (int k = 0; k < d; ++k) {
      const auto& m = problem.distribution.marginals[static_cast<std::size_t>(k)];
      thetas(i, k) = rng.uniform(m.lo, m.hi);
    }
  }
  return evaluate_problem(problem, thetas);
}

}  // namespace pgpce
