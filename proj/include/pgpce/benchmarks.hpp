#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "pgpce/surrogate.hpp"

namespace pgpce {

/// Fixed-step initial value problem y' = rhs(t, y).
struct ODESpec {
  std::function<Vector(double, const Vector&)> rhs;
  double t0 = 0.0;
  double t_end = 1.0;
  int n_steps = 1;
  Vector initial;

  Index state_dim() const { return initial.size(); }
};

/// Classical RK4 with h = (t_end - t0) / n_steps. Column j of the result is
/// the state after j + 1 steps, so t0 itself is not included. Throws
/// NumericalError naming the step if the state becomes non-finite.
Matrix rk4_solve(const ODESpec& spec);

/// (r cos(phi) cos(theta), r cos(phi) sin(theta), r sin(phi)) as 3 x 1.
Matrix sphere_response(double r, double theta, double phi);

namespace lotka_volterra {
inline constexpr double kGamma = 1.5;
inline constexpr double kDelta = 0.75;
inline constexpr double kPrey0 = 10.0;
inline constexpr double kPredator0 = 5.0;
inline constexpr double kHorizon = 25.0;
inline constexpr int kSteps = 512;

/// u' = alpha u - beta u v, v' = delta u v - gamma v from (u0, v0).
ODESpec ode(double alpha, double beta, double u0 = kPrey0, double v0 = kPredator0);
}  // namespace lotka_volterra

/// 512 x 2 trajectory, columns (prey u, predator v).
Matrix lotka_volterra_response(double alpha, double beta);

namespace cstr {
inline constexpr double kFeedConc = 1.0;
inline constexpr double kFeedTemp = 350.0;
inline constexpr double kActivation = 72750.0;
/// Pre-exponential factor (1/min) of the standard textbook reactor; with it
/// the reactor ignites for coolant temperatures in [305, 310].
inline constexpr double kPreExp = 7.2e10;
inline constexpr double kGasConst = 8.314;
inline constexpr double kVolume = 100.0;
inline constexpr double kDensity = 1000.0;
inline constexpr double kHeatCap = 0.239;
inline constexpr double kReactionEnthalpy = -5e4;
inline constexpr double kUA = 5e4;
inline constexpr double kFlow = 100.0;
/// Feed mass flow rho * q.
inline constexpr double kMassFlow = kDensity * kFlow;
inline constexpr double kConc0 = 0.5;
inline constexpr double kTemp0 = 350.0;
inline constexpr double kStep = 0.01;
inline constexpr int kSteps = 500;

/// Reaction rate constant k0 exp(-Ea / (R T)).
double rate(double temperature, double pre_exp = kPreExp);
/// Concentration and energy balances, state (c, T).
Vector rhs(const Vector& state, double coolant_temp, double pre_exp = kPreExp);
ODESpec ode(double coolant_temp, double pre_exp = kPreExp);
}  // namespace cstr

/// 500 x 2 trajectory, columns (concentration c, temperature T).
Matrix cstr_response(double coolant_temp, double pre_exp = cstr::kPreExp);

/// A named test problem: input distribution plus deterministic generator.
struct BenchmarkProblem {
  std::string name;
  InputDistribution distribution;
  Index rows = 0;
  Index cols = 0;
  std::function<Matrix(const Vector&)> generator;
};

/// sphere, lotka-volterra, cstr.
const std::vector<BenchmarkProblem>& benchmark_problems();
/// Throws PreconditionError listing the valid names if `name` is unknown.
const BenchmarkProblem& find_problem(std::string_view name);
std::string problem_names();

/// N seeded i.i.d. draws from the problem's input distribution with their
/// responses. Bitwise deterministic for a given seed.
Dataset generate_dataset(const BenchmarkProblem& problem, std::size_t n, std::uint64_t seed);

/// Responses of the problem at the given inputs (rows of thetas).
Dataset evaluate_problem(const BenchmarkProblem& problem, const Matrix& thetas);

}  // namespace pgpce
