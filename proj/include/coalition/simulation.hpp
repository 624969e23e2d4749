#pragma once

// Seeded data-generating processes for the three benchmark experiments:
//   linear3    Return = 0.1*Size + 0.2*Value + 0.3*Momentum + noise
//   nonlinear3 linear3 terms + 0.4*s^2 + 0.5*v^2 + 0.6*m^2 + 0.7*s*v
//   twofactor  Return = 3*F1^2 + 5*exp(F2) + 2*F1*F2 + noise, F ~ U[0,1)
//
// Draw order is fixed: all of factor 1, then factor 2, then factor 3, then
// the noise block. linear3 and nonlinear3 therefore share identical factor
// draws under one seed; only the response differs.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "coalition/data.hpp"
#include "coalition/error.hpp"
#include "coalition/rng.hpp"

namespace coalition {

enum class Experiment { linear3, nonlinear3, twofactor };

inline std::string to_string(Experiment name) {
  switch (name) {
    case Experiment::linear3: return "linear3";
    case Experiment::nonlinear3: return "nonlinear3";
    case Experiment::twofactor: return "twofactor";
  }
  raise(errc::invalid_argument, "unknown experiment enumerator");
}

inline Experiment parse_experiment(const std::string& text) {
  if (text == "linear3") return Experiment::linear3;
  if (text == "nonlinear3") return Experiment::nonlinear3;
  if (text == "twofactor") return Experiment::twofactor;
  raise(errc::invalid_argument,
        "unknown experiment '" + text + "' (expected linear3, nonlinear3, or twofactor)");
}

struct ExperimentSpec {
  Experiment name = Experiment::linear3;
  std::size_t n = 1000;
  double noise_sd = 0.1;
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 10) raise(errc::validation, "experiment needs n >= 10 instances");
    if (!std::isfinite(noise_sd) || noise_sd < 0.0) {
      raise(errc::validation, "noise_sd must be finite and non-negative");
    }
  }
};

// Noiseless responses, exposed so tests can pin plug-in values.
inline double linear3_response(double size, double value, double momentum) {
  return 0.1 * size + 0.2 * value + 0.3 * momentum;
}

inline double nonlinear3_response(double size, double value, double momentum) {
  return linear3_response(size, value, momentum) + 0.4 * size * size +
         0.5 * value * value + 0.6 * momentum * momentum + 0.7 * size * value;
}

inline double twofactor_response(double f1, double f2) {
  return 3.0 * f1 * f1 + 5.0 * std::exp(f2) + 2.0 * f1 * f2;
}

namespace detail {

template <typename Response>
Dataset assemble_three_factor(const ExperimentSpec& spec, Response&& response) {
  RngState rng(spec.seed);
  const std::vector<double> size = rng.normal_vector(spec.n, 0.0, 1.0);
  const std::vector<double> value = rng.normal_vector(spec.n, 0.0, 1.0);
  const std::vector<double> momentum = rng.normal_vector(spec.n, 0.0, 1.0);
  const std::vector<double> noise = rng.normal_vector(spec.n, 0.0, spec.noise_sd);

  std::vector<double> cells;
  cells.reserve(spec.n * 3);
  std::vector<double> target(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    cells.push_back(size[i]);
    cells.push_back(value[i]);
    cells.push_back(momentum[i]);
    target[i] = response(size[i], value[i], momentum[i]) + noise[i];
  }
  return Dataset{DataMatrix({"Size", "Value", "Momentum"}, std::move(cells)),
                 TargetVector{"Return", std::move(target)}};
}

}  // namespace detail

inline Dataset generate_linear3(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.name != Experiment::linear3) {
    raise(errc::invalid_argument, "spec.name must be linear3");
  }
  return detail::assemble_three_factor(spec, linear3_response);
}

inline Dataset generate_nonlinear3(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.name != Experiment::nonlinear3) {
    raise(errc::invalid_argument, "spec.name must be nonlinear3");
  }
  return detail::assemble_three_factor(spec, nonlinear3_response);
}

inline Dataset generate_twofactor(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.name != Experiment::twofactor) {
    raise(errc::invalid_argument, "spec.name must be twofactor");
  }
  RngState rng(spec.seed);
  const std::vector<double> f1 = rng.uniform_vector(spec.n);
  const std::vector<double> f2 = rng.uniform_vector(spec.n);
  const std::vector<double> noise = rng.normal_vector(spec.n, 0.0, spec.noise_sd);

  std::vector<double> cells;
  cells.reserve(spec.n * 2);
  std::vector<double> target(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    cells.push_back(f1[i]);
    cells.push_back(f2[i]);
    target[i] = twofactor_response(f1[i], f2[i]) + noise[i];
  }
  return Dataset{DataMatrix({"Factor1", "Factor2"}, std::move(cells)),
                 TargetVector{"Return", std::move(target)}};
}

inline Dataset generate(const ExperimentSpec& spec) {
  switch (spec.name) {
    case Experiment::linear3: return generate_linear3(spec);
    case Experiment::nonlinear3: return generate_nonlinear3(spec);
    case Experiment::twofactor: return generate_twofactor(spec);
  }
  raise(errc::invalid_argument, "unknown experiment enumerator");
}

}  // namespace coalition
