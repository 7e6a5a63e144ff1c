#ifndef DISSIP_PROBE_HPP
#define DISSIP_PROBE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "dissip/exponent.hpp"
#include "dissip/grid_function.hpp"
#include "dissip/operator_spec.hpp"
#include "dissip/tolerances.hpp"

namespace dissip {

/// Outcome of a counterexample search.
struct ProbeResult {
  double value = 0.0;
  std::optional<GridFunction> u_star;
  bool converged = false;
  long evaluations = 0;
};

struct SearchOptions {
  int restarts = 20;
  int max_iters = 60;
  int grid_points = 33;      // per axis when the spec carries no grid
  double box_halfwidth = 1.0;
  std::uint64_t seed = 1234;
  double eps0 = 1e-6;
  int threads = 1;
};

/// Discretized dissipativity functional Re L(u, |u|^{p-2}u) for p >= 2, or
/// Re L(|u|^{p'-2}u, u) for p < 2, with centered differences, plain-sum
/// (trapezoid with zero boundary) quadrature, and the duality power
/// regularized as (|u|^2 + eps^2)^{(q-2)/2} u, eps = eps0 * max|u|.
/// Nonnegative over all u iff the operator is dissipative.
double evaluate_scalar_form(const GridFunction& u, const OperatorSpec& spec, const Exponent& e,
                            double eps0 = 1e-6);

/// Values of the form at eps0 in {1e-5, 1e-6, 1e-7}, for regularization-trend
/// reporting.
std::vector<double> evaluate_scalar_form_trend(const GridFunction& u, const OperatorSpec& spec,
                                               const Exponent& e);

/// The transformed-variable functional whose nonnegativity over all v is
/// equivalent to dissipativity; integrand extended by zero where |v|
/// vanishes (relative threshold 1e-12).
double evaluate_lemma1_functional(const GridFunction& v, const OperatorSpec& spec,
                                  const Exponent& e);

/// Multi-start finite-difference gradient descent over unit-p-norm grid
/// functions with fixed support; value < -10 tau_form constitutes a numerical
/// counterexample.  Deterministic given the seed; restarts merged by minimum
/// value with seed-order tie-break.
ProbeResult search_counterexample(const OperatorSpec& spec, const Exponent& e,
                                  const SearchOptions& opts = {});

/// Quadratic q(t) = t^2 int sigma^2 - t lambda int (d1 sigma^2)^2
///               + int |grad sigma|^2 for the modal test function
/// sigma * exp(i t x2).
double sigma_modal_probe(const GridFunction& sigma, double lambda, double t);

/// Threshold lambda* = 2 sqrt(int sigma^2 * int |grad sigma|^2) /
/// int (d1 sigma^2)^2 beyond which q takes negative values.
double sigma_lambda_threshold(const GridFunction& sigma);

/// Vertex of q(t) for a given lambda (the minimizing t).
double sigma_vertex_t(const GridFunction& sigma, double lambda);

/// Builds the two-dimensional sampled-coefficient spec
/// A = [[1, i lambda d1(sigma^2)], [-i lambda d1(sigma^2), 1]] on sigma's grid.
OperatorSpec make_sigma_example_spec(const GridFunction& sigma, double lambda);

}  // namespace dissip

#endif
