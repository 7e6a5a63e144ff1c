#include <benchmark/benchmark.h>

#include <random>

#include "dissip/harness.hpp"
#include "dissip/nonlocal.hpp"
#include "dissip/probe.hpp"
#include "dissip/scalar_criteria.hpp"

namespace {

using namespace dissip;

MatrixSample random_sample(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd re(n, n), im(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      re(i, j) = re(j, i) = u(rng);
      im(i, j) = im(j, i) = u(rng);
    }
  }
  return decompose_matrix(re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>());
}

void BM_MainCondition(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  std::vector<MatrixSample> samples;
  for (int i = 0; i < 64; ++i) samples.push_back(random_sample(rng, n));
  const Exponent e = make_exponent(3.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_main_condition(samples[i++ % samples.size()], e));
  }
}
BENCHMARK(BM_MainCondition)->Arg(2)->Arg(4)->Arg(8);

void BM_QuadraticForm(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  std::vector<MatrixSample> samples;
  for (int i = 0; i < 64; ++i) samples.push_back(random_sample(rng, n));
  const Exponent e = make_exponent(3.0);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_quadratic_form_condition(samples[i++ % samples.size()], e));
  }
}
BENCHMARK(BM_QuadraticForm)->Arg(2)->Arg(4)->Arg(8);

void BM_ScalarForm(benchmark::State& state) {
  OperatorSpec spec;
  spec.kind = OperatorKind::Scalar;
  spec.n = 2;
  spec.coefficient_class = CoefficientClass::Constant;
  spec.A.push_back(Eigen::MatrixXcd::Identity(2, 2));
  const int npts = static_cast<int>(state.range(0));
  Eigen::VectorXd origin = Eigen::VectorXd::Constant(2, -1.0);
  const GridFunction u = GridFunction::sample(
      2, 1, origin, 2.0 / (npts - 1), {npts, npts}, 1, [](const Eigen::VectorXd& x, int) {
        const double r = x.norm();
        if (r >= 0.85) return Complex(0, 0);
        const double c = std::cos(0.5 * M_PI * r / 0.85);
        return Complex(c * c, 0.2 * c);
      });
  const Exponent e = make_exponent(3.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_scalar_form(u, spec, e));
  }
  state.SetItemsProcessed(state.iterations() * npts * npts);
}
BENCHMARK(BM_ScalarForm)->Arg(17)->Arg(33)->Arg(65);

void BM_BilinearDoubleSum(benchmark::State& state) {
  const int npts = static_cast<int>(state.range(0));
  Eigen::VectorXd origin(1);
  origin << -1.0;
  const GridFunction u = GridFunction::sample(
      1, 1, origin, 2.0 / (npts - 1), {npts}, 1, [](const Eigen::VectorXd& x, int) {
        if (std::abs(x[0]) >= 0.8) return Complex(0, 0);
        const double c = std::cos(0.5 * M_PI * x[0] / 0.8);
        return Complex(c * c, 0.0);
      });
  KernelSpec k;
  k.kind = KernelSpec::Kind::Fractional;
  k.dimension = 1;
  k.s = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bilinear_form(u, u, k));
  }
  state.SetItemsProcessed(state.iterations() * npts * npts / 2);
}
BENCHMARK(BM_BilinearDoubleSum)->Arg(33)->Arg(65)->Arg(129);

void BM_SigmaModal(benchmark::State& state) {
  const GridFunction sigma = make_sigma_bump(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sigma_modal_probe(sigma, 2.0, 1.0));
  }
}
BENCHMARK(BM_SigmaModal)->Arg(33)->Arg(65);

}  // namespace

BENCHMARK_MAIN();
