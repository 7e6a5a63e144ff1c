#include <doctest.h>

#include <random>

#include "dissip/errors.hpp"
#include "dissip/nonlocal.hpp"

using namespace dissip;

namespace {

GridFunction bump_1d(int npts, double shift = 0.0, bool signed_profile = false) {
  Eigen::VectorXd origin(1);
  origin << -1.0;
  const double h = 2.0 / (npts - 1);
  return GridFunction::sample(1, 1, origin, h, {npts}, 1, [&](const Eigen::VectorXd& x, int) {
    const double t = x[0] - shift;
    if (std::abs(t) >= 0.8) return Complex(0, 0);
    const double c = std::cos(0.5 * M_PI * t / 0.8);
    const double base = c * c;
    return Complex(signed_profile ? base * std::sin(3.0 * t) : base, 0.0);
  });
}

GridFunction random_bump_1d(int npts, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng), b = u(rng), c = u(rng);
  Eigen::VectorXd origin(1);
  origin << -1.0;
  const double h = 2.0 / (npts - 1);
  return GridFunction::sample(1, 1, origin, h, {npts}, 1, [&](const Eigen::VectorXd& x, int) {
    const double t = x[0];
    if (std::abs(t) >= 0.85) return Complex(0, 0);
    const double env = std::pow(std::cos(0.5 * M_PI * t / 0.85), 2.0);
    return Complex(env * (a + b * std::sin(4.0 * t) + c * t), env * 0.3 * std::sin(2.0 * t + a));
  });
}

KernelSpec frac(int dim, double s) {
  KernelSpec k;
  k.kind = KernelSpec::Kind::Fractional;
  k.dimension = dim;
  k.s = s;
  return k;
}

}  // namespace

TEST_CASE("scalar inequality gap basics") {
  const Exponent e = make_exponent(3.0);
  CHECK(scalar_inequality_gap(0.7, 0.7, e) == 0.0);
  CHECK(scalar_inequality_gap(-2.0, -2.0, e) == 0.0);

  // p = 2: zero gap on同-sign pairs, (x-y)^2 - (|x|-|y|)^2 >= 0 on mixed
  const Exponent two = make_exponent(2.0);
  CHECK(std::abs(scalar_inequality_gap(1.5, 0.5, two)) <= 1e-15);
  const double mixed = scalar_inequality_gap(1.0, -2.0, two);
  CHECK(mixed == doctest::Approx(9.0 - 1.0));
  CHECK(mixed >= 0.0);
}

TEST_CASE("scalar inequality gap fuzz") {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> up(1.05, 20.0);
  std::uniform_real_distribution<double> ux(-3.0, 3.0);
  for (int i = 0; i < 20000; ++i) {
    const double p = up(rng);
    const double x = ux(rng), y = ux(rng);
    const double gap = scalar_inequality_gap(x, y, make_exponent(p));
    const double scale = std::max({1.0, std::pow(std::abs(x), p), std::pow(std::abs(y), p)});
    CHECK(gap >= -1e-12 * scale);
  }
}

TEST_CASE("bilinear form positivity and bilinearity") {
  const KernelSpec k = frac(1, 0.5);
  const GridFunction u = bump_1d(41);
  CHECK(bilinear_form(u, u, k) > 0.0);

  const GridFunction v1 = bump_1d(41, 0.1);
  const GridFunction v2 = bump_1d(41, -0.15, true);
  GridFunction v12 = v1;
  for (long q = 0; q < v12.num_points(); ++q) {
    v12.set_value(0, q, v1.value(0, q) + v2.value(0, q));
  }
  const double lhs = bilinear_form(u, v12, k);
  const double rhs = bilinear_form(u, v1, k) + bilinear_form(u, v2, k);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("bilinear form is symmetric") {
  const KernelSpec k = frac(1, 0.25);
  const GridFunction u = bump_1d(33);
  const GridFunction v = bump_1d(33, 0.2, true);
  CHECK(bilinear_form(u, v, k) == bilinear_form(v, u, k));
}

TEST_CASE("bilinear form rejects mismatched grids") {
  const KernelSpec k = frac(1, 0.5);
  CHECK_THROWS_AS(bilinear_form(bump_1d(33), bump_1d(41), k), DomainError);
}

TEST_CASE("fractional form is nonnegative across exponents and orders") {
  for (double p : {1.5, 2.0, 3.0, 7.0}) {
    for (double s : {0.25, 0.5, 0.75}) {
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const GridFunction u = random_bump_1d(65, seed);
        const double val = fractional_form_p(u, make_exponent(p), s);
        CHECK(val >= -1e-7 * std::max(1.0, std::abs(val)));
      }
    }
  }
  CHECK_THROWS_AS(fractional_form_p(bump_1d(33), make_exponent(2.0), 1.5), DomainError);
}

TEST_CASE("fractional form vanishes on zero input") {
  Eigen::VectorXd origin(1);
  origin << -1.0;
  const GridFunction zero = GridFunction::zeros(1, 1, origin, 0.1, {21}, 1);
  CHECK(fractional_form_p(zero, make_exponent(3.0), 0.5) == 0.0);
}

TEST_CASE("besov seminorm basics") {
  Eigen::VectorXd origin(1);
  origin << -1.0;
  const GridFunction zero = GridFunction::zeros(1, 1, origin, 0.1, {21}, 1);
  CHECK(besov_seminorm_sq(zero, 0.5) == 0.0);

  const GridFunction v = bump_1d(41);
  const double base = besov_seminorm_sq(v, 0.5);
  GridFunction scaled = v;
  for (long q = 0; q < scaled.num_points(); ++q) scaled.set_value(0, q, 3.0 * v.value(0, q));
  CHECK(besov_seminorm_sq(scaled, 0.5) == doctest::Approx(9.0 * base).epsilon(1e-13));
  CHECK(base == doctest::Approx(2.0 * bilinear_form(v, v, frac(1, 0.5))).epsilon(1e-14));
}

TEST_CASE("positivity bound chain") {
  const Tolerances tol;
  SUBCASE("p=2 saturates on a nonnegative bump") {
    const GridFunction u = bump_1d(41);
    const PositivityReport rep = check_positivity_bound(u, make_exponent(2.0), frac(1, 0.5), tol);
    CHECK(rep.half_bound_holds);
    CHECK(std::abs(rep.margin) <= 1e-8 * std::max(1.0, std::abs(rep.lhs)));
  }
  SUBCASE("half bound holds on random bumps") {
    for (double p : {1.5, 3.0, 7.0}) {
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const GridFunction u = random_bump_1d(49, seed);
        const PositivityReport rep =
            check_positivity_bound(u, make_exponent(p), frac(1, 0.5), tol);
        CHECK(rep.half_bound_holds);
        CHECK(rep.besov_bound <= rep.rhs_half * (1.0 + 1e-12));
      }
    }
  }
  SUBCASE("doubling a tabulated kernel doubles the corollary constant") {
    const double s = 0.5;
    KernelSpec table;
    table.kind = KernelSpec::Kind::TabulatedRadial;
    table.dimension = 1;
    for (int i = 0; i <= 400; ++i) {
      const double r = 1e-3 + i * (3.0 - 1e-3) / 400;
      table.radii.push_back(r);
      table.density.push_back(2.0 * std::pow(r, -1.0 - 2.0 * s));
    }
    const GridFunction u = bump_1d(33);
    const PositivityReport doubled =
        check_positivity_bound(u, make_exponent(3.0), table, tol, s);
    CHECK(doubled.corollary_constant == doctest::Approx(2.0).epsilon(1e-12));
    const PositivityReport single =
        check_positivity_bound(u, make_exponent(3.0), frac(1, s), tol);
    CHECK(single.corollary_constant == doctest::Approx(1.0));
    CHECK(doubled.besov_bound == doctest::Approx(2.0 * single.besov_bound).epsilon(1e-10));
  }
}

TEST_CASE("pointwise inequality reproduces the form inequality pair by pair") {
  const double s = 0.5;
  const KernelSpec k = frac(1, s);
  const Exponent e = make_exponent(3.0);
  const GridFunction u = bump_1d(33, 0.0, true);
  const PositivityReport rep = check_positivity_bound(u, e, k, {});
  // sum of gaps weighted by the same kernel table equals lhs - rhs_half up to
  // the duality-power regularization
  GridFunction gap_acc = u;  // reuse the grid
  double total = 0.0;
  for (long i = 0; i < u.num_points(); ++i) {
    for (long j = i + 1; j < u.num_points(); ++j) {
      const double xi = u.value(0, i).real();
      const double yj = u.value(0, j).real();
      if (xi == yj) continue;
      const double d = std::abs(i - j) * u.spacing();
      double w;
      if (std::abs(i - j) <= 2) {
        // replicate the probe's near weight by brute subcell quadrature
        const int sub = 2000;
        double acc = 0.0, wsum = 0.0;
        for (int q = 0; q < sub; ++q) {
          const double t = -u.spacing() + (q + 0.5) * (2.0 * u.spacing() / sub);
          const double tent = 1.0 - std::abs(t) / u.spacing();
          const double r = std::abs(d + t);
          if (tent <= 0 || r <= 0) continue;
          acc += tent * r * r * std::pow(r, -1.0 - 2.0 * s);
          wsum += tent;
        }
        w = (acc / wsum) / (d * d);
      } else {
        w = std::pow(d, -1.0 - 2.0 * s);
      }
      total += scalar_inequality_gap(xi, yj, e) * w;
    }
  }
  total *= u.spacing() * u.spacing();
  CHECK(total >= 0.0);
  CHECK(rep.margin == doctest::Approx(total).epsilon(2e-3));
  CHECK(std::abs(rep.margin - total) <= 1e-8 * std::max(1.0, std::abs(rep.lhs)) + 2e-3 * total);
}

TEST_CASE("dual-branch consistency") {
  const double p = 1.5;
  const Exponent e = make_exponent(p);
  const GridFunction u = bump_1d(49);
  const double lhs = fractional_form_p(u, e, 0.5, 1e-9);
  // transformed variable v = |u|^{p'-2} u satisfies u = |v|^{p-2} v, so the
  // p-branch formula applied to v coincides with the dual pairing
  GridFunction v = u;
  for (long q = 0; q < v.num_points(); ++q) {
    const Complex z = u.value(0, q);
    const double a = std::abs(z);
    v.set_value(0, q, a > 0 ? std::pow(a, e.conjugate() - 2.0) * z : Complex(0, 0));
  }
  const double rhs = bilinear_form(v, u, frac(1, 0.5));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
}

TEST_CASE("kernel validation flags") {
  const KernelValidation v = validate_kernel(frac(1, 0.5));
  CHECK(v.second_moment_finite);
  CHECK(v.far_field_finite);
  CHECK(v.far_field > 0.0);

  KernelSpec table;
  table.kind = KernelSpec::Kind::TabulatedRadial;
  table.dimension = 1;
  table.radii = {0.01, 0.5, 1.0, 2.0};
  table.density = {10.0, 1.0, 0.2, 0.0};
  const KernelValidation tv = validate_kernel(table);
  CHECK(tv.second_moment_finite);
  CHECK(tv.far_field_finite);
}
