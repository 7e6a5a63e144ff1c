#include <doctest.h>

#include "dissip/capacity.hpp"
#include "dissip/errors.hpp"
#include "dissip/oblique.hpp"

using namespace dissip;

namespace {

GridFunction boundary_bump(int npts, double halfwidth, double support = 0.8, double k = 0.0) {
  Eigen::VectorXd origin(1);
  origin << -halfwidth;
  const double h = 2.0 * halfwidth / (npts - 1);
  return GridFunction::sample(1, 1, origin, h, {npts}, 1, [&](const Eigen::VectorXd& x, int) {
    const double t = x[0];
    if (std::abs(t) >= support) return Complex(0, 0);
    const double c = std::cos(0.5 * M_PI * t / support);
    return std::exp(Complex(0, k * t)) * (c * c);
  });
}

OperatorSpec oblique_spec_constant(const Eigen::VectorXcd& a) {
  OperatorSpec spec;
  spec.kind = OperatorKind::Oblique;
  spec.n = static_cast<int>(a.size()) + 1;
  spec.coefficient_class = CoefficientClass::Constant;
  spec.a_oblique.push_back(a);
  return spec;
}

}  // namespace

TEST_CASE("poisson kernel mass is close to one at small heights") {
  // tail truncation ~ (2/pi) t / L and quadrature demand t >> h
  const GridFunction coarse = boundary_bump(201, 8.0);
  CHECK(poisson_kernel_mass(coarse, 0.2) == doctest::Approx(1.0).epsilon(2.5e-2));
  const GridFunction fine = boundary_bump(3201, 16.0);
  CHECK(poisson_kernel_mass(fine, 0.05) == doctest::Approx(1.0).epsilon(5e-3));
}

TEST_CASE("harmonic extension keeps positivity and the maximum principle") {
  const GridFunction u = boundary_bump(101, 2.0);
  const HalfSpaceFunction ext = harmonic_extension(u, {0.1, 0.5, 1.5});
  const double max_u = u.max_abs();
  for (const auto& layer : ext.values) {
    for (const Complex& z : layer) {
      CHECK(z.real() >= -1e-12);
      CHECK(std::abs(z) <= max_u + 1e-6);
    }
  }
  // decay with height
  double top = 0.0;
  for (const Complex& z : ext.values.back()) top = std::max(top, std::abs(z));
  CHECK(top < 0.6 * max_u);
  CHECK_THROWS_AS(harmonic_extension(u, {0.0}), DomainError);
}

TEST_CASE("poisson semigroup property (quick version)") {
  // u = kernel at height a; extension to height b equals the kernel at a+b
  const double a = 0.4, b = 0.3;
  const int npts = 1401;
  const double halfwidth = 60.0;
  Eigen::VectorXd origin(1);
  origin << -halfwidth;
  const double h = 2.0 * halfwidth / (npts - 1);
  const GridFunction u = GridFunction::sample(
      1, 1, origin, h, {npts}, 1, [&](const Eigen::VectorXd& x, int) {
        return Complex((1.0 / M_PI) * a / (x[0] * x[0] + a * a), 0.0);
      });
  const HalfSpaceFunction ext = harmonic_extension(u, {b});
  double worst = 0.0;
  for (long q = 0; q < u.num_points(); ++q) {
    const double x = u.point_at(q)[0];
    if (std::abs(x) > 4.0) continue;
    const double want = (1.0 / M_PI) * (a + b) / (x * x + (a + b) * (a + b));
    worst = std::max(worst, std::abs(ext.values[0][q].real() - want));
  }
  CHECK(worst <= 2e-4);
}

TEST_CASE("spectral pairing positivity and Parseval consistency") {
  const GridFunction u = boundary_bump(129, 2.0, 0.8, 3.0);
  const double quad = lambda_half_form(u, u);
  CHECK(quad >= 0.0);
  const double phys = lambda_half_energy_physical(u);
  CHECK(quad == doctest::Approx(phys).epsilon(1e-8));
  CHECK_THROWS_AS(lambda_half_form(u, u, 2), ConfigError);
}

TEST_CASE("Dirichlet-to-Neumann energy identity (quick version)") {
  const GridFunction u = boundary_bump(97, 2.0);
  const double spectral = lambda_half_form(u, u, 8);
  const double poisson = extension_dirichlet_energy(u, 0.05, 12.0);
  CHECK(poisson == doctest::Approx(spectral).epsilon(2e-2));
}

TEST_CASE("oblique form sign conventions") {
  const Exponent two = make_exponent(2.0);
  const GridFunction u = boundary_bump(97, 2.0, 0.8, 1.0);
  SUBCASE("pure normal derivative is dissipative at p = 2") {
    OperatorSpec spec = oblique_spec_constant(Eigen::VectorXcd::Zero(1));
    const double val = oblique_form(u, spec, two);
    CHECK(val <= 1e-12);
  }
  SUBCASE("constant real drift stays dissipative") {
    Eigen::VectorXcd a(1);
    a << Complex(0.8, 0.0);
    OperatorSpec spec = oblique_spec_constant(a);
    for (double p : {2.0, 3.0}) {
      const double val = oblique_form(u, spec, make_exponent(p));
      CHECK(val <= 1e-7 * std::max(1.0, std::abs(val)));
    }
  }
  SUBCASE("small imaginary drift stays dissipative") {
    const Exponent e = make_exponent(3.0);
    Eigen::VectorXcd a(1);
    a << Complex(0.0, 0.5 * e.cpp());
    OperatorSpec spec = oblique_spec_constant(a);
    const double val = oblique_form(u, spec, e);
    CHECK(val <= 1e-7 * std::max(1.0, std::abs(val)));
  }
}

TEST_CASE("multiplier norms of constant vectors") {
  Eigen::VectorXcd a(2);
  a << Complex(0, 1), Complex(0, 0);
  CHECK(multiplier_norm_constant(a) == doctest::Approx(1.0));
  Eigen::VectorXcd real_a(2);
  real_a << Complex(3, 0), Complex(-2, 0);
  CHECK(multiplier_norm_constant(real_a) == 0.0);
  Eigen::VectorXcd two_i(2);
  two_i << Complex(0, 2), Complex(0, 2);
  CHECK(multiplier_norm_constant(two_i) == doctest::Approx(2.0 * std::sqrt(2.0)));
  std::vector<Eigen::VectorXcd> field(2, a);
  CHECK_THROWS_AS(multiplier_norm_constant(field), UnsupportedError);
}

TEST_CASE("real oblique operator checks") {
  const Exponent e = make_exponent(3.0);
  SUBCASE("constant coefficients are dissipative") {
    Eigen::VectorXcd a(1);
    a << Complex(2.0, 0.0);
    const ObliqueCheck res = check_real_oblique(oblique_spec_constant(a), e);
    CHECK(res.verdict.status == Status::ProvenDissipative);
  }
  SUBCASE("an expanding drift (div a >= 0) is dissipative by the sign shortcut") {
    // the trace inequality's left side -1/p int div(a) |v|^2 is nonpositive
    // whenever div a >= 0, so no violation is possible
    OperatorSpec spec;
    spec.kind = OperatorKind::Oblique;
    spec.n = 2;
    spec.coefficient_class = CoefficientClass::SmoothSampled;
    const int npts = 65;
    FieldGrid fg;
    fg.origin = Eigen::VectorXd::Constant(1, -2.0);
    fg.spacing = 4.0 / (npts - 1);
    fg.extents = {npts};
    spec.grid = fg;
    for (int i = 0; i < npts; ++i) {
      const double x = -2.0 + i * fg.spacing;
      Eigen::VectorXcd a(1);
      a << Complex(std::atan(x), 0.0);
      spec.a_oblique.push_back(a);
      spec.div_a_oblique.push_back(Complex(1.0 / (1.0 + x * x), 0.0));
    }
    const ObliqueCheck res = check_real_oblique(spec, e);
    CHECK(res.verdict.status == Status::ProvenDissipative);
  }
  SUBCASE("strong compression is disproved with a certified witness") {
    // a(x) = -k x inside a window: divergence -k concentrated near 0
    OperatorSpec spec;
    spec.kind = OperatorKind::Oblique;
    spec.n = 2;
    spec.coefficient_class = CoefficientClass::SmoothSampled;
    const int npts = 129;
    const double halfwidth = 2.0;
    FieldGrid fg;
    fg.origin = Eigen::VectorXd::Constant(1, -halfwidth);
    fg.spacing = 2.0 * halfwidth / (npts - 1);
    fg.extents = {npts};
    spec.grid = fg;
    const double k = 100.0;
    for (int i = 0; i < npts; ++i) {
      const double x = -halfwidth + i * fg.spacing;
      const double bump = std::abs(x) < 1.0 ? std::pow(std::cos(0.5 * M_PI * x), 2.0) : 0.0;
      Eigen::VectorXcd a(1);
      a << Complex(-k * x * bump, 0.0);
      spec.a_oblique.push_back(a);
      const double dbump =
          std::abs(x) < 1.0 ? -M_PI * std::cos(0.5 * M_PI * x) * std::sin(0.5 * M_PI * x) : 0.0;
      spec.div_a_oblique.push_back(Complex(-k * bump - k * x * dbump, 0.0));
    }
    const ObliqueCheck res = check_real_oblique(spec, e);
    CHECK(res.verdict.status == Status::ProvenNotDissipative);
    REQUIRE(res.witness.has_value());
    // the certificate re-evaluates deterministically
    const double denom = lambda_half_form(*res.witness, *res.witness);
    double num = 0.0;
    for (long q = 0; q < res.witness->num_points(); ++q) {
      num += -spec.div_a_oblique[q].real() * std::norm(res.witness->value(0, q));
    }
    num *= res.witness->cell_volume();
    CHECK(num / denom == doctest::Approx(res.verdict.details.at("certified_ratio")));
    CHECK(num / denom > 4.0 / e.conjugate());
  }
}

TEST_CASE("complex oblique dispatcher") {
  const Exponent e = make_exponent(3.0);
  SUBCASE("small multiplier norm is sufficient") {
    Eigen::VectorXcd a(2);
    a << Complex(1.0, 0.3 * e.cpp()), Complex(-2.0, 0.0);
    const ObliqueCheck res = check_oblique(oblique_spec_constant(a), e);
    CHECK(res.verdict.status == Status::SufficientHolds);
  }
  SUBCASE("large multiplier norm lands in the undecided gap") {
    Eigen::VectorXcd a(2);
    a << Complex(0.0, 5.0), Complex(0.0, 0.0);
    const ObliqueCheck res = check_oblique(oblique_spec_constant(a), e);
    CHECK(res.verdict.status == Status::Indeterminate);
  }
}

TEST_CASE("capacity estimates") {
  SUBCASE("empty set has zero capacity") {
    Eigen::VectorXd origin(2);
    origin << -1.0, -1.0;
    const GridFunction empty = GridFunction::zeros(2, 1, origin, 0.125, {17, 17}, 1);
    CHECK(capacity_estimate(empty) == 0.0);
  }
  SUBCASE("monotone in the set") {
    Eigen::VectorXd origin(2);
    origin << -1.0, -1.0;
    const int npts = 33;
    const double h = 2.0 / (npts - 1);
    auto disk = [&](double r) {
      return GridFunction::sample(2, 1, origin, h, {npts, npts}, 1,
                                  [&](const Eigen::VectorXd& x, int) {
                                    return x.norm() <= r ? Complex(1, 0) : Complex(0, 0);
                                  });
    };
    const double small = capacity_estimate(disk(0.2));
    const double large = capacity_estimate(disk(0.4));
    CHECK(small > 0.0);
    CHECK(small <= large + 1e-7);
  }
  SUBCASE("domain monotonicity: capacity decreases as the box grows") {
    auto cap_in_box = [&](double halfwidth) {
      const int npts = 41;
      Eigen::VectorXd origin(2);
      origin << -halfwidth, -halfwidth;
      const double h = 2.0 * halfwidth / (npts - 1);
      const GridFunction f = GridFunction::sample(
          2, 1, origin, h, {npts, npts}, 1, [&](const Eigen::VectorXd& x, int) {
            return x.norm() <= 0.25 ? Complex(1, 0) : Complex(0, 0);
          });
      return capacity_estimate(f);
    };
    const double tight = cap_in_box(1.0);
    const double loose = cap_in_box(2.0);
    CHECK(loose <= tight + 1e-7);
  }
  SUBCASE("three-dimensional ball capacity scales linearly in the radius") {
    auto ball_cap = [&](double r, int npts) {
      Eigen::VectorXd origin(3);
      origin << -1.0, -1.0, -1.0;
      const double h = 2.0 / (npts - 1);
      const GridFunction f = GridFunction::sample(
          3, 1, origin, h, {npts, npts, npts}, 1, [&](const Eigen::VectorXd& x, int) {
            return x.norm() <= r ? Complex(1, 0) : Complex(0, 0);
          });
      CapacityOptions opts;
      opts.max_sweeps = 2000;
      return capacity_estimate(f, opts);
    };
    const int npts = 81;
    const double c1 = ball_cap(0.1, npts);
    const double c2 = ball_cap(0.2, npts);
    CHECK(c2 / c1 == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("schrodinger capacity verdicts") {
  Eigen::VectorXd origin(2);
  origin << -1.0, -1.0;
  const int npts = 33;
  const double h = 2.0 / (npts - 1);
  auto density = [&](double c) {
    return GridFunction::sample(2, 1, origin, h, {npts, npts}, 1,
                                [&](const Eigen::VectorXd& x, int) {
                                  return x.norm() <= 0.4 ? Complex(c, 0) : Complex(0, 0);
                                });
  };
  const GridFunction set = GridFunction::sample(2, 1, origin, h, {npts, npts}, 1,
                                                [&](const Eigen::VectorXd& x, int) {
                                                  return x.norm() <= 0.4 ? Complex(1, 0)
                                                                         : Complex(0, 0);
                                                });
  const Exponent e = make_exponent(4.0);
  SUBCASE("zero density is sufficient") {
    const Verdict v = check_schrodinger_capacity(density(0.0), e, {set});
    CHECK(v.status == Status::SufficientHolds);
  }
  SUBCASE("huge density fails the necessary bound") {
    const Verdict v = check_schrodinger_capacity(density(500.0), e, {set});
    CHECK(v.status == Status::NecessaryFails);
    REQUIRE(v.certificate.has_value());
    CHECK(v.certificate->sample_index == 0);
    CHECK(v.details.at("rayleigh_sup") > e.cpp());
  }
  SUBCASE("doubling the density doubles every ratio") {
    const Verdict v1 = check_schrodinger_capacity(density(1.0), e, {set});
    const Verdict v2 = check_schrodinger_capacity(density(2.0), e, {set});
    CHECK(v2.details.at("ratio_0") ==
          doctest::Approx(2.0 * v1.details.at("ratio_0")).epsilon(1e-13));
  }
  SUBCASE("negative densities need the signed flag") {
    GridFunction neg = density(1.0);
    neg.set_value(0, neg.num_points() / 2, Complex(-1.0, 0.0));
    CHECK_THROWS_AS(check_schrodinger_capacity(neg, e, {set}), DomainError);
    CHECK_NOTHROW(check_schrodinger_capacity(neg, e, {set}, true));
  }
}
