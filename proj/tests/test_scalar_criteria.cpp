#include <doctest.h>

#include <random>

#include "dissip/errors.hpp"
#include "dissip/harness.hpp"
#include "dissip/scalar_criteria.hpp"

using namespace dissip;

namespace {

MatrixSample symmetric_im_sample(std::mt19937_64& rng, int n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXd re(n, n), im(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) re(i, j) = u(rng);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) im(i, j) = im(j, i) = u(rng);
  }
  Eigen::MatrixXcd m = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return decompose_matrix(m);
}

MatrixSample gamma_matrix(double gamma) {
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 0), Complex(0, gamma), Complex(0, -gamma), Complex(1, 0);
  return decompose_matrix(m);
}

MatrixSample scalar_sample(Complex a) {
  Eigen::MatrixXcd m(1, 1);
  m(0, 0) = a;
  return decompose_matrix(m);
}

}  // namespace

TEST_CASE("main condition at p=2 reduces to the real part") {
  const Exponent two = make_exponent(2.0);
  const Verdict v = check_main_condition(decompose_matrix(Eigen::MatrixXcd::Identity(2, 2)), two);
  CHECK(v.status == Status::ProvenDissipative);
  CHECK(v.margin == doctest::Approx(1.0));
}

TEST_CASE("main condition on the skew-coupled matrix is necessary-only") {
  for (double p : {2.0, 3.0, 7.5}) {
    const Verdict v = check_main_condition(gamma_matrix(2.5), make_exponent(p));
    CHECK(v.status == Status::Indeterminate);
    CHECK(v.details.at("necessary_holds") == 1.0);
    CHECK(v.margin > 0.0);
  }
}

TEST_CASE("main condition boundary case sits at margin zero") {
  // 1 + 2 sqrt(p-1)/(p-2) i at p = 4
  const Verdict v = check_main_condition(scalar_sample(Complex(1.0, std::sqrt(3.0))),
                                         make_exponent(4.0));
  CHECK(v.status == Status::ProvenDissipative);
  CHECK(std::abs(v.margin) <= 1e-12);
}

TEST_CASE("main condition disproves on a negative real part") {
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  const Verdict v = check_main_condition(decompose_matrix(m), make_exponent(3.0));
  CHECK(v.status == Status::ProvenNotDissipative);
  REQUIRE(v.certificate.has_value());
  // re-evaluating the quadratic form at the witness reproduces the violation
  Eigen::Map<const Eigen::VectorXd> xi(v.certificate->xi.data(), 2);
  CHECK(xi.dot(m.real() * xi) < 0.0);
}

TEST_CASE("quadratic form condition matches the main condition (equivalence oracle)") {
  std::mt19937_64 rng(20240901);
  const Exponent ps[] = {make_exponent(1.3), make_exponent(2.0), make_exponent(4.0),
                         make_exponent(9.0)};
  int checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const MatrixSample A = symmetric_im_sample(rng, n);
    const Exponent& e = ps[trial % 4];
    const Verdict main = check_main_condition(A, e);
    const Verdict quad = check_quadratic_form_condition(A, e);
    if (std::abs(main.margin) < 1e-8 || std::abs(quad.margin) < 1e-8) continue;
    ++checked;
    CHECK(main.status == quad.status);
  }
  CHECK(checked > 300);
}

TEST_CASE("quadratic form boundary coefficient found by bisection matches the sector ratio") {
  // n = 1, A = 1 + i t: the form degenerates exactly at t* = 1/sector_ratio.
  const Exponent e = make_exponent(4.0);
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Verdict v = check_quadratic_form_condition(scalar_sample(Complex(1.0, mid)), e);
    (v.margin >= 0 ? lo : hi) = mid;
  }
  const double t_star = 0.5 * (lo + hi);
  const Verdict at_boundary = check_main_condition(scalar_sample(Complex(1.0, t_star)), e);
  CHECK(std::abs(at_boundary.margin) <= 1e-8);
  CHECK(t_star == doctest::Approx(1.0 / e.sector_ratio()).epsilon(1e-8));
}

TEST_CASE("polynomial condition without lower-order terms matches the quadratic form") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixSample A = symmetric_im_sample(rng, 2);
    const Exponent e = make_exponent(3.0);
    ScalarPoint pt;
    pt.A = A;
    pt.has_divergences = true;
    const Verdict poly = check_polynomial_condition(pt, e);
    const Verdict quad = check_quadratic_form_condition(A, e);
    if (std::abs(quad.margin) < 1e-8) continue;
    CHECK((poly.status == Status::SufficientHolds) == (quad.margin > 0));
  }
}

TEST_CASE("polynomial condition fails on the skew-coupled matrix beyond the threshold") {
  const Exponent e = make_exponent(4.0);  // 4/(pp') = 3/4
  ScalarPoint pt;
  pt.A = gamma_matrix(1.2);  // gamma^2 = 1.44 > 3/4
  pt.has_divergences = true;
  const Verdict v = check_polynomial_condition(pt, e);
  CHECK(v.status == Status::Indeterminate);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->value < 0.0);

  // below the threshold the sufficient condition holds
  ScalarPoint ok;
  ok.A = gamma_matrix(0.5);  // 0.25 < 3/4
  ok.has_divergences = true;
  CHECK(check_polynomial_condition(ok, e).status == Status::SufficientHolds);
}

TEST_CASE("polynomial condition on the drift example is unbounded below") {
  const double p = 4.0;
  const Exponent e = make_exponent(p);
  ScalarPoint pt;
  pt.A = scalar_sample(Complex(1.0, 2.0 * std::sqrt(p - 1.0) / (p - 2.0)));
  Eigen::VectorXcd b(1);
  b << Complex(0, 2);
  pt.b = b;
  pt.a = Complex(-1, 0);
  pt.has_divergences = true;  // constant coefficients, divergence zero
  const Verdict v = check_polynomial_condition(pt, e);
  CHECK(v.status == Status::Indeterminate);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->value < 0.0);
}

TEST_CASE("polynomial condition needs divergence fields with drift terms") {
  ScalarPoint pt;
  pt.A = scalar_sample(Complex(1, 0));
  Eigen::VectorXcd b(1);
  b << Complex(0, 2);
  pt.b = b;
  pt.has_divergences = false;
  CHECK_THROWS_AS(check_polynomial_condition(pt, make_exponent(3.0)), ConfigError);
}

TEST_CASE("constant-coefficient checker certifies the drift example") {
  const double p = 4.0;
  Eigen::MatrixXcd A(1, 1);
  A(0, 0) = Complex(1.0, std::sqrt(3.0));
  Eigen::VectorXcd b(1);
  b << Complex(0, 2);
  const Verdict v = check_constant_coefficients(A, b, Complex(-1, 0), make_exponent(p));
  CHECK(v.status == Status::ProvenDissipative);
  CHECK(std::abs(v.details.at("v1_margin")) <= 1e-10);
  CHECK(std::abs(v.details.at("zeroth_margin")) <= 1e-10);
  CHECK(v.details.at("corollary_agrees") == 1.0);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->xi[0] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("constant-coefficient checker with real drift reduces to the sector test") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXcd b(2);
  b << Complex(3, 0), Complex(-1, 0);
  const Verdict v = check_constant_coefficients(A, b, Complex(0, 0), make_exponent(3.0));
  CHECK(v.status == Status::ProvenDissipative);
  REQUIRE(v.certificate.has_value());
  CHECK(std::abs(v.certificate->xi[0]) <= 1e-12);
  CHECK(std::abs(v.certificate->xi[1]) <= 1e-12);
}

TEST_CASE("constant-coefficient checker disproves an imaginary drift with zero potential") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2, 2);
  Eigen::VectorXcd b(2);
  b << Complex(0, 2), Complex(0, 0);
  const Verdict v = check_constant_coefficients(A, b, Complex(0, 0), make_exponent(4.0));
  CHECK(v.status == Status::ProvenNotDissipative);
  // corollary route: 4 Re a = 0 > -<(Re A)^-1 Im b, Im b> = -4
  CHECK(v.details.at("corollary_margin") == doctest::Approx(-1.0));
}

TEST_CASE("necessary real-part condition") {
  CHECK(check_necessary_repart(decompose_matrix(Eigen::MatrixXcd::Identity(3, 3))).status ==
        Status::Indeterminate);
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(-1, 0);
  const Verdict v = check_necessary_repart(decompose_matrix(m));
  CHECK(v.status == Status::NecessaryFails);
  REQUIRE(v.certificate.has_value());
  CHECK(std::abs(v.certificate->xi[1]) == doctest::Approx(1.0));
  for (double gamma : {0.1, 1.0, 10.0}) {
    CHECK(check_necessary_repart(gamma_matrix(gamma)).status == Status::Indeterminate);
  }
}

TEST_CASE("field check: constant field equals the single-point verdict") {
  OperatorSpec spec = make_gamma_spec(0.4);
  const Exponent e = make_exponent(4.0);
  const Verdict field = check_field(spec, e, "main");
  const Verdict point = check_main_condition(decompose_matrix(spec.A[0]), e);
  CHECK(field.status == point.status);
  CHECK(field.margin == doctest::Approx(point.margin));
}

TEST_CASE("field check aggregates the worst sample") {
  OperatorSpec spec;
  spec.kind = OperatorKind::Scalar;
  spec.n = 1;
  spec.coefficient_class = CoefficientClass::SmoothSampled;
  for (double re : {1.0, 2.0, -0.5, 3.0}) {
    Eigen::MatrixXcd A(1, 1);
    A(0, 0) = Complex(re, 0.0);
    spec.A.push_back(A);
  }
  const Verdict v = check_field(spec, make_exponent(2.0), "main");
  CHECK(v.status == Status::ProvenNotDissipative);
  CHECK(v.details.at("worst_sample") == 2.0);
  REQUIRE(v.certificate.has_value());
  CHECK(v.certificate->sample_index == 2);
}

TEST_CASE("field check on an oscillating symmetric-imaginary field at p=2") {
  OperatorSpec spec;
  spec.kind = OperatorKind::Scalar;
  spec.n = 2;
  spec.coefficient_class = CoefficientClass::SmoothSampled;
  for (int i = 0; i <= 20; ++i) {
    const double s = std::sin(0.3 * i);
    Eigen::MatrixXcd A(2, 2);
    A << Complex(1, 0), Complex(0, s), Complex(0, s), Complex(1, 0);
    spec.A.push_back(A);
  }
  const Verdict v = check_field(spec, make_exponent(2.0), "main");
  CHECK(v.status == Status::ProvenDissipative);
  CHECK(v.margin == doctest::Approx(1.0));
}

TEST_CASE("duality: verdicts and margins agree under p <-> p'") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> up(1.05, 9.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const MatrixSample A = symmetric_im_sample(rng, n);
    const Exponent e = make_exponent(up(rng));
    const Verdict a = check_main_condition(A, e);
    const Verdict b = check_main_condition(A, e.dual());
    CHECK(a.status == b.status);
    CHECK(a.margin == doctest::Approx(b.margin).epsilon(1e-12));
    const Verdict qa = check_quadratic_form_condition(A, e);
    const Verdict qb = check_quadratic_form_condition(A, e.dual());
    CHECK(qa.status == qb.status);
    CHECK(qa.margin == doctest::Approx(qb.margin).epsilon(1e-12));
  }
}

TEST_CASE("monotonicity: holding at p implies holding between p and p'") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> up(2.2, 8.0);
  std::uniform_real_distribution<double> ut(0.0, 1.0);
  int spot = 0;
  for (int trial = 0; trial < 200 && spot < 60; ++trial) {
    // bias toward a dominant real part so that a decent fraction holds
    MatrixSample A = symmetric_im_sample(rng, 2);
    A = decompose_matrix(A.entries() + 2.5 * Eigen::MatrixXcd::Identity(2, 2));
    const double p = up(rng);
    const Exponent e = make_exponent(p);
    if (check_main_condition(A, e).margin < 1e-6) continue;
    ++spot;
    const double q = 2.0 + ut(rng) * (p - 2.0);
    CHECK(check_main_condition(A, make_exponent(q)).margin >= -1e-9);
  }
  CHECK(spot >= 30);
}

TEST_CASE("scaling: margins scale linearly with the matrix") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const MatrixSample A = symmetric_im_sample(rng, 3);
    const double c = 0.25 + (trial % 7);
    const MatrixSample cA = decompose_matrix(c * A.entries());
    const Exponent e = make_exponent(3.5);
    const Verdict v1 = check_main_condition(A, e);
    const Verdict v2 = check_main_condition(cA, e);
    CHECK(v1.status == v2.status);
    CHECK(v2.margin == doctest::Approx(c * v1.margin).epsilon(1e-10));
    const Verdict q1 = check_quadratic_form_condition(A, e);
    const Verdict q2 = check_quadratic_form_condition(cA, e);
    CHECK(q2.margin == doctest::Approx(c * q1.margin).epsilon(1e-10));
  }
}

TEST_CASE("best-effort alpha-beta search never weakens the default") {
  ScalarPoint pt;
  pt.A = scalar_sample(Complex(1.0, 0.2));
  Eigen::VectorXcd b(1);
  b << Complex(0.5, 0);
  pt.b = b;
  pt.has_divergences = true;
  const Exponent e = make_exponent(3.0);
  const Verdict base = check_polynomial_condition(pt, e);
  const Verdict best = check_polynomial_best_effort(pt, e, {}, 5, 2.0);
  if (base.status == Status::SufficientHolds) {
    CHECK(best.status == Status::SufficientHolds);
  }
  CHECK(best.margin >= base.margin - 1e-12);
}
