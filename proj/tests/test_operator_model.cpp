#include <doctest.h>

#include <random>

#include "dissip/errors.hpp"
#include "dissip/exponent.hpp"
#include "dissip/grid_function.hpp"
#include "dissip/json_io.hpp"
#include "dissip/matrix_sample.hpp"

using namespace dissip;

namespace {

Eigen::MatrixXcd random_complex_matrix(std::mt19937_64& rng, int n, double scale = 2.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
  }
  return m;
}

}  // namespace

TEST_CASE("exponent p=2 special values") {
  const Exponent e = make_exponent(2.0);
  CHECK(e.conjugate() == doctest::Approx(2.0));
  CHECK(e.cpp() == doctest::Approx(1.0));
  CHECK(e.cp() == doctest::Approx(0.0));
  CHECK(e.sector_ratio() == 0.0);
  CHECK(e.is_two());
}

TEST_CASE("exponent p=4 derived constants") {
  const Exponent e = make_exponent(4.0);
  CHECK(e.conjugate() == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  // 4 / (4 * 4/3) = 3/4
  CHECK(e.cpp() == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("exponent rejects the boundary and junk") {
  CHECK_THROWS_AS(make_exponent(1.0), DomainError);
  CHECK_THROWS_AS(make_exponent(0.5), DomainError);
  CHECK_THROWS_AS(make_exponent(std::numeric_limits<double>::infinity()), DomainError);
  CHECK_THROWS_AS(make_exponent(std::nan("")), DomainError);
}

TEST_CASE("exponent duality invariants over random p") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> up(1.0 + 1e-3, 10.0);
  for (int i = 0; i < 500; ++i) {
    const double p = up(rng);
    const Exponent e = make_exponent(p);
    const Exponent d = e.dual();
    CHECK(d.conjugate() == doctest::Approx(p).epsilon(1e-14));
    CHECK(e.cpp() + e.cp() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(d.cpp() == doctest::Approx(e.cpp()).epsilon(1e-13));
    CHECK(d.sector_ratio() == doctest::Approx(e.sector_ratio()).epsilon(1e-13));
  }
}

TEST_CASE("decompose identity and pure-imaginary symmetric") {
  const MatrixSample id = decompose_matrix(Eigen::MatrixXcd::Identity(2, 2));
  CHECK(id.re_sym().isApprox(Eigen::MatrixXd::Identity(2, 2)));
  CHECK(id.im().cwiseAbs().maxCoeff() == 0.0);
  CHECK(id.im_symmetric());

  Eigen::MatrixXcd m(2, 2);
  m << Complex(0, 0), Complex(0, 1), Complex(0, 1), Complex(0, 0);
  const MatrixSample s = decompose_matrix(m);
  Eigen::MatrixXd want(2, 2);
  want << 0, 1, 1, 0;
  CHECK(s.im_sym().isApprox(want));
  CHECK(s.im_skew().cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.im_symmetric());
}

TEST_CASE("decompose the rotation-coupled matrix") {
  const double gamma = 1.2;
  Eigen::MatrixXcd m(2, 2);
  m << Complex(1, 0), Complex(0, gamma), Complex(0, -gamma), Complex(1, 0);
  const MatrixSample s = decompose_matrix(m);
  CHECK(s.im_sym().cwiseAbs().maxCoeff() == 0.0);
  Eigen::MatrixXd skew(2, 2);
  skew << 0, gamma, -gamma, 0;
  CHECK(s.im_skew().isApprox(skew));
  CHECK_FALSE(s.im_symmetric());
}

TEST_CASE("decomposition invariants on random matrices") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Eigen::MatrixXcd m = random_complex_matrix(rng, n);
    const MatrixSample s = decompose_matrix(m);
    CHECK((s.im_sym() + s.im_skew() - s.im()).cwiseAbs().maxCoeff() <= 1e-15);
    // re-assembly: raw real/imag components reproduce the input exactly
    const Eigen::MatrixXcd back =
        m.real().cast<Complex>() + Complex(0, 1) * s.im().cast<Complex>();
    CHECK((back - m).cwiseAbs().maxCoeff() <= 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()));
    // skewness: <im_skew xi, xi> = 0
    Eigen::VectorXd xi(n);
    for (int i = 0; i < n; ++i) xi[i] = u(rng);
    CHECK(std::abs(xi.dot(s.im_skew() * xi)) <= 1e-13 * (1.0 + xi.squaredNorm()));
  }
}

TEST_CASE("decompose rejects non-finite entries") {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(2, 2);
  m(0, 1) = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
  CHECK_THROWS_AS(decompose_matrix(m), DomainError);
}

TEST_CASE("grid function construction guards") {
  Eigen::VectorXd origin(1);
  origin << -1.0;
  CHECK_THROWS_AS(GridFunction::zeros(1, 1, origin, 0.0, {5}, 1), DomainError);
  CHECK_THROWS_AS(GridFunction::zeros(1, 1, origin, 0.5, {2}, 1), DomainError);
  CHECK_THROWS_AS(GridFunction::zeros(1, 1, origin, 0.5, {5}, 0), DomainError);

  // support touching the margin layer is rejected
  std::vector<Complex> vals(5, Complex(0, 0));
  vals[0] = Complex(1, 0);
  CHECK_THROWS_AS(GridFunction(1, 1, origin, 0.5, {5}, 1, vals), DomainError);
}

TEST_CASE("grid sample zeroes the margin and zero-extends") {
  Eigen::VectorXd origin(1);
  origin << -1.0;
  GridFunction g = GridFunction::sample(1, 1, origin, 0.25, {9}, 1,
                                        [](const Eigen::VectorXd&, int) { return Complex(1, 0); });
  CHECK(g.value(0, 0) == Complex(0, 0));
  CHECK(g.value(0, 8) == Complex(0, 0));
  CHECK(g.value(0, 4) == Complex(1, 0));
  int idx = -1;
  CHECK(g.at(0, &idx) == Complex(0, 0));
  idx = 9;
  CHECK(g.at(0, &idx) == Complex(0, 0));
  // centered difference at the first interior point sees the margin zero
  idx = 1;
  CHECK(g.diff(0, &idx, 0) == (Complex(1, 0) - Complex(0, 0)) / 0.5);
}

TEST_CASE("spec json round trip") {
  OperatorSpec spec;
  spec.id = "round-trip";
  spec.kind = OperatorKind::Scalar;
  spec.n = 2;
  spec.coefficient_class = CoefficientClass::Constant;
  Eigen::MatrixXcd A(2, 2);
  A << Complex(1, 0.5), Complex(0, 1.2), Complex(0, -1.2), Complex(2, 0);
  spec.A.push_back(A);
  Eigen::VectorXcd b(2);
  b << Complex(0, 2), Complex(1, 0);
  spec.b.push_back(b);
  spec.a.push_back(Complex(-1, 0));

  const Json j = spec_to_json(spec);
  const OperatorSpec back = spec_from_json(j);
  CHECK(back.id == spec.id);
  CHECK(back.kind == OperatorKind::Scalar);
  CHECK((back.A[0] - A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.b[0] - b).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.a[0] == spec.a[0]);
}

TEST_CASE("grid function json round trip") {
  Eigen::VectorXd origin(2);
  origin << -1.0, -1.0;
  GridFunction g = GridFunction::sample(2, 1, origin, 0.5, {5, 5}, 1,
                                        [](const Eigen::VectorXd& x, int) {
                                          return Complex(x[0] * x[1], x[0] - x[1]);
                                        });
  const Json j = grid_function_to_json(g);
  const GridFunction back = grid_function_from_json(j);
  CHECK(back.same_grid(g));
  CHECK(back.values() == g.values());
}

TEST_CASE("parse errors carry JSON pointer locations") {
  CHECK_THROWS_AS(spec_from_json(Json::array()), ParseError);
  Json j;
  j["kind"] = "scalar";
  // missing n
  CHECK_THROWS_AS(spec_from_json(j), ParseError);
  j["n"] = 2;
  j["A"] = Json::array({Json::array({Json::array({Json::array({1.0})})})});
  bool caught = false;
  try {
    spec_from_json(j);
  } catch (const ParseError& e) {
    caught = true;
    CHECK(std::string(e.what()).find("/A/0") != std::string::npos);
  }
  CHECK(caught);
}

TEST_CASE("verdict json carries certificates") {
  Verdict v;
  v.status = Status::NecessaryFails;
  v.criterion_id = "necessary-re-part";
  v.margin = -0.5;
  Certificate c;
  c.kind = "eigenvector";
  c.xi = {0.0, 1.0};
  c.value = -0.5;
  v.certificate = c;
  const Json j = verdict_to_json(v);
  CHECK(j["status"] == "necessary-fails");
  CHECK(j["certificate"]["kind"] == "eigenvector");
  CHECK(exit_code_for(v) == 1);
}
