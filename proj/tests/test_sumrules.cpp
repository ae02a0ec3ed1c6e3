#include <doctest.h>

#include <cmath>

#include "qlog/errors.hpp"
#include "qlog/sumrules.hpp"

using namespace qlog;

TEST_SUITE("sumrules") {
  TEST_CASE("low-order values") {
    CHECK(sigma(SumFamily::Exp, 0, 1, QParam(0.35)).value == doctest::Approx(-1.0));
    CHECK(sigma(SumFamily::Exp, 0, 2, QParam(0.25)).value == doctest::Approx(0.2).epsilon(1e-14));
    const QParam qp(0.35);
    CHECK(sigma(SumFamily::Cos, 0, 2, qp).value == doctest::Approx(1 / bracket_factorial(2, qp)));
    CHECK(sigma(SumFamily::Sin, 0, 3, QParam(1.0)).value == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  }

  TEST_CASE("Jackson closed form") {
    // -(1-q)^n / (1-q^n) at q = 2, n = 3
    const QParam qp(2.0, Convention::Jackson);
    CHECK(sigma(SumFamily::Jackson, 0, 3, qp, SigmaMethod::ClosedForm).value ==
          doctest::Approx(-1.0 / 7.0).epsilon(1e-14));
    // direct sum over the zeros -2^i
    double s = 0;
    for (int i = 1; i < 200; ++i) s += std::pow(-std::pow(2.0, -i), 3);
    CHECK(sigma(SumFamily::Jackson, 0, 3, qp, SigmaMethod::Recursive).value == doctest::Approx(s).epsilon(1e-14));
    CHECK_THROWS_AS(sigma(SumFamily::Jackson, 0, 3, QParam(0.5, Convention::Jackson), SigmaMethod::ClosedForm),
                    DomainError);
    CHECK_THROWS_AS(sigma(SumFamily::Exp, 0, 3, QParam(0.5), SigmaMethod::ClosedForm), std::invalid_argument);
  }

  TEST_CASE("index parity") {
    CHECK_THROWS_AS(sigma(SumFamily::Cos, 0, 3, QParam(0.5)), DomainError);
    CHECK_THROWS_AS(sigma(SumFamily::Sin, 0, 2, QParam(0.5)), DomainError);
    CHECK_THROWS_AS(sigma(SumFamily::Exp, 0, 0, QParam(0.5)), DomainError);
  }

  TEST_CASE("all methods agree") {
    for (double q : {0.3, 0.9}) {
      const QParam qp(q);
      for (int n = 1; n <= 12; ++n) {
        const double s = sigma(SumFamily::Exp, 0, n, qp, SigmaMethod::Series).value;
        CHECK(sigma(SumFamily::Exp, 0, n, qp, SigmaMethod::Recursive).value == doctest::Approx(s).epsilon(1e-11));
        CHECK(sigma(SumFamily::Exp, 0, n, qp, SigmaMethod::Direct).value == doctest::Approx(s).epsilon(1e-11));
      }
    }
  }

  TEST_CASE("classical limits") {
    for (int n = 2; n <= 8; ++n) CHECK(std::abs(sigma(SumFamily::Exp, 0, n, QParam(1.0)).value) < 1e-12);
    CHECK(sigma(SumFamily::Cos, 0, 4, QParam(1.0)).value == doctest::Approx(1.0 / 6.0));
    CHECK(q_bernoulli(1, QParam(1.0), BernoulliVariant::Plain) == doctest::Approx(1.0 / 6.0));
  }

  TEST_CASE("b-series and exp(b)") {
    const QParam qp(0.35);
    auto b = b_series_coeffs(SumFamily::Exp, 0, 60, qp);
    CHECK(b.at(1) == doctest::Approx(1.0));
    CHECK(exp_b_eval(SumFamily::Exp, 0, -1.0, 60, qp).value.real() ==
          doctest::Approx(eval_series(FunctionSpec::exp(qp), -1.0, 1e-18).value.real()).epsilon(1e-10));
    const QParam J(2.0, Convention::Jackson);
    auto bj = b_series_coeffs(SumFamily::Jackson, 0, 6, J);
    for (int n = 1; n <= 6; ++n)
      CHECK(bj.at(n) == doctest::Approx(std::pow(-1.0, n - 1) / (n * bracket(n, J))).epsilon(1e-13));
  }

  TEST_CASE("reconstruction") {
    const QParam qp(0.5);
    for (int n = 2; n <= 12; ++n)
      CHECK(bracket_reciprocal_from_sigma(n, qp) == doctest::Approx(1 / bracket_factorial(n, qp)).epsilon(1e-12));
    auto want = l_coefficients(SumFamily::Sin, 0, 8, qp);
    auto got = reconstruct_l_coefficients(SumFamily::Sin, 0, 8, qp);
    for (int k = 1; k <= 8; ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-12));
    CHECK_THROWS_AS(bracket_reciprocal_from_sigma(30, qp), DomainError);
  }

  TEST_CASE("zero partial sums carry a valid tail") {
    const QParam qp(0.5);
    const double exact = sigma(SumFamily::Exp, 0, 2, qp).value;
    const SumRule part = sigma(SumFamily::Exp, 0, 2, qp, SigmaMethod::ZeroPartialSum, 20);
    CHECK(part.zeros_used == 20);
    CHECK(std::abs(part.value - exact) <= part.error_estimate);
  }

  TEST_CASE("zeta and dilog") {
    // pi^-2 zeta(2) = 1/6 at q = 1, partial sum plus tail covers it
    auto z = q_zeta(2.0, QParam(1.0), BernoulliVariant::Plain, 20);
    CHECK(std::abs(z.value - 1.0 / 6.0) <= z.tail_estimate);
    CHECK_THROWS_AS(q_zeta(1.0, QParam(1.0), BernoulliVariant::Plain, 20), DomainError);
    const double v = q_dilog(0.3, 0.5, 80).value.real();
    double ref = 0;
    for (int n = 1; n <= 80; ++n) ref += std::pow(0.3, n) / (n * (1 - std::pow(0.5, n)));
    CHECK(v == doctest::Approx(ref).epsilon(1e-14));
    CHECK_THROWS_AS(q_dilog(0.3, 1.5, 10), DomainError);
  }
}
