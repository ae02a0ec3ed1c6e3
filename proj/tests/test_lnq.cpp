#include <doctest.h>

#include <cmath>

#include "qlog/lnq.hpp"

using namespace qlog;
using cd = std::complex<double>;

TEST_SUITE("lnq") {
  TEST_CASE("leading coefficients") {
    const QParam qp(0.5);
    auto c = lnq_coefficients(8, qp);
    const double i2 = 1 / bracket_factorial(2, qp), i3 = 1 / bracket_factorial(3, qp);
    CHECK(c.at(1) == doctest::Approx(1.0));
    CHECK(c.at(2) == doctest::Approx(-i2).epsilon(1e-14));
    CHECK(c.at(3) == doctest::Approx(-(i3 - 2 * i2 * i2)).epsilon(1e-13));
    CHECK(c.at(0) == 0.0);
    CHECK(c.at(99) == 0.0);
    CHECK(c.last_degree() == 8);
  }

  TEST_CASE("classical limit is log(1+w)") {
    auto c = lnq_coefficients(12, QParam(1.0));
    for (int n = 1; n <= 12; ++n) CHECK(c.at(n) == doctest::Approx((n % 2 ? 1.0 : -1.0) / n).epsilon(1e-14));
    CHECK(std::abs(lnq_eval(0.05, c).value - std::log(1.05)) < 1e-15);
  }

  TEST_CASE("recursive and reversion agree") {
    for (double q : {0.2, 0.6, 2.5}) {
      auto a = lnq_coefficients(18, QParam(q), LnqMethod::Recursive);
      auto b = lnq_coefficients(18, QParam(q), LnqMethod::Reversion);
      for (int n = 1; n <= 18; ++n) CHECK(a.at(n) == doctest::Approx(b.at(n)).epsilon(1e-12));
    }
  }

  TEST_CASE("q-derivative series") {
    auto d = lnq_qderivative_coeffs(lnq_coefficients(6, QParam(0.3)));
    CHECK(d.first_degree == 0);
    CHECK(d.at(0) == doctest::Approx(1.0));
    CHECK(d.at(1) == doctest::Approx(-1.0));
  }

  TEST_CASE("inverse of e_q") {
    const QParam qp(0.4);
    auto c = lnq_coefficients(30, qp);
    const cd w(0.03, -0.06);
    const cd z = lnq_eval(w, c).value;
    CHECK(std::abs(eval_series(FunctionSpec::exp(qp), z, 1e-18).value - (1.0 + w)) < 1e-12);
  }

  TEST_CASE("small q") {
    // -1/[2]! = -1/(q^1/2 + q^-1/2) vanishes like sqrt(q)
    for (double q : {1e-4, 1e-6, 1e-8}) {
      auto c = lnq_coefficients(4, QParam(q));
      CHECK(c.at(2) == doctest::Approx(-1 / (std::sqrt(q) + 1 / std::sqrt(q))));
    }
    CHECK(std::abs(lnq_coefficients(4, QParam(1e-8)).at(2)) < 1e-3);
  }
}
