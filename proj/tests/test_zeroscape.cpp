#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qlog/errors.hpp"
#include "qlog/zeroscape.hpp"

using namespace qlog;
using cd = std::complex<double>;

TEST_SUITE("zeroscape") {
  TEST_CASE("classical sine zeros") {
    auto z = find_zeros(FunctionSpec::sin(QParam(1.0)), 10);
    CHECK(z.complete);
    REQUIRE(z.roots.size() == 10);
    for (int k = 0; k < 10; ++k) CHECK(z.roots[k].location.real() == doctest::Approx((k + 1) * std::numbers::pi));
  }

  TEST_CASE("Jackson q > 1 zeros are exact") {
    auto z = find_real_zeros(FunctionSpec::exp(QParam(2.0, Convention::Jackson)), -40, 0, 10);
    REQUIRE(z.roots.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(z.roots[i].location.real() == doctest::Approx(-std::pow(2.0, i + 1)).epsilon(1e-12));
  }

  TEST_CASE("complex pair at q = 0.35 and Schwarz symmetry") {
    auto z = find_zeros(FunctionSpec::exp(QParam(0.35)), 6);
    CHECK(z.complete);
    bool seen = false;
    for (const auto& r : z.roots) {
      CHECK(r.certified);
      if (std::abs(r.location - cd(-2.8222, 1.969)) < 1e-3) seen = true;
      if (r.kind == RootKind::ConjugatePairUpper) {
        bool mate = false;
        for (const auto& s : z.roots) mate = mate || std::abs(s.location - std::conj(r.location)) < 1e-12;
        CHECK(mate);
      }
    }
    CHECK(seen);
  }

  TEST_CASE("turning points and branch values") {
    auto t = find_real_turning_points(FunctionSpec::exp(QParam(0.35)), -12, 0, 5);
    REQUIRE(t.roots.size() >= 2);
    CHECK(t.roots[0].location.real() == doctest::Approx(-6.3471).epsilon(2e-4));
    CHECK(t.roots[0].branch_value.real() == doctest::Approx(-0.00909587).epsilon(1e-3));
  }

  TEST_CASE("argument principle") {
    const FunctionSpec spec = FunctionSpec::exp(QParam(0.35));
    CHECK(count_roots_in_disk(spec, RootTarget::Zero, 4.0) == 2);
    CHECK(count_roots_in_disk(spec, RootTarget::Zero, 6.0) == 3);
    CHECK(winding_number(spec, RootTarget::Zero, cd(-5.19755, 0), 0.1, 0.1) == 1);
    CHECK(winding_number(spec, RootTarget::Zero, cd(-1, 0), 0.1, 0.1) == 0);
  }

  TEST_CASE("collisions") {
    auto c = collision_point(FunctionSpec::exp(QParam(0.5)), RootTarget::Zero);
    REQUIRE(c.found);
    CHECK(c.q_star == doctest::Approx(0.1407).epsilon(1e-3));
    auto j = collision_point(FunctionSpec::exp(QParam(1.09, Convention::Jackson)), RootTarget::Zero);
    CHECK_FALSE(j.found);
  }

  TEST_CASE("continuation") {
    const FunctionSpec spec = FunctionSpec::exp(QParam(0.10));
    auto z = find_real_zeros(spec, -10, 0, 2);
    REQUIRE(z.roots.size() == 2);
    auto tr = continue_in_q(spec, RootTarget::Zero, 0.10, 0.16, 30, {z.roots[0].location, z.roots[1].location});
    CHECK(tr.events.size() == 1);
    CHECK(tr.roots.back()[0].imag() != 0.0);
    CHECK_THROWS_AS(continue_in_q(spec, RootTarget::Zero, 0.5, 1.5, 10, {z.roots[0].location}), DomainError);
  }

  TEST_CASE("contours") {
    auto cs = extract_contours(FunctionSpec::exp(QParam(1.0)), {-1, 1, -4, 4}, 64, ContourField::ImZero);
    // Im e^z = 0 on y = 0, +-pi
    int hits = 0;
    for (const auto& line : cs.polylines)
      if (std::abs(line.front().imag() - std::numbers::pi) < 0.02 && std::abs(line.back().imag() - std::numbers::pi) < 0.02)
        ++hits;
    CHECK(hits >= 1);
    CHECK(cs.polylines.size() == cs.w_images.size());
    for (std::size_t i = 0; i < cs.polylines.size(); ++i)
      for (const auto& w : cs.w_images[i]) CHECK(std::abs(w.imag()) <= cs.tolerance + 1e-12);
    CHECK_THROWS_AS(extract_contours(FunctionSpec::exp(QParam(1.0)), {1, -1, -1, 1}, 64, ContourField::ImZero),
                    std::invalid_argument);
  }
}
