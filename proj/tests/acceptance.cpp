// Acceptance checks, one line per criterion:
//   qlog_acceptance            run all
//   qlog_acceptance --criterion N
// Exit status is nonzero if any selected criterion fails.

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlog/combinatorics.hpp"
#include "qlog/lnq.hpp"
#include "qlog/qnum.hpp"
#include "qlog/sumrules.hpp"
#include "qlog/zeroscape.hpp"

using namespace qlog;
using cd = std::complex<double>;

namespace {

struct Report {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      why << " [" << what << "]";
    }
  }
  void near(double got, double want, double tol, const std::string& what) {
    const bool pass = std::isfinite(got) && std::abs(got - want) <= tol;
    if (!pass) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: got %.10g want %.10g tol %.1e", what.c_str(), got, want, tol);
      expect(false, buf);
    }
  }
  void rel(double got, double want, double tol, const std::string& what) {
    const double scale = std::max(std::abs(want), 1e-300);
    const bool pass = std::isfinite(got) && std::abs(got - want) <= tol * scale;
    if (!pass) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "%s: got %.15g want %.15g rel %.1e", what.c_str(), got, want, tol);
      expect(false, buf);
    }
  }
};

const cd* nearest(const std::vector<cd>& zs, cd t) {
  const cd* best = nullptr;
  for (const auto& z : zs)
    if (!best || std::abs(z - t) < std::abs(*best - t)) best = &z;
  return best;
}

// 1. Jackson exact zeros
void c1(Report& r) {
  const QParam qp(1.09, Convention::Jackson);
  auto z = find_real_zeros(FunctionSpec::exp(qp), -20, 0, 10);
  const double listed[4] = {-12.1111, -13.2011, -14.3892, -15.6842};
  r.expect(z.roots.size() >= 4, "fewer than 4 zeros in [-20, 0]");
  for (std::size_t i = 0; i < 4 && i < z.roots.size(); ++i) {
    const double x = z.roots[i].location.real();
    r.near(x, listed[i], 1e-3, "zero " + std::to_string(i + 1));
    const double exact = std::pow(1.09, static_cast<double>(i + 1)) / (1 - 1.09);
    r.near(x, exact, 1e-10 * std::max(1.0, std::abs(exact)), "q^i/(1-q), i=" + std::to_string(i + 1));
  }
  auto z2 = find_real_zeros(FunctionSpec::exp(QParam(2.0, Convention::Jackson)), -40, 0, 10);
  for (std::size_t i = 0; i < z2.roots.size(); ++i)
    r.near(z2.roots[i].location.real(), -std::pow(2.0, static_cast<double>(i + 1)), 1e-10,
           "q=2 zero " + std::to_string(i + 1));
}

// 2. Symmetric zero fixtures
void c2(Report& r) {
  auto pair = [&](double q, cd want, double tol) {
    auto z = find_complex_zeros(FunctionSpec::exp(QParam(q)), 1);
    std::vector<cd> locs;
    for (const auto& x : z.roots) locs.push_back(x.location);
    const cd* got = nearest(locs, want);
    r.expect(got != nullptr, "no complex zero at q=" + std::to_string(q));
    if (!got) return;
    r.near(got->real(), want.real(), tol, "Re mu_A q=" + std::to_string(q));
    r.near(got->imag(), want.imag(), tol, "Im mu_A q=" + std::to_string(q));
  };
  pair(0.35, cd(-2.8222, 1.969), 1e-3);
  auto real = find_real_zeros(FunctionSpec::exp(QParam(0.35)), -6, 0, 5);
  r.expect(real.roots.size() == 1, "q=0.35 expects one real zero in [-6, 0]");
  if (!real.roots.empty()) r.near(real.roots[0].location.real(), -5.19755, 1e-4, "mu_3 q=0.35");
  pair(0.22, cd(-2.51, 0.87), 2e-2);
}

// 3. Turning points and branch values
void c3(Report& r) {
  auto t = find_turning_points(FunctionSpec::exp(QParam(0.35)), 4);
  const TurningPointRecord* a = nullptr;
  std::vector<const TurningPointRecord*> real;
  for (const auto& x : t.roots) {
    if (x.kind == RootKind::ConjugatePairUpper && !a) a = &x;
    if (x.kind == RootKind::RealAxis) real.push_back(&x);
  }
  r.expect(a != nullptr, "no complex turning point");
  if (a) {
    r.near(a->location.real(), -3.5434, 1e-3, "Re tau_A");
    r.near(a->location.imag(), 1.32945, 1e-3, "Im tau_A");
    r.near(a->branch_value.real(), 0.0222415, 1e-4, "Re b_A");
    r.near(a->branch_value.imag(), 0.01879, 1e-4, "Im b_A");
  }
  const double tau[2] = {-6.3471, -10.7028}, b[2] = {-0.00909587, 0.087536};
  r.expect(real.size() >= 2, "fewer than 2 real turning points");
  for (std::size_t i = 0; i < 2 && i < real.size(); ++i) {
    r.near(real[i]->location.real(), tau[i], 1e-3, "tau real " + std::to_string(i + 1));
    r.rel(real[i]->branch_value.real(), b[i], 1e-3, "b real " + std::to_string(i + 1));
  }
}

// 4. Collision points
void c4(Report& r) {
  auto z = collision_point(FunctionSpec::exp(QParam(0.5)), RootTarget::Zero, 1);
  r.expect(z.found, "zero collision not found");
  if (z.found) r.near(z.q_star, 0.14, 0.01, "q_z*");
  auto t = collision_point(FunctionSpec::exp(QParam(0.5)), RootTarget::Turning, 1);
  r.expect(t.found, "turning collision not found");
  if (t.found) r.near(t.q_star, 0.25, 0.01, "q_tau*");
}

// 5. Recursive vs Direct, Jackson closed form
void c5(Report& r) {
  struct Fam {
    SumFamily f;
    int r;
    const char* name;
  };
  const Fam fams[] = {{SumFamily::Exp, 0, "exp"},          {SumFamily::Derivative, 1, "deriv1"},
                      {SumFamily::Derivative, 2, "deriv2"}, {SumFamily::Integral, 1, "int1"},
                      {SumFamily::Integral, 2, "int2"},     {SumFamily::Cos, 0, "cos"},
                      {SumFamily::Sin, 0, "sin"}};
  auto valid = [](SumFamily f, int n) {
    if (f == SumFamily::Cos) return n >= 2 && n % 2 == 0;
    if (f == SumFamily::Sin) return n >= 3 && n % 2 == 1;
    return n >= 1;
  };
  auto compare = [&](SumFamily f, int rr, const QParam& qp, const std::string& tag) {
    for (int n = 1; n <= 12; ++n) {
      if (!valid(f, n)) continue;
      const double a = sigma(f, rr, n, qp, SigmaMethod::Recursive).value;
      const double b = sigma(f, rr, n, qp, SigmaMethod::Direct).value;
      r.rel(a, b, 1e-12, tag + " n=" + std::to_string(n));
    }
  };
  for (double q : {0.22, 0.35, 0.5, 0.9})
    for (const auto& f : fams) compare(f.f, f.r, QParam(q), std::string(f.name) + " q=" + std::to_string(q));
  for (double q : {1.09, 2.0}) {
    const QParam qp(q, Convention::Jackson);
    compare(SumFamily::Jackson, 0, qp, "jackson q=" + std::to_string(q));
    for (const auto& f : fams) compare(f.f, f.r, qp, std::string(f.name) + " J q=" + std::to_string(q));
    for (int n = 1; n <= 12; ++n)
      r.rel(sigma(SumFamily::Jackson, 0, n, qp, SigmaMethod::Recursive).value,
            sigma(SumFamily::Jackson, 0, n, qp, SigmaMethod::ClosedForm).value, 1e-12,
            "closed form q=" + std::to_string(q) + " n=" + std::to_string(n));
  }
}

// 6. Zero partial sums against the recursion
void c6(Report& r) {
  auto run = [&](SumFamily f, const QParam& qp, const std::string& tag) {
    for (int n = 2; n <= 4; ++n) {
      const double exact = sigma(f, 0, n, qp, SigmaMethod::Recursive).value;
      const SumRule part = sigma(f, 0, n, qp, SigmaMethod::ZeroPartialSum, 20);
      r.expect(part.zeros_used == 20, tag + " used " + std::to_string(part.zeros_used) + " zeros");
      r.near(part.value, exact, part.error_estimate, tag + " n=" + std::to_string(n) + " within tail");
    }
  };
  run(SumFamily::Exp, QParam(0.5), "e q=0.5");
  run(SumFamily::Jackson, QParam(1.09, Convention::Jackson), "E q=1.09");
}

// 7. Limits
void c7(Report& r) {
  for (int n = 2; n <= 8; ++n)
    r.near(sigma(SumFamily::Exp, 0, n, QParam(1.0)).value, 0.0, 1e-12, "q=1 n=" + std::to_string(n));
  for (int n = 1; n <= 6; ++n)
    r.near(sigma(SumFamily::Exp, 0, n, QParam(1e-4)).value, n % 2 ? -1.0 : 1.0, 1e-3,
           "q=1e-4 n=" + std::to_string(n));
  r.near(sigma(SumFamily::Cos, 0, 2, QParam(1.0)).value, 0.5, 1e-12, "sigma_2^c");
  r.near(sigma(SumFamily::Cos, 0, 4, QParam(1.0)).value, 1.0 / 6.0, 1e-12, "sigma_4^c");
  r.near(sigma(SumFamily::Sin, 0, 3, QParam(1.0)).value, 1.0 / 6.0, 1e-12, "sigma_3^s");
}

// 8. e_q(ln_q(1+w)) round trip
void c8(Report& r) {
  std::mt19937_64 rng(20261017);
  std::uniform_real_distribution<double> radius(0.0, 0.1), angle(0.0, 2 * M_PI);
  const QParam qps[] = {QParam(0.22), QParam(0.5), QParam(0.9), QParam(1.09, Convention::Jackson)};
  for (const auto& qp : qps) {
    const CoeffList c = lnq_coefficients(30, qp);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
      const cd w = std::polar(radius(rng), angle(rng));
      const cd z = lnq_eval(w, c).value;
      const cd back = eval_series(FunctionSpec::exp(qp), z, 1e-18).value;
      worst = std::max(worst, std::abs(back - (1.0 + w)));
    }
    r.near(worst, 0.0, 1e-10, "round trip q=" + std::to_string(qp.q));
  }
  const CoeffList c1 = lnq_coefficients(12, QParam(1.0));
  for (int n = 1; n <= 12; ++n)
    r.near(c1.at(n), (n % 2 ? 1.0 : -1.0) / n, 1e-12, "c_" + std::to_string(n) + " at q=1");
}

// 9. Reconstruction identities at q = 0.5
void c9(Report& r) {
  const QParam qp(0.5);
  for (int n = 2; n <= 20; ++n)
    r.rel(bracket_reciprocal_from_sigma(n, qp), 1.0 / bracket_factorial(n, qp), 1e-12,
          "1/[" + std::to_string(n) + "]!");
  struct Fam {
    SumFamily f;
    int r;
    int N;
    const char* name;
  };
  const Fam fams[] = {{SumFamily::Exp, 0, 20, "exp"},        {SumFamily::Jackson, 0, 20, "jackson"},
                      {SumFamily::Derivative, 1, 20, "deriv1"}, {SumFamily::Derivative, 2, 20, "deriv2"},
                      {SumFamily::Integral, 1, 20, "int1"},    {SumFamily::Integral, 2, 20, "int2"},
                      {SumFamily::Cos, 0, 10, "cos"},          {SumFamily::Sin, 0, 10, "sin"}};
  for (const auto& f : fams) {
    const auto want = l_coefficients(f.f, f.r, f.N, qp);
    const auto got = reconstruct_l_coefficients(f.f, f.r, f.N, qp);
    for (int k = 1; k <= f.N; ++k)
      r.rel(got[k], want[k], 1e-12, std::string(f.name) + " L_" + std::to_string(k));
  }
}

// 10. Dilogarithm limit
void c10(Report& r) {
  double li2 = 0;
  for (int n = 1; n <= 200; ++n) li2 += std::pow(0.5, n) / (static_cast<double>(n) * n);
  const double q = 0.999;
  const double got = (1 - q) * q_dilog(0.5, q, 5000).value.real();
  r.near(got, li2, 1e-2, "(1-q) Li2(0.5; 0.999)");
}

// 11. Properties
void c11(Report& r) {
  for (int n = 1; n <= 20; ++n)
    for (int l = 1; l <= n; ++l) {
      std::uint64_t k = 0;
      CompositionStream s(n, l);
      while (s.next()) ++k;
      r.expect(k == composition_count(n, l) && k == composition_count(n, l),
               "composition count n=" + std::to_string(n) + " l=" + std::to_string(l));
      // C(n-1, l-1) via the multiplicative formula
      std::uint64_t c = 1;
      for (int i = 1; i <= l - 1; ++i) c = c * static_cast<std::uint64_t>(n - l + i) / static_cast<std::uint64_t>(i);
      r.expect(k == c, "C(n-1,l-1) n=" + std::to_string(n) + " l=" + std::to_string(l));
    }

  // Schwarz symmetry and winding certificates of complex roots
  auto conj_check = [&](const std::vector<cd>& locs, const std::string& tag) {
    for (const auto& z : locs) {
      if (z.imag() == 0.0) continue;
      const cd* m = nearest(locs, std::conj(z));
      r.expect(m && std::abs(*m - std::conj(z)) <= 1e-12 * std::max(1.0, std::abs(z)), tag + " conjugate missing");
    }
  };
  for (double q : {0.22, 0.35, 0.5}) {
    const FunctionSpec spec = FunctionSpec::exp(QParam(q));
    auto z = find_zeros(spec, 8);
    std::vector<cd> locs;
    for (const auto& x : z.roots) {
      locs.push_back(x.location);
      r.expect(x.certified, "zero not certified q=" + std::to_string(q));
      const double h = 1e-3 * std::max(1.0, std::abs(x.location));
      r.expect(winding_number(spec, RootTarget::Zero, x.location, h, h) == 1,
               "winding != 1 q=" + std::to_string(q));
    }
    conj_check(locs, "zeros q=" + std::to_string(q));
    auto t = find_turning_points(spec, 6);
    locs.clear();
    for (const auto& x : t.roots) {
      locs.push_back(x.location);
      r.expect(x.certified, "turning point not certified q=" + std::to_string(q));
    }
    conj_check(locs, "turning q=" + std::to_string(q));
  }

  // eval_series error against an independent 100-digit direct sum
  using Big = boost::multiprecision::cpp_bin_float_100;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uq(0.2, 0.95), ux(-8.0, 8.0);
  int violations = 0;
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const QParam qp(uq(rng));
    const cd z(ux(rng), ux(rng));
    const auto v = eval_series(FunctionSpec::exp(qp), z, 1e-9);
    Big re = 0, im = 0, pr = 1, pi = 0, fact = 1;
    const Big zr = z.real(), zi = z.imag();
    for (int n = 0; n < 400; ++n) {
      if (n > 0) {
        fact *= bracket_extended(n, qp);
        const Big nr = pr * zr - pi * zi;
        pi = pr * zi + pi * zr;
        pr = nr;
      }
      re += pr / fact;
      im += pi / fact;
    }
    const double err = std::abs(v.value - cd(static_cast<double>(re), static_cast<double>(im)));
    const double bound = v.tail_bound + v.rounding_bound;
    if (!(err <= bound)) ++violations;
    worst = std::max(worst, bound > 0 ? err / bound : err);
  }
  r.expect(violations == 0, std::to_string(violations) + " eval_series samples exceed tail bound (worst ratio " +
                                std::to_string(worst) + ")");
}

const std::vector<std::pair<const char*, std::function<void(Report&)>>> kCriteria = {
    {"Jackson exact zeros", c1},
    {"symmetric zero fixtures", c2},
    {"turning points and branch values", c3},
    {"collision points", c4},
    {"sum-rule method equivalence", c5},
    {"zero partial sums within tail", c6},
    {"limit suite", c7},
    {"ln_q round trip", c8},
    {"reconstruction identities", c9},
    {"dilogarithm limit", c10},
    {"property suite", c11},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);
    else {
      std::fprintf(stderr, "usage: %s [--criterion N]\n", argv[0]);
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::fprintf(stderr, "criterion must be in 1..%zu\n", kCriteria.size());
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    if (only && static_cast<int>(k) + 1 != only) continue;
    Report rep;
    try {
      kCriteria[k].second(rep);
    } catch (const std::exception& e) {
      rep.ok = false;
      rep.why << " [exception: " << e.what() << "]";
    }
    std::printf("%s criterion %zu: %s%s\n", rep.ok ? "PASS" : "FAIL", k + 1, kCriteria[k].first,
                rep.ok ? "" : rep.why.str().c_str());
    failed += rep.ok ? 0 : 1;
  }
  return failed ? 1 : 0;
}
