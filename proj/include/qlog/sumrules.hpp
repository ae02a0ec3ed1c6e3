#pragma once

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qlog/lnq.hpp"
#include "qlog/qnum.hpp"

namespace qlog {

enum class SumFamily { Exp, Jackson, Derivative, Integral, Cos, Sin };

// Series is the O(N^2) power-series logarithm; Recursive and Direct are the
// composition-sum formulas; ZeroPartialSum sums over located zeros.
enum class SigmaMethod { Series, Recursive, Direct, ClosedForm, ZeroPartialSum };

struct SumRule {
  SumFamily family = SumFamily::Exp;
  int r = 0;
  int n = 0;
  double value = 0.0;
  SigmaMethod method = SigmaMethod::Series;
  QParam qp;
  double error_estimate = 0.0;
  int zeros_used = 0;
};

// Convention actually used for a family (the Jackson family forces Jackson brackets).
QParam family_qparam(SumFamily family, const QParam& qp);
FunctionSpec family_spec(SumFamily family, int r, const QParam& qp);

// Degree in the expansion variable (z, or z^2 for Cos/Sin) belonging to
// sum-rule index n; throws on a parity violation.
int sigma_degree(SumFamily family, int n);

// Normalised Maclaurin coefficients L_0 = 1, L_1..L_N of the family in its
// expansion variable.
std::vector<double> l_coefficients(SumFamily family, int r, int N, const QParam& qp);

SumRule sigma(SumFamily family, int r, int n, const QParam& qp,
              SigmaMethod method = SigmaMethod::Series, int zero_count = 20);

// sigma for degrees 1..N at once (index 0 unused).
std::vector<double> sigma_table(SumFamily family, int r, int N, const QParam& qp,
                                SigmaMethod method = SigmaMethod::Series);

// Coefficients of b(t): f = prefactor * exp(b). Series allows N <= 200,
// Recursive/Direct N <= 24.
CoeffList b_series_coeffs(SumFamily family, int r, int N, const QParam& qp,
                          SigmaMethod method = SigmaMethod::Series);

SeriesValue exp_b_eval(SumFamily family, int r, std::complex<double> z, int N, const QParam& qp);

// 1/[n]! rebuilt from sigma_1..sigma_n by the composition pattern.
double bracket_reciprocal_from_sigma(int n, const QParam& qp);

// Maclaurin coefficients L_1..L_N recovered from the sigma values by
// exponentiating b, in extended precision (index 0 holds L_0 = 1).
std::vector<double> reconstruct_l_coefficients(SumFamily family, int r, int N, const QParam& qp);

enum class BernoulliVariant { Plain, Tilde };

double q_bernoulli(int n, const QParam& qp, BernoulliVariant variant);

struct ZetaValue {
  double value = 0.0;
  double tail_estimate = 0.0;
  int zeros_used = 0;
};

// pi^-p zeta_q(p) from the first M positive zeros of sin_q (Plain) or
// cos_q (Tilde, divided by 2^p - 1).
ZetaValue q_zeta(double p, const QParam& qp, BernoulliVariant variant, int M,
                 double max_tail = std::numeric_limits<double>::infinity());

// sum_{n<=N} z^n / (n (1 - q^n)), 0 < q < 1.
SeriesValue q_dilog(std::complex<double> z, double q, int N);

}  // namespace qlog
