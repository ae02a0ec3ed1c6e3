#pragma once

#include <complex>
#include <string>

#include "qlog/precision.hpp"

namespace qlog {

enum class Convention { Symmetric, Jackson };

// Deformation parameter. For the symmetric bracket q and 1/q give identical
// numbers, so q > 1 is folded onto (0, 1] by effective_q().
struct QParam {
  double q = 1.0;
  Convention convention = Convention::Symmetric;

  QParam() = default;
  QParam(double q_, Convention c = Convention::Symmetric);

  double effective_q() const;
  bool classical() const { return q == 1.0; }
  bool jackson() const { return convention == Convention::Jackson; }
  // Finite convergence radius of the Jackson series for 0 < q < 1; infinity otherwise.
  double radius() const;
};

bool operator==(const QParam& a, const QParam& b);

enum class Family { Exp, Cos, Sin, ExpDerivative, ExpIntegral };

struct FunctionSpec {
  Family family = Family::Exp;
  int r = 0;  // order for ExpDerivative / ExpIntegral
  QParam qp;

  static FunctionSpec exp(QParam qp) { return {Family::Exp, 0, qp}; }
  static FunctionSpec cos(QParam qp) { return {Family::Cos, 0, qp}; }
  static FunctionSpec sin(QParam qp) { return {Family::Sin, 0, qp}; }
  static FunctionSpec derivative(int r, QParam qp);
  static FunctionSpec integral(int r, QParam qp);

  FunctionSpec with_q(double q) const;
  std::string name() const;
};

struct TruncatedValue {
  std::complex<double> value;
  double tail_bound = 0.0;  // bound on |discarded tail|
  int terms_used = 0;
  double rounding_bound = 0.0;  // accumulated rounding, including the final cast to double
};

struct SeriesConfig {
  int term_cap = 10000;
  double ratio_threshold = 0.9;

  // Defaults, with QLOG_TERM_CAP honoured when set.
  static SeriesConfig from_environment();
};

double bracket(int n, const QParam& qp);
double bracket_factorial(int n, const QParam& qp);

// Same numbers at higher precision.
Wide bracket_wide(int n, const QParam& qp);
Extended bracket_extended(int n, const QParam& qp);

TruncatedValue eval_series(const FunctionSpec& spec, std::complex<double> z, double tol,
                           const SeriesConfig& cfg = SeriesConfig::from_environment());

}  // namespace qlog
