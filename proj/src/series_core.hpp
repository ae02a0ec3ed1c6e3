#pragma once

// Coefficient recurrences shared by the evaluators and the sum-rule code.
// Every family is written as sum_m a_m z^(step*m + shift); a_m / a_{m-1} is
// a product of brackets, and `majorant(m)` bounds sup_{k>=m} |a_k / a_{k-1}|.

#include <memory>
#include <vector>

#include "qlog/errors.hpp"
#include "qlog/precision.hpp"
#include "qlog/qnum.hpp"

namespace qlog::detail {

template <class T>
T bracket_as(int n, const QParam& qp);

template <>
inline Wide bracket_as<Wide>(int n, const QParam& qp) { return bracket_wide(n, qp); }
template <>
inline Extended bracket_as<Extended>(int n, const QParam& qp) { return bracket_extended(n, qp); }
template <>
inline double bracket_as<double>(int n, const QParam& qp) { return bracket(n, qp); }

inline int series_step(Family f) { return (f == Family::Cos || f == Family::Sin) ? 2 : 1; }

inline int series_shift(const FunctionSpec& s, bool normalized) {
  if (normalized) return 0;
  if (s.family == Family::Sin) return 1;
  if (s.family == Family::ExpIntegral) return s.r;
  return 0;
}

template <class T>
T factorial_as(int n) {
  T f = 1;
  for (int k = 2; k <= n; ++k) f *= T(k);
  return f;
}

// a_0 of the series (the prefactor when not normalized).
template <class T>
T series_lead(const FunctionSpec& s, bool normalized) {
  if (normalized) return T(1);
  if (s.family == Family::ExpDerivative) {
    T bf = 1;
    for (int k = 1; k <= s.r; ++k) bf *= bracket_as<T>(k, s.qp);
    return factorial_as<T>(s.r) / bf;
  }
  if (s.family == Family::ExpIntegral) return T(1) / factorial_as<T>(s.r);
  return T(1);
}

// a_m / a_{m-1}, m >= 1. Same for raw and normalized tables.
template <class T>
T series_ratio(const FunctionSpec& s, int m) {
  const QParam& qp = s.qp;
  switch (s.family) {
    case Family::Exp:
      return T(1) / bracket_as<T>(m, qp);
    case Family::Cos:
      return T(-1) / (bracket_as<T>(2 * m, qp) * bracket_as<T>(2 * m - 1, qp));
    case Family::Sin:
      return T(-1) / (bracket_as<T>(2 * m + 1, qp) * bracket_as<T>(2 * m, qp));
    case Family::ExpDerivative:
      return T(m + s.r) / (T(m) * bracket_as<T>(m + s.r, qp));
    case Family::ExpIntegral:
      return T(m) / (T(m + s.r) * bracket_as<T>(m, qp));
  }
  return T(0);
}

template <class T>
T series_majorant(const FunctionSpec& s, int m) {
  using std::abs;
  if (s.family == Family::ExpIntegral) return T(1) / bracket_as<T>(m, s.qp);
  return abs(series_ratio<T>(s, m));
}

struct SeriesTable {
  FunctionSpec spec;
  bool normalized = false;
  int step = 1;
  int shift = 0;
  std::vector<Wide> coeff;     // a_m
  std::vector<Wide> majorant;  // majorant[m], m >= 1; majorant[0] unused

  int size() const { return static_cast<int>(coeff.size()); }
  // Grow to at least n coefficients.
  void extend(int n);
};

SeriesTable make_series_table(const FunctionSpec& s, bool normalized, int n);

// Shared, immutable tables keyed by (spec, normalized); grown copy-on-write.
std::shared_ptr<const SeriesTable> cached_series_table(const FunctionSpec& s, bool normalized,
                                                       int min_terms);

}  // namespace qlog::detail
