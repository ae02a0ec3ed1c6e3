#pragma once

#include <complex>
#include <vector>

#include "qlog/qnum.hpp"

namespace qlog {

enum class CoeffKind { LnqCoeff, LnqDerivative, BSeries };

// Ordered coefficients; coeffs[i] multiplies t^(first_degree + i), where t
// is w for ln_q and z (or z^2 for the trig families) for b-series.
struct CoeffList {
  std::vector<double> coeffs;
  int first_degree = 1;
  QParam qp;
  CoeffKind kind = CoeffKind::LnqCoeff;

  // Coefficient of degree n, 0 outside the stored range.
  double at(int n) const;
  int last_degree() const { return first_degree + static_cast<int>(coeffs.size()) - 1; }
};

enum class LnqMethod { Recursive, Reversion };

inline constexpr int kMaxReversionDegree = 200;

CoeffList lnq_coefficients(int N, const QParam& qp, LnqMethod method = LnqMethod::Reversion);

// Wide-precision variant of the reversion, index n at position n (0 unused).
std::vector<Wide> lnq_coefficients_wide(int N, const QParam& qp);

struct SeriesValue {
  std::complex<double> value;
  bool certified = true;   // last retained term below 1e-14 of the sum
  double last_term = 0.0;  // modulus of the highest-degree term
};

SeriesValue lnq_eval(std::complex<double> w, const CoeffList& coeffs);

CoeffList lnq_qderivative_coeffs(const CoeffList& coeffs);

// Horner evaluation of any CoeffList in its own variable.
SeriesValue eval_coeff_series(std::complex<double> t, const CoeffList& coeffs);

}  // namespace qlog
