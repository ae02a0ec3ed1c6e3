#include "qlog/lnq.hpp"

#include <string>

#include "qlog/combinatorics.hpp"
#include "qlog/errors.hpp"
#include "series_core.hpp"

namespace qlog {

double CoeffList::at(int n) const {
  int i = n - first_degree;
  if (i < 0 || i >= static_cast<int>(coeffs.size())) return 0.0;
  return coeffs[i];
}

namespace {

std::vector<Wide> inverse_factorials(int N, const QParam& qp) {
  std::vector<Wide> inv(N + 1);
  inv[0] = 1;
  for (int k = 1; k <= N; ++k) inv[k] = inv[k - 1] / bracket_wide(k, qp);
  return inv;
}

std::vector<Wide> lnq_recursive(int N, const QParam& qp) {
  auto inv = inverse_factorials(N, qp);
  std::vector<Wide> c(N + 1, Wide(0));
  c[1] = 1;
  for (int n = 2; n <= N; ++n) {
    CompensatedSum<Wide> acc;
    for (int l = 2; l <= n; ++l) acc.add(inv[l] * composition_product_sum<Wide>(n, l, c));
    c[n] = -acc.value();
  }
  return c;
}

}  // namespace

std::vector<Wide> lnq_coefficients_wide(int N, const QParam& qp) {
  if (N < 1 || N > kMaxReversionDegree)
    throw DomainError("ln_q reversion degree must be in [1, 200], got " + std::to_string(N));
  auto inv = inverse_factorials(N, qp);
  std::vector<Wide> c(N + 1, Wide(0));
  // P[l][n]: coefficient of w^n in a(w)^l.
  std::vector<std::vector<Wide>> P(N + 1, std::vector<Wide>(N + 1, Wide(0)));
  c[1] = 1;
  P[1][1] = 1;
  for (int n = 2; n <= N; ++n) {
    CompensatedSum<Wide> acc;
    for (int l = 2; l <= n; ++l) {
      Wide s = 0;
      for (int k = 1; k <= n - l + 1; ++k) s += c[k] * P[l - 1][n - k];
      P[l][n] = s;
      acc.add(s * inv[l]);
    }
    c[n] = -acc.value();
    P[1][n] = c[n];
  }
  return c;
}

CoeffList lnq_coefficients(int N, const QParam& qp, LnqMethod method) {
  std::vector<Wide> c;
  if (method == LnqMethod::Recursive) {
    if (N < 1 || N > kMaxCompositionDegree)
      throw DomainError("recursive ln_q coefficients need 1 <= N <= 24, got " + std::to_string(N));
    c = lnq_recursive(N, qp);
  } else {
    c = lnq_coefficients_wide(N, qp);
  }
  CoeffList out;
  out.first_degree = 1;
  out.qp = qp;
  out.kind = CoeffKind::LnqCoeff;
  for (int n = 1; n <= N; ++n) out.coeffs.push_back(static_cast<double>(c[n]));
  return out;
}

SeriesValue eval_coeff_series(std::complex<double> t, const CoeffList& coeffs) {
  SeriesValue out;
  if (coeffs.coeffs.empty()) {
    out.value = 0.0;
    return out;
  }
  std::complex<double> acc = 0.0;
  for (auto it = coeffs.coeffs.rbegin(); it != coeffs.coeffs.rend(); ++it) acc = acc * t + *it;
  std::complex<double> lead = 1.0;
  for (int k = 0; k < coeffs.first_degree; ++k) lead *= t;
  out.value = acc * lead;
  out.last_term = std::abs(coeffs.coeffs.back() * std::pow(t, coeffs.last_degree()));
  out.certified = out.last_term <= 1e-14 * std::abs(out.value) || t == 0.0;
  return out;
}

SeriesValue lnq_eval(std::complex<double> w, const CoeffList& coeffs) {
  return eval_coeff_series(w, coeffs);
}

CoeffList lnq_qderivative_coeffs(const CoeffList& coeffs) {
  if (coeffs.kind != CoeffKind::LnqCoeff)
    throw std::invalid_argument("q-derivative expects ln_q coefficients");
  CoeffList out;
  out.first_degree = coeffs.first_degree - 1;
  out.qp = coeffs.qp;
  out.kind = CoeffKind::LnqDerivative;
  for (int i = 0; i < static_cast<int>(coeffs.coeffs.size()); ++i) {
    int n = coeffs.first_degree + i;
    out.coeffs.push_back(bracket(n, coeffs.qp) * coeffs.coeffs[i]);
  }
  return out;
}

}  // namespace qlog
