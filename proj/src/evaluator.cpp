#include "evaluator.hpp"

#include <sstream>

#include "qlog/errors.hpp"

namespace qlog::detail {

namespace {

constexpr double kReductionRadius = 16.0;
constexpr int kJetTermCap = 20000;

}  // namespace

Evaluator::Evaluator(const FunctionSpec& spec, int d, bool normalized)
    : spec_(spec), d_(d), normalized_(normalized) {
  if (d < 0 || d > 1) throw std::invalid_argument("derivative order must be 0 or 1");
  reducible_ = spec.family == Family::Exp && spec.qp.jackson() && spec.qp.q > 1.0;
  // Elementary closed forms at q = 1.
  classical_ = spec.qp.classical() &&
               (spec.family == Family::Exp || spec.family == Family::Cos ||
                spec.family == Family::Sin || spec.family == Family::ExpDerivative);
  table_ = cached_series_table(spec, normalized, 64);
}

std::array<WideCx, 6> Evaluator::series_jet(const WideCx& z, int count, Wide* magnitude) const {
  // count = number of derivatives of the series wanted (0..count-1).
  const int D = count - 1;
  const int step = table_->step;
  const int shift = table_->shift;
  const Wide zabs = z.abs();
  const Wide zs_abs = step == 2 ? zabs * zabs : zabs;

  std::vector<WideCx> pw{WideCx(1)};
  auto power = [&](int e) -> const WideCx& {
    while (static_cast<int>(pw.size()) <= e) pw.push_back(pw.back() * z);
    return pw[e];
  };

  std::array<CompensatedCxSum<Wide>, 6> acc;
  std::array<Wide, 6> acc_abs{};
  const Wide rel = Wide(1e-33);
  for (int m = 0;; ++m) {
    if (m + 2 >= table_->size()) table_ = cached_series_table(spec_, normalized_, 2 * (m + 2));
    if (m >= kJetTermCap) throw ConvergenceError("jet series did not converge for " + spec_.name());
    const int e = step * m + shift;
    const Wide& a = table_->coeff[m];
    std::array<Wide, 6> tabs{};
    Wide ff = 1;
    for (int j = 0; j <= D; ++j) {
      if (e - j < 0) break;
      WideCx t = power(e - j) * (a * ff);
      acc[j].add(t);
      tabs[j] = t.abs();
      acc_abs[j] += tabs[j];
      ff *= Wide(e - j);
    }
    if (e > D + 1) {
      // Bound on the ratio of successive future terms of the highest derivative.
      const Wide growth = pow(Wide(e + step - D + 1) / Wide(e - D + 1), D);
      const Wide rho = zs_abs * table_->majorant[m + 1] * growth;
      if (rho < Wide(0.5)) {
        bool small = true;
        for (int j = 0; j <= D && small; ++j) small = tabs[j] <= rel * acc_abs[j];
        if (small) break;
      }
    }
  }
  std::array<WideCx, 6> out{};
  for (int j = 0; j <= D; ++j) out[j] = acc[j].value();
  if (magnitude) *magnitude = acc_abs[d_];
  return out;
}

std::array<WideCx, 6> Evaluator::reduced_jet(const WideCx& z, int count, Wide* magnitude) const {
  const Wide q = Wide(spec_.qp.q);
  const Wide zabs = z.abs();
  int k = 0;
  Wide scale = 1;
  while (zabs / scale > Wide(kReductionRadius)) {
    scale *= q;
    ++k;
  }
  // Jet of P(z) = prod_{j=1..k} (1 + c_j z), c_j = (q-1)/q^j, by repeated Leibniz.
  std::array<WideCx, 6> P{};
  P[0] = WideCx(1);
  Wide qj = 1;
  for (int j = 1; j <= k; ++j) {
    qj *= q;
    const Wide c = (q - 1) / qj;
    const WideCx lin = WideCx(1) + z * c;
    for (int n = count - 1; n >= 0; --n) {
      WideCx v = P[n] * lin;
      if (n > 0) v += P[n - 1] * (c * Wide(n));
      P[n] = v;
    }
  }
  const WideCx u = z / scale;
  Wide mag_e = 0;
  auto E = series_jet(u, count, &mag_e);
  // d^n/dz^n E(z / scale) = scale^-n E^(n)(u)
  Wide inv = 1;
  for (int n = 0; n < count; ++n) {
    E[n] *= inv;
    inv /= scale;
  }
  std::array<WideCx, 6> out{};
  for (int n = 0; n < count; ++n) {
    Wide binom = 1;
    WideCx s(0);
    for (int i = 0; i <= n; ++i) {
      s += P[i] * E[n - i] * binom;
      binom = binom * Wide(n - i) / Wide(i + 1);
    }
    out[n] = s;
  }
  if (magnitude) {
    // Crude: magnitude of the product's leading factor times the series scale.
    Wide pabs = 1;
    qj = 1;
    for (int j = 1; j <= k; ++j) {
      qj *= q;
      pabs *= Wide(1) + zabs * (q - 1) / qj;
    }
    *magnitude = pabs * mag_e;
  }
  return out;
}

namespace {

using cd = std::complex<double>;

// f^(k) for k = 0..count-1 at q = 1, where the families are elementary.
std::array<cd, 6> classical_jet(Family family, bool normalized, cd z, int count, double* magnitude) {
  std::array<cd, 6> f{};
  if (family == Family::Exp || family == Family::ExpDerivative) {
    const cd e = std::exp(z);
    for (int k = 0; k < count; ++k) f[k] = e;
    *magnitude = std::abs(e);
    return f;
  }
  // cos, sin and their derivatives cycle with period 4
  const cd c = std::cos(z), s = std::sin(z);
  const cd cyc_cos[4] = {c, -s, -c, s};
  const cd cyc_sin[4] = {s, c, -s, -c};
  const double mag = std::cosh(z.imag());
  if (family == Family::Cos) {
    for (int k = 0; k < count; ++k) f[k] = cyc_cos[k % 4];
    *magnitude = mag;
    return f;
  }
  if (!normalized) {
    for (int k = 0; k < count; ++k) f[k] = cyc_sin[k % 4];
    *magnitude = mag;
    return f;
  }
  // sin(z)/z by Leibniz with (1/z)^(k) = (-1)^k k! / z^(k+1)
  for (int n = 0; n < count; ++n) {
    cd acc = 0;
    double binom = 1;
    for (int k = 0; k <= n; ++k) {
      double fact = 1;
      for (int i = 2; i <= k; ++i) fact *= i;
      const cd inv = (k % 2 == 0 ? 1.0 : -1.0) * fact / std::pow(z, k + 1);
      acc += binom * cyc_sin[(n - k) % 4] * inv;
      binom = binom * (n - k) / (k + 1);
    }
    f[n] = acc;
  }
  *magnitude = mag / std::abs(z);
  return f;
}

}  // namespace

Jet Evaluator::jet(std::complex<double> z, int order) const {
  if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet order out of range");
  if (std::abs(z) >= spec_.qp.radius()) {
    std::ostringstream os;
    os << "|z| = " << std::abs(z) << " outside the Jackson convergence radius";
    throw DomainError(os.str());
  }
  const int count = d_ + order + 1;
  if (classical_ && !(spec_.family == Family::Sin && normalized_ && std::abs(z) < 1.0)) {
    double mag = 0;
    auto f = classical_jet(spec_.family, normalized_, z, count, &mag);
    Jet j;
    for (int k = 0; k <= order; ++k) j.d[k] = f[d_ + k];
    j.magnitude = mag;
    return j;
  }
  const WideCx zw = WideCx::from(z);
  Wide mag = 0;
  std::array<WideCx, 6> raw = (reducible_ && zw.abs() > Wide(kReductionRadius))
                                  ? reduced_jet(zw, count, &mag)
                                  : series_jet(zw, count, &mag);
  Jet j;
  for (int k = 0; k <= order; ++k) j.d[k] = raw[d_ + k].to_std();
  j.magnitude = static_cast<double>(mag);
  return j;
}

}  // namespace qlog::detail
