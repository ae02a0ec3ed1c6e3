#include "qlog/sumrules.hpp"

#include <cmath>
#include <sstream>

#include "qlog/combinatorics.hpp"
#include "qlog/errors.hpp"
#include "qlog/zeroscape.hpp"
#include "series_core.hpp"

namespace qlog {

namespace {

constexpr int kMaxSeriesDegree = 200;
constexpr double kWideEps = 2e-34;

bool trig(SumFamily f) { return f == SumFamily::Cos || f == SumFamily::Sin; }

template <class T>
std::vector<T> l_coeffs(const FunctionSpec& spec, int N) {
  std::vector<T> L(N + 1);
  L[0] = 1;
  for (int k = 1; k <= N; ++k) L[k] = L[k - 1] * detail::series_ratio<T>(spec, k);
  return L;
}

// log of 1 + sum L_k t^k: beta_n = L_n - (1/n) sum_{k<n} k beta_k L_{n-k};
// sigma_n = -n beta_n. `mag` receives a rounding scale per degree.
template <class T>
std::vector<T> sigma_from_log(const std::vector<T>& L, int N, std::vector<T>* mag = nullptr) {
  using std::abs;
  std::vector<T> beta(N + 1, T(0)), sig(N + 1, T(0));
  if (mag) mag->assign(N + 1, T(0));
  for (int n = 1; n <= N; ++n) {
    CompensatedSum<T> acc;
    T m = abs(L[n]);
    for (int k = 1; k < n; ++k) {
      const T t = T(k) * beta[k] * L[n - k];
      acc.add(t);
      m += abs(t) / n;
    }
    beta[n] = L[n] - acc.value() / T(n);
    sig[n] = -T(n) * beta[n];
    if (mag) (*mag)[n] = T(n) * m;
  }
  return sig;
}

template <class T>
std::vector<T> sigma_recursive(const std::vector<T>& L, int N, std::vector<T>* mag) {
  using std::abs;
  std::vector<T> sig(N + 1, T(0)), x(N + 1, T(0)), xa(N + 1, T(0));
  mag->assign(N + 1, T(0));
  for (int n = 1; n <= N; ++n) {
    CompensatedSum<T> acc;
    T m = abs(L[n]);
    T fact = 1;
    for (int l = 2; l <= n; ++l) {
      fact *= T(l);
      const T sgn = (l % 2 == 0) ? T(1) : T(-1);
      acc.add(sgn * composition_product_sum<T>(n, l, x) / fact);
      m += composition_product_sum<T>(n, l, xa) / fact;
    }
    sig[n] = T(n) * (acc.value() - L[n]);
    (*mag)[n] = T(n) * m;
    x[n] = sig[n] / T(n);
    xa[n] = abs(x[n]);
  }
  return sig;
}

template <class T>
std::vector<T> sigma_direct(const std::vector<T>& L, int N, std::vector<T>* mag) {
  using std::abs;
  std::vector<T> sig(N + 1, T(0)), La(L.size());
  for (std::size_t i = 0; i < L.size(); ++i) La[i] = abs(L[i]);
  mag->assign(N + 1, T(0));
  for (int n = 1; n <= N; ++n) {
    CompensatedSum<T> acc;
    T m = 0;
    for (int l = 1; l <= n; ++l) {
      const T sgn = (l % 2 == 0) ? T(1) : T(-1);
      acc.add(sgn * composition_product_sum<T>(n, l, L) / T(l));
      m += composition_product_sum<T>(n, l, La) / T(l);
    }
    sig[n] = T(n) * acc.value();
    (*mag)[n] = T(n) * m;
  }
  return sig;
}

// exp of b(t) = -sum sigma_k t^k / k, degree by degree.
template <class T>
std::vector<T> exp_from_sigma(const std::vector<T>& sig, int N) {
  std::vector<T> beta(N + 1, T(0)), g(N + 1, T(0));
  for (int k = 1; k <= N; ++k) beta[k] = -sig[k] / T(k);
  g[0] = 1;
  for (int n = 1; n <= N; ++n) {
    CompensatedSum<T> acc;
    for (int k = 1; k <= n; ++k) acc.add(T(k) * beta[k] * g[n - k]);
    g[n] = acc.value() / T(n);
  }
  return g;
}

struct SigmaTable {
  std::vector<Wide> value;
  std::vector<Wide> magnitude;
};

SigmaTable compute_sigmas(SumFamily family, int r, int N, const QParam& qp, SigmaMethod method) {
  const FunctionSpec spec = family_spec(family, r, qp);
  SigmaTable t;
  switch (method) {
    case SigmaMethod::Series: {
      if (N > kMaxSeriesDegree) throw DomainError("series degree above 200");
      auto L = l_coeffs<Wide>(spec, N);
      t.value = sigma_from_log(L, N, &t.magnitude);
      break;
    }
    case SigmaMethod::Recursive:
    case SigmaMethod::Direct: {
      if (N > kMaxCompositionDegree) throw DomainError("composition formulas need degree <= 24");
      auto L = l_coeffs<Wide>(spec, N);
      t.value = method == SigmaMethod::Recursive ? sigma_recursive(L, N, &t.magnitude)
                                                 : sigma_direct(L, N, &t.magnitude);
      break;
    }
    case SigmaMethod::ClosedForm: {
      if (family != SumFamily::Jackson)
        throw std::invalid_argument("closed form exists only for the Jackson family");
      if (!(qp.q > 1.0)) throw DomainError("closed-form Jackson sum rules need q > 1");
      const Wide q = qp.q;
      t.value.assign(N + 1, Wide(0));
      t.magnitude.assign(N + 1, Wide(0));
      for (int n = 1; n <= N; ++n) {
        t.value[n] = -pow(1 - q, n) / (1 - pow(q, n));
        t.magnitude[n] = abs(t.value[n]) * 4;
      }
      break;
    }
    case SigmaMethod::ZeroPartialSum:
      throw std::invalid_argument("zero partial sums are not tabulated");
  }
  return t;
}

// Bound on sum_{i>M} rho_i^-p from the last computed moduli (sorted ascending):
// geometric when growth is at least geometric, otherwise linear spacing.
double modulus_tail(const std::vector<double>& rho, double p) {
  const int M = static_cast<int>(rho.size());
  if (M < 3) return std::numeric_limits<double>::infinity();
  const double rM = rho[M - 2] / rho[M - 1];
  const double rP = rho[M - 3] / rho[M - 2];
  if (rM < 1.0 && rM <= rP * (1 + 1e-6)) {
    const double r = std::max(rM, rP);
    return std::pow(rho[M - 1], -p) / (p * std::log(1.0 / r));
  }
  const double delta = rho[M - 1] - rho[M - 2];
  if (p <= 1.0 || delta <= 0) return std::numeric_limits<double>::infinity();
  return std::pow(rho[M - 1], 1.0 - p) / ((p - 1.0) * delta);
}

SumRule zero_partial_sum(SumFamily family, int r, int n, const QParam& qp, int M) {
  if (M < 3) throw std::invalid_argument("zero partial sums need at least 3 zeros");
  const FunctionSpec spec = family_spec(family, r, qp);
  const int k = sigma_degree(family, n);
  ZeroList zeros = find_zeros(spec, M);
  if (!zeros.complete || static_cast<int>(zeros.roots.size()) < M) {
    std::ostringstream os;
    os << "could not locate " << M << " zeros of " << spec.name();
    for (const auto& note : zeros.notes) os << "; " << note;
    throw ConvergenceError(os.str());
  }
  std::complex<double> acc = 0.0;
  std::vector<double> rho;
  for (const auto& z : zeros.roots) {
    std::complex<double> t = trig(family) ? z.location * z.location : z.location;
    acc += std::pow(1.0 / t, k);
    rho.push_back(std::abs(z.location));
  }
  const double p = trig(family) ? 2.0 * k : static_cast<double>(k);
  SumRule out;
  out.family = family;
  out.r = r;
  out.n = n;
  out.value = acc.real();
  out.method = SigmaMethod::ZeroPartialSum;
  out.qp = spec.qp;
  out.error_estimate = modulus_tail(rho, p) + 1e-14 * std::abs(acc);
  out.zeros_used = static_cast<int>(zeros.roots.size());
  return out;
}

}  // namespace

QParam family_qparam(SumFamily family, const QParam& qp) {
  if (family == SumFamily::Jackson && !qp.jackson()) return QParam(qp.q, Convention::Jackson);
  return qp;
}

FunctionSpec family_spec(SumFamily family, int r, const QParam& qp_in) {
  const QParam qp = family_qparam(family, qp_in);
  switch (family) {
    case SumFamily::Exp:
    case SumFamily::Jackson: return FunctionSpec::exp(qp);
    case SumFamily::Derivative: return FunctionSpec::derivative(r, qp);
    case SumFamily::Integral: return FunctionSpec::integral(r, qp);
    case SumFamily::Cos: return FunctionSpec::cos(qp);
    case SumFamily::Sin: return FunctionSpec::sin(qp);
  }
  return FunctionSpec::exp(qp);
}

int sigma_degree(SumFamily family, int n) {
  switch (family) {
    case SumFamily::Cos:
      if (n < 2 || n % 2 != 0) throw DomainError("cosine sum rules need an even index >= 2");
      return n / 2;
    case SumFamily::Sin:
      if (n < 3 || n % 2 != 1) throw DomainError("sine sum rules need an odd index >= 3");
      return (n - 1) / 2;
    default:
      if (n < 1) throw DomainError("sum-rule index must be >= 1");
      return n;
  }
}

std::vector<double> l_coefficients(SumFamily family, int r, int N, const QParam& qp) {
  auto L = l_coeffs<Wide>(family_spec(family, r, qp), N);
  return std::vector<double>(L.begin(), L.end());
}

std::vector<double> sigma_table(SumFamily family, int r, int N, const QParam& qp,
                                SigmaMethod method) {
  if (N < 1) throw DomainError("degree must be >= 1");
  auto t = compute_sigmas(family, r, N, qp, method);
  return std::vector<double>(t.value.begin(), t.value.end());
}

SumRule sigma(SumFamily family, int r, int n, const QParam& qp, SigmaMethod method,
              int zero_count) {
  const int k = sigma_degree(family, n);
  if ((family == SumFamily::Derivative || family == SumFamily::Integral) && r < 0)
    throw DomainError("order r must be >= 0");
  if (method == SigmaMethod::ZeroPartialSum) return zero_partial_sum(family, r, n, qp, zero_count);
  auto t = compute_sigmas(family, r, k, qp, method);
  SumRule out;
  out.family = family;
  out.r = r;
  out.n = n;
  out.value = static_cast<double>(t.value[k]);
  out.method = method;
  out.qp = family_qparam(family, qp);
  out.error_estimate = static_cast<double>(t.magnitude[k]) * 64 * kWideEps +
                       std::abs(out.value) * std::numeric_limits<double>::epsilon() / 2;
  return out;
}

CoeffList b_series_coeffs(SumFamily family, int r, int N, const QParam& qp, SigmaMethod method) {
  if (N < 1) throw DomainError("degree must be >= 1");
  if (method == SigmaMethod::ZeroPartialSum)
    throw std::invalid_argument("b-series coefficients come from exact sigma values");
  auto t = compute_sigmas(family, r, N, qp, method);
  CoeffList out;
  out.first_degree = 1;
  out.qp = family_qparam(family, qp);
  out.kind = CoeffKind::BSeries;
  for (int k = 1; k <= N; ++k) out.coeffs.push_back(static_cast<double>(-t.value[k] / Wide(k)));
  return out;
}

SeriesValue exp_b_eval(SumFamily family, int r, std::complex<double> z, int N, const QParam& qp) {
  const CoeffList b = b_series_coeffs(family, r, N, qp);
  const std::complex<double> t = trig(family) ? z * z : z;
  SeriesValue bv = eval_coeff_series(t, b);
  std::complex<double> pref = 1.0;
  const FunctionSpec spec = family_spec(family, r, qp);
  if (family == SumFamily::Derivative)
    pref = static_cast<double>(detail::series_lead<Wide>(spec, false));
  else if (family == SumFamily::Integral)
    pref = std::pow(z, r) * static_cast<double>(detail::series_lead<Wide>(spec, false));
  else if (family == SumFamily::Sin)
    pref = z;
  SeriesValue out;
  out.value = pref * std::exp(bv.value);
  out.certified = bv.certified;
  out.last_term = bv.last_term;
  return out;
}

double bracket_reciprocal_from_sigma(int n, const QParam& qp) {
  if (n < 2 || n > kMaxCompositionDegree)
    throw DomainError("reconstruction index must be in [2, 24]");
  auto L = l_coeffs<Extended>(FunctionSpec::exp(qp), n);
  auto sig = sigma_from_log(L, n);
  // 1/[n]! = sum_l (1/l!) sum_compositions prod (-sigma_k / k)
  std::vector<Extended> beta(n + 1, Extended(0));
  for (int k = 1; k <= n; ++k) beta[k] = -sig[k] / k;
  CompensatedSum<Extended> acc;
  Extended fact = 1;
  for (int l = 1; l <= n; ++l) {
    fact *= l;
    acc.add(composition_product_sum<Extended>(n, l, beta) / fact);
  }
  return static_cast<double>(acc.value());
}

std::vector<double> reconstruct_l_coefficients(SumFamily family, int r, int N, const QParam& qp) {
  if (N < 1 || N > kMaxSeriesDegree) throw DomainError("degree must be in [1, 200]");
  auto L = l_coeffs<Extended>(family_spec(family, r, qp), N);
  auto sig = sigma_from_log(L, N);
  auto g = exp_from_sigma(sig, N);
  std::vector<double> out;
  for (const auto& v : g) out.push_back(static_cast<double>(v));
  return out;
}

double q_bernoulli(int n, const QParam& qp, BernoulliVariant variant) {
  if (n < 1) throw DomainError("Bernoulli index must be >= 1");
  Wide pre = detail::factorial_as<Wide>(2 * n) / pow(Wide(2), 2 * n - 1);
  if (variant == BernoulliVariant::Plain) {
    auto t = compute_sigmas(SumFamily::Sin, 0, n, qp, SigmaMethod::Series);
    return static_cast<double>(pre * t.value[n]);
  }
  auto t = compute_sigmas(SumFamily::Cos, 0, n, qp, SigmaMethod::Series);
  return static_cast<double>(pre * t.value[n] / (pow(Wide(2), 2 * n) - 1));
}

ZetaValue q_zeta(double p, const QParam& qp, BernoulliVariant variant, int M, double max_tail) {
  if (!(p > 1.0)) throw DomainError("q-zeta is implemented for real p > 1");
  if (M < 3) throw std::invalid_argument("q-zeta needs at least 3 zeros");
  const FunctionSpec spec =
      variant == BernoulliVariant::Plain ? FunctionSpec::sin(qp) : FunctionSpec::cos(qp);
  ZeroList zeros = find_zeros(spec, M);
  if (!zeros.complete || static_cast<int>(zeros.roots.size()) < M)
    throw ConvergenceError("could not locate the requested zeros of " + spec.name());
  CompensatedSum<double> acc;
  std::vector<double> rho;
  for (const auto& z : zeros.roots) {
    if (z.kind != RootKind::RealAxis)
      throw DomainError("q-zeta needs real zeros; complex zeros are present at this q");
    acc.add(std::pow(z.location.real(), -p));
    rho.push_back(z.location.real());
  }
  const double div = variant == BernoulliVariant::Plain ? 1.0 : std::pow(2.0, p) - 1.0;
  ZetaValue out;
  out.value = acc.value() / div;
  out.tail_estimate = modulus_tail(rho, p) / div;
  out.zeros_used = static_cast<int>(rho.size());
  if (out.tail_estimate > max_tail) {
    std::ostringstream os;
    os << "tail estimate " << out.tail_estimate << " exceeds the requested " << max_tail
       << " with " << M << " zeros";
    throw ConvergenceError(os.str());
  }
  return out;
}

SeriesValue q_dilog(std::complex<double> z, double q, int N) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q-dilogarithm needs 0 < q < 1");
  if (N < 1) throw DomainError("degree must be >= 1");
  CoeffList c;
  c.first_degree = 1;
  c.qp = QParam(q, Convention::Jackson);
  c.kind = CoeffKind::BSeries;
  for (int n = 1; n <= N; ++n) c.coeffs.push_back(1.0 / (n * -std::expm1(n * std::log(q))));
  return eval_coeff_series(z, c);
}

}  // namespace qlog
