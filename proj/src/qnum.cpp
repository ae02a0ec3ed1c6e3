#include "qlog/qnum.hpp"

#include <quadmath.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <sstream>
#include <utility>

#include "qlog/errors.hpp"
#include "series_core.hpp"

namespace qlog {

namespace {

std::string describe(int n, const QParam& qp) {
  std::ostringstream os;
  os.precision(17);
  os << "n=" << n << ", q=" << qp.q;
  return os.str();
}

// boost's float128 expm1 wrapper does not compile on this toolchain.
Wide wide_expm1(const Wide& x) { return Wide(expm1q(x.backend().value())); }

}  // namespace

QParam::QParam(double q_, Convention c) : q(q_), convention(c) {
  if (!(q_ > 0.0) || !std::isfinite(q_)) {
    std::ostringstream os;
    os << "q must be positive and finite, got " << q_;
    throw DomainError(os.str());
  }
}

double QParam::effective_q() const {
  if (convention == Convention::Symmetric && q > 1.0) return 1.0 / q;
  return q;
}

double QParam::radius() const {
  if (convention == Convention::Jackson && q < 1.0) return 1.0 / (1.0 - q);
  return std::numeric_limits<double>::infinity();
}

bool operator==(const QParam& a, const QParam& b) {
  return a.q == b.q && a.convention == b.convention;
}

FunctionSpec FunctionSpec::derivative(int r, QParam qp) {
  if (r < 0) throw DomainError("derivative order must be >= 0");
  return {Family::ExpDerivative, r, qp};
}

FunctionSpec FunctionSpec::integral(int r, QParam qp) {
  if (r < 0) throw DomainError("integral order must be >= 0");
  return {Family::ExpIntegral, r, qp};
}

FunctionSpec FunctionSpec::with_q(double q) const {
  FunctionSpec s = *this;
  s.qp = QParam(q, qp.convention);
  return s;
}

std::string FunctionSpec::name() const {
  switch (family) {
    case Family::Exp: return "exp";
    case Family::Cos: return "cos";
    case Family::Sin: return "sin";
    case Family::ExpDerivative: return "derivative(" + std::to_string(r) + ")";
    case Family::ExpIntegral: return "integral(" + std::to_string(r) + ")";
  }
  return "?";
}

SeriesConfig SeriesConfig::from_environment() {
  SeriesConfig c;
  if (const char* env = std::getenv("QLOG_TERM_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v < 100000000) c.term_cap = static_cast<int>(v);
  }
  return c;
}

Wide bracket_wide(int n, const QParam& qp) {
  if (n < 0) throw DomainError("bracket index must be >= 0");
  if (n == 0) return 0;
  if (qp.classical()) return n;
  Wide h = log(Wide(qp.effective_q()));
  if (qp.convention == Convention::Symmetric) {
    h = abs(h);
    return sinh(Wide(n) * h / 2) / sinh(h / 2);
  }
  return wide_expm1(Wide(n) * h) / wide_expm1(h);
}

Extended bracket_extended(int n, const QParam& qp) {
  if (n < 0) throw DomainError("bracket index must be >= 0");
  if (n == 0) return 0;
  if (qp.classical()) return n;
  Extended q(qp.effective_q());
  if (qp.convention == Convention::Symmetric) {
    Extended h = abs(log(q));
    return sinh(Extended(n) * h / 2) / sinh(h / 2);
  }
  return (1 - pow(q, n)) / (1 - q);
}

double bracket(int n, const QParam& qp) {
  double v = static_cast<double>(bracket_wide(n, qp));
  if (!std::isfinite(v)) throw OverflowError("bracket overflows double: " + describe(n, qp));
  return v;
}

namespace {

// Cumulative bracket factorials per (q, convention); single writer, many readers.
struct FactorialCache {
  std::shared_mutex mu;
  std::map<std::pair<double, int>, std::vector<Wide>> tables;
};

FactorialCache& factorial_cache() {
  static FactorialCache c;
  return c;
}

}  // namespace

double bracket_factorial(int n, const QParam& qp) {
  if (n < 0) throw DomainError("factorial index must be >= 0");
  auto key = std::make_pair(qp.effective_q(), static_cast<int>(qp.convention));
  auto& cache = factorial_cache();
  auto lookup = [&]() -> std::optional<Wide> {
    std::shared_lock lock(cache.mu);
    auto it = cache.tables.find(key);
    if (it != cache.tables.end() && static_cast<int>(it->second.size()) > n) return it->second[n];
    return std::nullopt;
  };
  std::optional<Wide> hit = lookup();
  if (!hit) {
    std::unique_lock lock(cache.mu);
    auto& t = cache.tables[key];
    if (t.empty()) t.push_back(Wide(1));
    while (static_cast<int>(t.size()) <= n) {
      int k = static_cast<int>(t.size());
      t.push_back(t.back() * bracket_wide(k, qp));
    }
    hit = t[n];
  }
  const Wide v = *hit;
  double d = static_cast<double>(v);
  if (!std::isfinite(d) || (d == 0.0 && v != 0))
    throw OverflowError("bracket factorial out of double range: " + describe(n, qp));
  return d;
}

TruncatedValue eval_series(const FunctionSpec& spec, std::complex<double> z, double tol,
                           const SeriesConfig& cfg) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw DomainError("argument must be finite");
  const double radius = spec.qp.radius();
  if (std::abs(z) >= radius) {
    std::ostringstream os;
    os.precision(17);
    os << "|z| = " << std::abs(z) << " outside the convergence radius " << radius
       << " of the Jackson series at q=" << spec.qp.q;
    throw DomainError(os.str());
  }

  auto table = detail::cached_series_table(spec, false, 64);
  const WideCx zw = WideCx::from(z);
  WideCx zs = zw;
  if (table->step == 2) zs = zw * zw;
  const Wide zs_abs = zs.abs();

  WideCx power(1);
  for (int k = 0; k < table->shift; ++k) power *= zw;

  CompensatedCxSum<Wide> sum;
  Wide abs_total = 0;
  TruncatedValue out;
  for (int m = 0;; ++m) {
    if (m + 2 >= cfg.term_cap) {
      std::ostringstream os;
      os << "series for " << spec.name() << " not certified within " << cfg.term_cap
         << " terms";
      throw ConvergenceError(os.str());
    }
    if (m + 2 >= table->size()) table = detail::cached_series_table(spec, false, 2 * (m + 2));
    WideCx term = power * table->coeff[m];
    sum.add(term);
    abs_total += term.abs();
    power *= zs;

    const WideCx next = power * table->coeff[m + 1];
    const Wide next_abs = next.abs();
    const Wide rho = zs_abs * table->majorant[m + 2];
    const WideCx partial = sum.value();
    Wide scale = partial.abs();
    if (scale < 1) scale = 1;
    if (next_abs <= Wide(tol) * scale && rho < Wide(cfg.ratio_threshold)) {
      out.value = partial.to_std();
      out.tail_bound = static_cast<double>(next_abs / (1 - rho));
      out.terms_used = m + 1;
      out.rounding_bound = static_cast<double>(abs_total * Wide(1e-32)) +
                           std::abs(out.value) * std::numeric_limits<double>::epsilon();
      return out;
    }
  }
}

}  // namespace qlog
