#include "qlog/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "qlog/combinatorics.hpp"
#include "qlog/errors.hpp"
#include "qlog/lnq.hpp"
#include "qlog/qnum.hpp"
#include "qlog/sumrules.hpp"
#include "qlog/zeroscape.hpp"

namespace qlog::cli {

namespace {

using json = nlohmann::ordered_json;
using cd = std::complex<double>;

// ---------------------------------------------------------------------------
// Output

std::string fmt_number(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void write_json(std::ostream& os, const json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent) * (depth + 1), ' ');
  const std::string pad_close(static_cast<std::size_t>(indent) * depth, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        write_json(os, it.value(), indent, depth + 1);
      }
      os << "\n" << pad_close << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << pad;
        write_json(os, j[i], indent, depth + 1);
      }
      os << "\n" << pad_close << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (std::isfinite(v)) os << fmt_number(v, 17);
      else os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

std::string to_text(const json& j) {
  std::ostringstream os;
  write_json(os, j, 2, 0);
  os << "\n";
  return os.str();
}

json cnum(cd z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

json result(const std::string& op, json inputs, const std::string& method, double error,
            bool certified) {
  json j;
  j["op"] = op;
  j["inputs"] = std::move(inputs);
  j["value"] = nullptr;
  j["error_estimate"] = error;
  j["certified"] = certified;
  j["method"] = method;
  return j;
}

// Writes to stdout or atomically to a file (temp + rename).
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

// ---------------------------------------------------------------------------
// Shared flags

struct Common {
  double q = 0.5;
  std::string convention = "symmetric";
  std::string format = "json";
  std::string output;
  int term_cap = 0;

  QParam qp() const {
    return QParam(q, convention == "jackson" ? Convention::Jackson : Convention::Symmetric);
  }
  SeriesConfig series() const {
    SeriesConfig c = SeriesConfig::from_environment();
    if (term_cap > 0) c.term_cap = term_cap;
    return c;
  }
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--q", c.q, "deformation parameter q > 0")->check(CLI::PositiveNumber);
  app->add_option("--convention", c.convention, "bracket convention")
      ->check(CLI::IsMember({"symmetric", "jackson"}));
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app->add_option("--output,-o", c.output, "output file (atomic write); default stdout");
  app->add_option("--term-cap", c.term_cap, "series term cap (overrides QLOG_TERM_CAP)")
      ->check(CLI::Range(1, 100000000));
}

FunctionSpec parse_function(const std::string& family, int r, const QParam& qp) {
  if (family == "exp" || family == "e") return FunctionSpec::exp(qp);
  if (family == "cos") return FunctionSpec::cos(qp);
  if (family == "sin") return FunctionSpec::sin(qp);
  if (family == "derivative") return FunctionSpec::derivative(r, qp);
  if (family == "integral") return FunctionSpec::integral(r, qp);
  throw std::invalid_argument("--family: unknown family '" + family + "'");
}

const std::vector<std::string> kFunctionFamilies{"exp", "e", "cos", "sin", "derivative",
                                                 "integral"};
const std::vector<std::string> kSumFamilies{"e",        "exp",      "jackson", "derivative",
                                            "integral", "cos",      "sin"};

SumFamily parse_sum_family(const std::string& f) {
  if (f == "e" || f == "exp") return SumFamily::Exp;
  if (f == "jackson") return SumFamily::Jackson;
  if (f == "derivative") return SumFamily::Derivative;
  if (f == "integral") return SumFamily::Integral;
  if (f == "cos") return SumFamily::Cos;
  if (f == "sin") return SumFamily::Sin;
  throw std::invalid_argument("--family: unknown sum-rule family '" + f + "'");
}

SigmaMethod parse_method(const std::string& m) {
  if (m == "series") return SigmaMethod::Series;
  if (m == "recursive") return SigmaMethod::Recursive;
  if (m == "direct") return SigmaMethod::Direct;
  if (m == "closed") return SigmaMethod::ClosedForm;
  if (m == "zeros") return SigmaMethod::ZeroPartialSum;
  throw std::invalid_argument("--method: unknown method '" + m + "'");
}

const char* kind_name(RootKind k) {
  switch (k) {
    case RootKind::RealAxis: return "real";
    case RootKind::ConjugatePairUpper: return "pair_upper";
    case RootKind::ConjugatePairLower: return "pair_lower";
  }
  return "?";
}

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    first = false;
    s += c;
  }
  return s + "\n";
}

std::string c12(double v) { return fmt_number(v, 12); }

// Single-value results in CSV.
std::string scalar_csv(const json& j) {
  std::string value;
  const json& v = j.contains("value") ? j["value"] : json();
  if (v.is_number()) value = c12(v.get<double>());
  else if (v.is_object() && v.contains("re"))
    value = c12(v["re"].get<double>()) + (v["im"].get<double>() < 0 ? "" : "+") +
            c12(v["im"].get<double>()) + "i";
  const json& e = j["error_estimate"];
  return csv_row({"op", "value", "error_estimate", "certified", "method"}) +
         csv_row({j["op"].get<std::string>(), value,
                  e.is_number() ? c12(e.get<double>()) : std::string(),
                  j["certified"].get<bool>() ? "true" : "false", j["method"].get<std::string>()});
}

template <class Record>
json roots_json(const RootList<Record>& list, bool turning) {
  json arr = json::array();
  for (const auto& r : list.roots) {
    json o;
    o["index"] = r.index;
    o["location"] = cnum(r.location);
    o["kind"] = kind_name(r.kind);
    o["residual"] = r.residual;
    o["scale"] = r.scale;
    o["certified"] = r.certified;
    o["near_degenerate"] = r.near_degenerate;
    if constexpr (std::is_same_v<Record, TurningPointRecord>) {
      if (turning) o["branch_value"] = cnum(r.branch_value);
    }
    arr.push_back(o);
  }
  return arr;
}

template <class Record>
std::string roots_csv(const RootList<Record>& list) {
  std::string s;
  constexpr bool turning = std::is_same_v<Record, TurningPointRecord>;
  if constexpr (turning)
    s = csv_row({"index", "re", "im", "kind", "residual", "certified", "b_re", "b_im"});
  else
    s = csv_row({"index", "re", "im", "kind", "residual", "certified"});
  for (const auto& r : list.roots) {
    if constexpr (turning)
      s += csv_row({std::to_string(r.index), c12(r.location.real()), c12(r.location.imag()),
                    kind_name(r.kind), c12(r.residual), r.certified ? "true" : "false",
                    c12(r.branch_value.real()), c12(r.branch_value.imag())});
    else
      s += csv_row({std::to_string(r.index), c12(r.location.real()), c12(r.location.imag()),
                    kind_name(r.kind), c12(r.residual), r.certified ? "true" : "false"});
  }
  return s;
}

template <class Record>
bool all_certified(const RootList<Record>& list) {
  if (!list.complete || list.truncated) return false;
  for (const auto& r : list.roots)
    if (!r.certified) return false;
  return true;
}

template <class Record>
double worst_relative_residual(const RootList<Record>& list) {
  double w = 0;
  for (const auto& r : list.roots) w = std::max(w, r.scale > 0 ? r.residual / r.scale : r.residual);
  return w;
}

// ---------------------------------------------------------------------------
// Verification rows

struct Suite {
  std::vector<VerifyRow> rows;

  void check(const std::string& name, double observed, double expected, double tol,
             bool relative = false) {
    double err = std::abs(observed - expected);
    if (relative) err /= std::max(std::abs(expected), 1e-300);
    rows.push_back({name, observed, expected, tol, std::isfinite(observed) && err <= tol, ""});
  }
  void check_below(const std::string& name, double observed, double bound) {
    rows.push_back({name, observed, 0.0, bound, std::isfinite(observed) && std::abs(observed) < bound, ""});
  }
  void check_true(const std::string& name, bool ok, const std::string& detail = "") {
    rows.push_back({name, ok ? 1.0 : 0.0, 1.0, 0.0, ok, detail});
  }
  void guard(const std::string& name, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rows.push_back({name, std::nan(""), 0.0, 0.0, false, e.what()});
    }
  }
};

const cd* nearest(const std::vector<cd>& zs, cd target) {
  const cd* best = nullptr;
  for (const auto& z : zs)
    if (!best || std::abs(z - target) < std::abs(*best - target)) best = &z;
  return best;
}

void fixture_rows(Suite& s) {
  const QParam J109(1.09, Convention::Jackson);
  const QParam q035(0.35), q022(0.22), quarter(0.25);

  // qnum
  s.check("bracket_factorial(0)", bracket_factorial(0, QParam(0.3)), 1.0, 0.0);
  s.guard("eval E_q(-12.1111) q=1.09", [&] {
    s.check_below("eval E_q(-12.1111) q=1.09",
                  std::abs(eval_series(FunctionSpec::exp(J109), -12.1111, 1e-16).value), 1e-4);
  });
  s.guard("eval e_q(-5.19755) q=0.35", [&] {
    s.check_below("eval e_q(-5.19755) q=0.35",
                  std::abs(eval_series(FunctionSpec::exp(q035), -5.19755, 1e-16).value), 1e-4);
  });

  // combinatorics
  {
    auto c = compositions(4, 3);
    bool ok = c.size() == 3 && c[0].parts == std::vector<int>{1, 1, 2} &&
              c[1].parts == std::vector<int>{1, 2, 1} && c[2].parts == std::vector<int>{2, 1, 1};
    s.check_true("compositions(4,3)", ok);
    auto d = compositions(4, 2);
    ok = d.size() == 3 && d[0].parts == std::vector<int>{1, 3} &&
         d[1].parts == std::vector<int>{2, 2} && d[2].parts == std::vector<int>{3, 1};
    s.check_true("compositions(4,2)", ok);
  }

  // qlog
  {
    const QParam qp(0.5);
    auto c = lnq_coefficients(6, qp);
    const double i2 = 1.0 / bracket_factorial(2, qp), i3 = 1.0 / bracket_factorial(3, qp);
    s.check("c_1", c.at(1), 1.0, 1e-15);
    s.check("c_2 = -1/[2]!", c.at(2), -i2, 1e-14, true);
    s.check("c_3 = -(1/[3]! - 2/[2]!^2)", c.at(3), -(i3 - 2 * i2 * i2), 1e-13, true);
    auto c0 = lnq_coefficients(6, QParam(1e-4));
    s.check_below("|c_2| at q=1e-4", std::abs(c0.at(2)), 1e-3);
    auto d = lnq_qderivative_coeffs(c);
    s.check("q-derivative degree-0 coefficient", d.at(0), 1.0, 1e-15);
    s.check("q-derivative degree-1 coefficient", d.at(1), -1.0, 1e-14);
  }

  // sumrules
  s.check("sigma_1^e", sigma(SumFamily::Exp, 0, 1, q035).value, -1.0, 1e-15);
  s.check("sigma_2^e q=1/4", sigma(SumFamily::Exp, 0, 2, quarter).value, 0.2, 1e-14);
  s.check("sigma_3^E closed form q=2", sigma(SumFamily::Jackson, 0, 3, QParam(2.0), SigmaMethod::ClosedForm).value,
          -1.0 / 7.0, 1e-14);
  s.check("sigma_2^c = 1/[2]!", sigma(SumFamily::Cos, 0, 2, q035).value, 1.0 / bracket_factorial(2, q035), 1e-14, true);
  s.check("sigma_3^s q=1", sigma(SumFamily::Sin, 0, 3, QParam(1.0)).value, 1.0 / 6.0, 1e-14);
  s.check("b^e coefficient of z", b_series_coeffs(SumFamily::Exp, 0, 4, q035).at(1), 1.0, 1e-15);
  {
    const QParam J2(2.0, Convention::Jackson);
    auto b = b_series_coeffs(SumFamily::Jackson, 0, 6, J2);
    for (int n = 1; n <= 6; ++n)
      s.check("b^E coefficient z^" + std::to_string(n) + " q=2", b.at(n),
              std::pow(1 - 2.0, n - 1) / (n * bracket(n, J2)), 1e-13, true);
  }
  {
    const QParam qp(0.5);
    const double s2 = sigma(SumFamily::Exp, 0, 2, qp).value, s3 = sigma(SumFamily::Exp, 0, 3, qp).value,
                 s4 = sigma(SumFamily::Exp, 0, 4, qp).value;
    s.check("1/[2]! from sigma", bracket_reciprocal_from_sigma(2, qp), 0.5 - s2 / 2, 1e-14, true);
    s.check("1/[4]! from sigma", bracket_reciprocal_from_sigma(4, qp),
            1.0 / 24 - s2 / 4 - s3 / 3 - s4 / 4 + s2 * s2 / 8, 1e-13, true);
  }
  s.check("B_1^q plain = 1/[3]!", q_bernoulli(1, q035, BernoulliVariant::Plain),
          1.0 / bracket_factorial(3, q035), 1e-14, true);
  {
    double li2 = 0;
    for (int n = 1; n <= 200; ++n) li2 += std::pow(0.5, n) / (double(n) * n);
    s.check("(1-q) Li2(0.5; 0.999) vs Li2(0.5)", 0.001 * q_dilog(0.5, 0.999, 5000).value.real(), li2, 1e-2);
    const double q = 0.5;
    auto bE = b_series_coeffs(SumFamily::Jackson, 0, 80, QParam(q, Convention::Jackson));
    s.check("Li2(0.3; 0.5) = b^E(0.3/(1-q))", q_dilog(0.3, q, 80).value.real(),
            eval_coeff_series(0.3 / (1 - q), bE).value.real(), 1e-10);
  }
  {
    const double x = -0.4, y = -0.7;
    auto b = b_series_coeffs(SumFamily::Exp, 0, 60, q035);
    const double lhs = std::log(exp_b_eval(SumFamily::Exp, 0, x, 60, q035).value.real() *
                                exp_b_eval(SumFamily::Exp, 0, y, 60, q035).value.real());
    s.check("product law log(e(x)e(y)) = b(x)+b(y)", lhs,
            eval_coeff_series(x, b).value.real() + eval_coeff_series(y, b).value.real(), 1e-12);
  }

  // zeroscape
  s.guard("Jackson q=1.09 zeros", [&] {
    auto z = find_real_zeros(FunctionSpec::exp(J109), -20, 0, 10);
    const double expect[4] = {-12.1111, -13.2011, -14.3892, -15.6842};
    for (int i = 0; i < 4; ++i)
      s.check("Jackson q=1.09 zero " + std::to_string(i + 1),
              i < static_cast<int>(z.roots.size()) ? z.roots[i].location.real() : std::nan(""),
              expect[i], 1e-3);
  });
  s.guard("Jackson q=2 zeros", [&] {
    auto z = find_real_zeros(FunctionSpec::exp(QParam(2.0, Convention::Jackson)), -20, 0, 10);
    for (int i = 0; i < 3; ++i)
      s.check("Jackson q=2 zero " + std::to_string(i + 1),
              i < static_cast<int>(z.roots.size()) ? z.roots[i].location.real() : std::nan(""),
              -std::pow(2.0, i + 1), 1e-10);
  });
  s.guard("q=0.35 real zero", [&] {
    auto z = find_real_zeros(FunctionSpec::exp(q035), -6, 0, 5);
    s.check("q=0.35 real zero count", static_cast<double>(z.roots.size()), 1.0, 0.0);
    s.check("q=0.35 real zero", z.roots.empty() ? std::nan("") : z.roots[0].location.real(), -5.19755, 1e-4);
  });
  auto pair_check = [&](const std::string& tag, const QParam& qp, cd expect, double tol) {
    s.guard(tag, [&] {
      auto z = find_complex_zeros(FunctionSpec::exp(qp), 1);
      std::vector<cd> locs;
      for (const auto& r : z.roots) locs.push_back(r.location);
      const cd* got = nearest(locs, expect);
      s.check(tag + " re", got ? got->real() : std::nan(""), expect.real(), tol);
      s.check(tag + " im", got ? got->imag() : std::nan(""), expect.imag(), tol);
    });
  };
  pair_check("q=0.22 first zero pair", q022, cd(-2.51, 0.87), 2e-2);
  pair_check("q=0.35 first zero pair", q035, cd(-2.8222, 1.969), 1e-3);
  s.guard("q=0.22 turning points", [&] {
    auto t = find_real_turning_points(FunctionSpec::exp(q022), -6, 0, 4);
    const double tau[2] = {-2.6, -4.7}, b[2] = {0.04770, 0.06936};
    for (int i = 0; i < 2; ++i) {
      const bool have = i < static_cast<int>(t.roots.size());
      s.check("q=0.22 tau_" + std::to_string(i + 1), have ? t.roots[i].location.real() : std::nan(""),
              tau[i], 5e-2);
      s.check("q=0.22 b_" + std::to_string(i + 1), have ? t.roots[i].branch_value.real() : std::nan(""),
              b[i], 1e-4);
    }
  });
  s.guard("q=0.35 turning points", [&] {
    auto t = find_turning_points(FunctionSpec::exp(q035), 4);
    const TurningPointRecord* a = nullptr;
    std::vector<const TurningPointRecord*> real;
    for (const auto& r : t.roots) {
      if (r.kind == RootKind::ConjugatePairUpper && !a) a = &r;
      if (r.kind == RootKind::RealAxis) real.push_back(&r);
    }
    s.check("q=0.35 tau_A re", a ? a->location.real() : std::nan(""), -3.5434, 1e-3);
    s.check("q=0.35 tau_A im", a ? a->location.imag() : std::nan(""), 1.32945, 1e-3);
    s.check("q=0.35 b_A re", a ? a->branch_value.real() : std::nan(""), 0.0222415, 1e-4);
    s.check("q=0.35 b_A im", a ? a->branch_value.imag() : std::nan(""), 0.01879, 1e-4);
    const double tau[2] = {-6.3471, -10.7028}, b[2] = {-0.00909587, 0.087536};
    for (int i = 0; i < 2; ++i) {
      const bool have = i < static_cast<int>(real.size());
      s.check("q=0.35 real tau_" + std::to_string(i + 1), have ? real[i]->location.real() : std::nan(""),
              tau[i], 1e-3);
      s.check("q=0.35 real b_" + std::to_string(i + 1), have ? real[i]->branch_value.real() : std::nan(""),
              b[i], 1e-3 * std::abs(b[i]));
    }
  });
  s.guard("collision q_z*", [&] {
    auto c = collision_point(FunctionSpec::exp(QParam(0.5)), RootTarget::Zero, 1);
    s.check("collision q_z*", c.found ? c.q_star : std::nan(""), 0.14, 1e-2);
  });
  s.guard("collision q_tau*", [&] {
    auto c = collision_point(FunctionSpec::exp(QParam(0.5)), RootTarget::Turning, 1);
    s.check("collision q_tau*", c.found ? c.q_star : std::nan(""), 0.25, 1e-2);
  });
  s.guard("Jackson no collision", [&] {
    auto c = collision_point(FunctionSpec::exp(J109), RootTarget::Zero, 1);
    s.check_true("Jackson zeros do not collide for q in (1, 10]", !c.found, c.note);
  });
  s.guard("first zero real for q in [0.10, 0.13]", [&] {
    const FunctionSpec spec = FunctionSpec::exp(QParam(0.10));
    auto z = find_real_zeros(spec, -10, 0, 1);
    if (z.roots.empty()) throw std::runtime_error("no real zero at q=0.10");
    auto tr = continue_in_q(spec, RootTarget::Zero, 0.10, 0.13, 30, {z.roots[0].location});
    bool ok = !tr.truncated && tr.events.empty() && !tr.q.empty();
    double worst_im = 0;
    for (const auto& row : tr.roots) {
      ok = ok && !row.empty() && row[0].real() < 0;
      if (!row.empty()) worst_im = std::max(worst_im, std::abs(row[0].imag()));
    }
    s.check_true("first zero real for q in [0.10, 0.13]", ok && worst_im == 0.0,
                 "max |Im| " + fmt_number(worst_im, 3));
  });
  s.guard("contour images merge at branch value", [&] {
    // Near a real turning point the Im = 0 set is the axis plus a crossing arm;
    // both arms map onto the branch value b = f(tau).
    const FunctionSpec spec = FunctionSpec::exp(q035);
    auto t = find_real_turning_points(spec, -7, -6, 1);
    if (t.roots.empty()) throw std::runtime_error("no turning point in [-7, -6]");
    const cd tau = t.roots[0].location, b = t.roots[0].branch_value;
    const int n = 64;
    const double half = 0.6;
    auto cs = extract_contours(spec, {tau.real() - half, tau.real() + half, -half, half}, n,
                               ContourField::ImZero);
    const double h = 2 * half / n;
    int axis = 0, arm = 0;
    double worst = 0;
    for (std::size_t i = 0; i < cs.polylines.size(); ++i)
      for (std::size_t k = 0; k < cs.polylines[i].size(); ++k) {
        const cd p = cs.polylines[i][k];
        if (std::abs(p - tau) > 3 * h) continue;
        if (std::abs(p.imag()) < h / 4) ++axis;
        else if (std::abs(p.imag()) > h / 2) ++arm;
        else continue;
        worst = std::max(worst, std::abs(cs.w_images[i][k] - b));
      }
    s.check_true("contour arms meet at tau", axis > 0 && arm > 0,
                 std::to_string(axis) + " axis / " + std::to_string(arm) + " arm points");
    s.check_below("contour images merge at branch value", worst, cs.tolerance);
  });

  // cli
  s.guard("cli eval", [&] {
    std::ostringstream out, err;
    const int rc = run({"eval", "--family", "exp", "--convention", "jackson", "--q", "1.09", "--re",
                        "-12.1111"},
                       out, err);
    auto j = json::parse(out.str());
    const double re = j["value"]["re"].get<double>(), im = j["value"]["im"].get<double>();
    s.check_below("cli eval E_q(-12.1111)", rc == 0 ? std::hypot(re, im) : std::nan(""), 1e-4);
  });
  s.guard("cli collide turning", [&] {
    std::ostringstream out, err;
    const int rc = run({"collide", "--kind", "turning", "--pair", "1"}, out, err);
    auto j = json::parse(out.str());
    const double q = rc == 0 && j["value"].is_number() ? j["value"].get<double>() : std::nan("");
    s.check("cli collide --kind turning", q, 0.25, 0.01);
  });
}

void invariant_rows(Suite& s) {
  for (double q : {0.1, 0.35, 0.9}) {
    double worst = 0;
    for (int n = 0; n <= 30; ++n) {
      const double a = bracket(n, QParam(q)), b = bracket(n, QParam(1 / q));
      if (n > 0) worst = std::max(worst, std::abs(a - b) / std::abs(a));
    }
    s.check("bracket q <-> 1/q invariance q=" + fmt_number(q, 3), worst, 0.0, 1e-13);
  }
  {
    double worst = 0;
    for (int n = 1; n <= 30; ++n) {
      const double j = bracket(n, QParam(0.35, Convention::Jackson));
      const double sym = std::pow(0.35, (n - 1) / 2.0) * bracket(n, QParam(0.35));
      worst = std::max(worst, std::abs(j - sym) / std::abs(sym));
    }
    s.check("Jackson bracket relation", worst, 0.0, 1e-13);
  }
  {
    bool ok = true;
    for (int n = 1; n <= 20; ++n)
      for (int l = 1; l <= n; ++l) {
        std::uint64_t c = 0;
        CompositionStream st(n, l);
        while (st.next()) ++c;
        ok = ok && c == composition_count(n, l);
      }
    s.check_true("composition counts C(n-1,l-1), n<=20", ok);
  }
  for (double q : {0.22, 0.35, 0.5, 0.9}) {
    double worst = 0;
    const SumFamily fams[] = {SumFamily::Exp, SumFamily::Derivative, SumFamily::Integral,
                              SumFamily::Cos, SumFamily::Sin};
    for (SumFamily f : fams) {
      auto a = sigma_table(f, 2, 12, QParam(q), SigmaMethod::Recursive);
      auto b = sigma_table(f, 2, 12, QParam(q), SigmaMethod::Direct);
      for (int k = 1; k <= 12; ++k)
        worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(std::abs(b[k]), 1e-300));
    }
    s.check("Recursive = Direct, q=" + fmt_number(q, 3), worst, 0.0, 1e-12);
  }
  for (double q : {0.1, 0.5, 0.9}) {
    auto a = lnq_coefficients(20, QParam(q), LnqMethod::Recursive);
    auto b = lnq_coefficients(20, QParam(q), LnqMethod::Reversion);
    double worst = 0;
    for (int n = 1; n <= 20; ++n) worst = std::max(worst, std::abs(a.at(n) - b.at(n)) / std::abs(b.at(n)));
    s.check("ln_q Recursive = Reversion, q=" + fmt_number(q, 3), worst, 0.0, 1e-12);
  }
  {
    const QParam qp(0.35);
    const double direct = eval_series(FunctionSpec::exp(qp), -1.0, 1e-18).value.real();
    s.check("exp_b(-1) = e_q(-1), q=0.35", exp_b_eval(SumFamily::Exp, 0, -1.0, 60, qp).value.real(), direct,
            1e-10);
  }
}

// ---------------------------------------------------------------------------
// Subcommands

struct Args {
  Common common;
  std::string family = "exp";
  int r = 1;
  double re = 0.0, im = 0.0;
  double tol = 1e-16;
  int n = 1;
  int N = 20;
  int M = 20;
  int count = 4;
  int pairs = 0;
  std::string method;
  std::vector<double> window;
  int max_count = 50;
  std::string kind = "zero";
  int pair = 1;
  int grid = 64;
  std::string field = "im";
  std::string variant = "plain";
  std::string suite = "paper-fixtures";
  double p = 2.0;
  double w_re = 0.0, w_im = 0.0;
  bool have_w = false;
  bool qderivative = false;
  double q_from = 0.1, q_to = 0.2;
  int steps = 20;
};

json lnq_json(const CoeffList& c, const std::string& method, const Args& a) {
  json j = result("lnq", {{"q", a.common.q}, {"convention", a.common.convention}, {"N", a.N}},
                  method, 0.0, true);
  j.erase("value");
  j["values"] = c.coeffs;
  j["first_degree"] = c.first_degree;
  return j;
}

int dispatch(const std::string& name, Args& a, std::ostream& out, std::ostream& err) {
  const QParam qp = a.common.qp();
  const bool csv = a.common.format == "csv";
  std::string text;
  int rc = 0;

  if (name == "eval") {
    const FunctionSpec spec = parse_function(a.family, a.r, qp);
    if (!(a.tol > 0)) throw std::invalid_argument("--tol must be positive");
    auto v = eval_series(spec, cd(a.re, a.im), a.tol, a.common.series());
    json j = result("eval",
                    {{"family", spec.name()}, {"q", a.common.q}, {"convention", a.common.convention},
                     {"z", cnum(cd(a.re, a.im))}, {"tol", a.tol}},
                    "series", v.tail_bound + v.rounding_bound, true);
    j["value"] = cnum(v.value);
    j["tail_bound"] = v.tail_bound;
    j["rounding_bound"] = v.rounding_bound;
    j["terms_used"] = v.terms_used;
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "sumrules") {
    const SumFamily fam = parse_sum_family(a.family);
    const std::string m = a.method.empty() ? "series" : a.method;
    auto s = sigma(fam, a.r, a.n, qp, parse_method(m), a.M);
    json j = result("sumrules",
                    {{"family", a.family}, {"r", a.r}, {"n", a.n}, {"q", a.common.q},
                     {"convention", s.qp.jackson() ? "jackson" : "symmetric"}},
                    m, s.error_estimate, std::isfinite(s.error_estimate));
    j["value"] = s.value;
    if (s.method == SigmaMethod::ZeroPartialSum) j["zeros_used"] = s.zeros_used;
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "lnq") {
    const std::string m = a.method.empty() ? "reversion" : a.method;
    LnqMethod lm;
    if (m == "reversion") lm = LnqMethod::Reversion;
    else if (m == "recursive") lm = LnqMethod::Recursive;
    else throw std::invalid_argument("--method: lnq accepts recursive|reversion");
    CoeffList c = lnq_coefficients(a.N, qp, lm);
    if (a.qderivative) c = lnq_qderivative_coeffs(c);
    json j = lnq_json(c, m, a);
    if (a.have_w) {
      auto v = eval_coeff_series(cd(a.w_re, a.w_im), c);
      j["w"] = cnum(cd(a.w_re, a.w_im));
      j["value"] = cnum(v.value);
      j["certified"] = v.certified;
      j["error_estimate"] = v.last_term;
    }
    if (csv) {
      text = csv_row({"degree", "coefficient"});
      for (std::size_t i = 0; i < c.coeffs.size(); ++i)
        text += csv_row({std::to_string(c.first_degree + static_cast<int>(i)), c12(c.coeffs[i])});
    } else {
      text = to_text(j);
    }
  } else if (name == "zeros" || name == "turning") {
    const FunctionSpec spec = parse_function(a.family, a.r, qp);
    const bool turning = name == "turning";
    std::string method;
    json inputs{{"family", spec.name()}, {"q", a.common.q}, {"convention", a.common.convention}};
    auto finish = [&](auto list) {
      json j = result(name, inputs, method, worst_relative_residual(list), all_certified(list));
      j.erase("value");
      j["values"] = roots_json(list, turning);
      j["complete"] = list.complete;
      j["truncated"] = list.truncated;
      j["notes"] = list.notes;
      text = csv ? roots_csv(list) : to_text(j);
    };
    if (!a.window.empty()) {
      if (a.window.size() != 2) throw std::invalid_argument("--window takes x_min x_max");
      inputs["window"] = a.window;
      inputs["max_count"] = a.max_count;
      method = "real-scan";
      if (turning) finish(find_real_turning_points(spec, a.window[0], a.window[1], a.max_count));
      else finish(find_real_zeros(spec, a.window[0], a.window[1], a.max_count));
    } else if (a.pairs > 0) {
      inputs["pairs"] = a.pairs;
      method = "continuation";
      if (turning) finish(find_complex_turning_points(spec, a.pairs));
      else finish(find_complex_zeros(spec, a.pairs));
    } else {
      inputs["count"] = a.count;
      method = "scan+argument-principle";
      if (turning) finish(find_turning_points(spec, a.count));
      else finish(find_zeros(spec, a.count));
    }
  } else if (name == "collide") {
    const FunctionSpec spec = parse_function(a.family, a.r, qp);
    RootTarget t;
    if (a.kind == "zero") t = RootTarget::Zero;
    else if (a.kind == "turning") t = RootTarget::Turning;
    else throw std::invalid_argument("--kind must be zero or turning");
    auto c = collision_point(spec, t, a.pair);
    json j = result("collide",
                    {{"family", spec.name()}, {"convention", a.common.convention}, {"kind", a.kind},
                     {"pair", a.pair}},
                    "continuation+bisection+newton", c.bracket_width, c.found);
    j["value"] = c.found ? json(c.q_star) : json(nullptr);
    j["found"] = c.found;
    j["location"] = c.location;
    j["bracket_width"] = c.bracket_width;
    j["note"] = c.note;
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "continue") {
    const FunctionSpec spec = parse_function(a.family, a.r, qp);
    const RootTarget t = a.kind == "turning" ? RootTarget::Turning : RootTarget::Zero;
    if (a.kind != "zero" && a.kind != "turning") throw std::invalid_argument("--kind must be zero or turning");
    auto start_list = t == RootTarget::Turning ? find_real_turning_points(spec.with_q(a.q_from), -1e7, 0, a.count).roots
                                               : std::vector<TurningPointRecord>{};
    std::vector<cd> tracked;
    if (t == RootTarget::Turning) {
      for (const auto& r : start_list) tracked.push_back(r.location);
    } else {
      auto zl = find_zeros(spec.with_q(a.q_from), a.count);
      for (const auto& r : zl.roots)
        if (r.kind != RootKind::ConjugatePairLower) tracked.push_back(r.location);
    }
    auto tr = continue_in_q(spec, t, a.q_from, a.q_to, a.steps, tracked);
    json rows = json::array();
    for (std::size_t i = 0; i < tr.q.size(); ++i) {
      json row;
      row["q"] = tr.q[i];
      json roots = json::array();
      for (std::size_t k = 0; k < tr.roots[i].size(); ++k) {
        json r = cnum(tr.roots[i][k]);
        r["kind"] = kind_name(tr.kinds[i][k]);
        roots.push_back(r);
      }
      row["roots"] = roots;
      rows.push_back(row);
    }
    json events = json::array();
    for (const auto& e : tr.events) events.push_back({{"q", e.q}, {"location", e.location}, {"slot", e.slot}});
    json j = result("continue",
                    {{"family", spec.name()}, {"kind", a.kind}, {"q_from", a.q_from}, {"q_to", a.q_to},
                     {"steps", a.steps}, {"count", a.count}},
                    "predictor-corrector", 0.0, !tr.truncated);
    j.erase("value");
    j["values"] = rows;
    j["collisions"] = events;
    j["truncated"] = tr.truncated;
    j["note"] = tr.note;
    if (csv) {
      text = csv_row({"q", "slot", "re", "im", "kind"});
      for (std::size_t i = 0; i < tr.q.size(); ++i)
        for (std::size_t k = 0; k < tr.roots[i].size(); ++k)
          text += csv_row({c12(tr.q[i]), std::to_string(k), c12(tr.roots[i][k].real()),
                           c12(tr.roots[i][k].imag()), kind_name(tr.kinds[i][k])});
    } else {
      text = to_text(j);
    }
  } else if (name == "contour") {
    const FunctionSpec spec = parse_function(a.family, a.r, qp);
    if (a.window.size() != 4) throw std::invalid_argument("--window takes x_min x_max y_min y_max");
    const ContourField field = a.field == "re" ? ContourField::ReZero : ContourField::ImZero;
    auto cs = extract_contours(spec, {a.window[0], a.window[1], a.window[2], a.window[3]}, a.grid, field);
    if (csv) {
      text = csv_row({"x", "y", "u", "v"});
      for (std::size_t i = 0; i < cs.polylines.size(); ++i) {
        if (i) text += "\n";
        for (std::size_t k = 0; k < cs.polylines[i].size(); ++k)
          text += csv_row({c12(cs.polylines[i][k].real()), c12(cs.polylines[i][k].imag()),
                           c12(cs.w_images[i][k].real()), c12(cs.w_images[i][k].imag())});
      }
    } else {
      json lines = json::array();
      for (std::size_t i = 0; i < cs.polylines.size(); ++i) {
        json pts = json::array();
        for (std::size_t k = 0; k < cs.polylines[i].size(); ++k)
          pts.push_back({cs.polylines[i][k].real(), cs.polylines[i][k].imag(), cs.w_images[i][k].real(),
                         cs.w_images[i][k].imag()});
        lines.push_back(pts);
      }
      json j = result("contour",
                      {{"family", spec.name()}, {"q", a.common.q}, {"convention", a.common.convention},
                       {"window", a.window}, {"grid", a.grid}, {"field", a.field}},
                      "marching-squares", cs.tolerance, true);
      j.erase("value");
      j["values"] = lines;
      text = to_text(j);
    }
  } else if (name == "bernoulli") {
    const BernoulliVariant v = a.variant == "tilde" ? BernoulliVariant::Tilde : BernoulliVariant::Plain;
    const double b = q_bernoulli(a.n, qp, v);
    json j = result("bernoulli", {{"n", a.n}, {"q", a.common.q}, {"convention", a.common.convention}, {"variant", a.variant}},
                    "series", std::abs(b) * 1e-15, true);
    j["value"] = b;
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "zeta") {
    const BernoulliVariant v = a.variant == "tilde" ? BernoulliVariant::Tilde : BernoulliVariant::Plain;
    auto z = q_zeta(a.p, qp, v, a.M);
    json j = result("zeta", {{"p", a.p}, {"q", a.common.q}, {"variant", a.variant}, {"M", a.M}},
                    "zero-partial-sum", z.tail_estimate, std::isfinite(z.tail_estimate));
    j["value"] = z.value;
    j["zeros_used"] = z.zeros_used;
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "dilog") {
    auto v = q_dilog(cd(a.re, a.im), a.common.q, a.N);
    json j = result("dilog", {{"q", a.common.q}, {"z", cnum(cd(a.re, a.im))}, {"N", a.N}}, "series",
                    v.last_term, v.certified);
    j["value"] = cnum(v.value);
    text = csv ? scalar_csv(j) : to_text(j);
  } else if (name == "bseries") {
    const SumFamily fam = parse_sum_family(a.family);
    const std::string m = a.method.empty() ? "series" : a.method;
    auto c = b_series_coeffs(fam, a.r, a.N, qp, parse_method(m));
    json j = result("bseries", {{"family", a.family}, {"r", a.r}, {"N", a.N}, {"q", a.common.q},
                                {"convention", c.qp.jackson() ? "jackson" : "symmetric"}},
                    m, 0.0, true);
    j.erase("value");
    j["values"] = c.coeffs;
    if (csv) {
      text = csv_row({"degree", "coefficient"});
      for (std::size_t i = 0; i < c.coeffs.size(); ++i)
        text += csv_row({std::to_string(i + 1), c12(c.coeffs[i])});
    } else {
      text = to_text(j);
    }
  } else if (name == "verify") {
    auto rows = verify_suite(a.suite);
    int failed = 0;
    json arr = json::array();
    for (const auto& r : rows) {
      failed += r.pass ? 0 : 1;
      json o{{"name", r.name}, {"observed", r.observed}, {"expected", r.expected},
             {"tolerance", r.tolerance}, {"pass", r.pass}};
      if (!r.detail.empty()) o["detail"] = r.detail;
      arr.push_back(o);
    }
    json j = result("verify", {{"suite", a.suite}}, "fixtures", 0.0, failed == 0);
    j.erase("value");
    j["values"] = arr;
    j["passed"] = static_cast<int>(rows.size()) - failed;
    j["failed"] = failed;
    if (csv) {
      text = csv_row({"name", "observed", "expected", "tolerance", "pass"});
      for (const auto& r : rows)
        text += csv_row({"\"" + r.name + "\"", c12(r.observed), c12(r.expected), c12(r.tolerance),
                         r.pass ? "PASS" : "FAIL"});
    } else {
      text = to_text(j);
    }
    rc = failed == 0 ? 0 : 1;
    if (failed) err << failed << " verification row(s) failed\n";
  }
  emit(text, a.common.output, out);
  return rc;
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message) {
  json j{{"error", kind}, {"message", message}};
  err << to_text(j);
}

}  // namespace

std::vector<VerifyRow> verify_suite(const std::string& suite) {
  Suite s;
  if (suite == "paper-fixtures" || suite == "all") fixture_rows(s);
  if (suite == "invariants" || suite == "all") invariant_rows(s);
  if (suite != "paper-fixtures" && suite != "invariants" && suite != "all")
    throw std::invalid_argument("--suite must be paper-fixtures, invariants or all");
  return s.rows;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"q-exponential, q-logarithm and sum-rule toolkit"};
  app.name("qlog");
  app.require_subcommand(1);
  Args a;

  auto* eval = app.add_subcommand("eval", "evaluate a series with a certified tail bound");
  auto* sums = app.add_subcommand("sumrules", "sum rule sigma_n over reciprocal zeros");
  auto* lnq = app.add_subcommand("lnq", "coefficients of ln_q(1+w)");
  auto* zeros = app.add_subcommand("zeros", "zeros of a q-function");
  auto* turning = app.add_subcommand("turning", "turning points and branch values");
  auto* collide = app.add_subcommand("collide", "collision point of a root pair in q");
  auto* cont = app.add_subcommand("continue", "track roots in q");
  auto* contour = app.add_subcommand("contour", "Re/Im zero contours and their w-images");
  auto* bern = app.add_subcommand("bernoulli", "q-Bernoulli numbers");
  auto* zeta = app.add_subcommand("zeta", "q-zeta from zero partial sums");
  auto* dilog = app.add_subcommand("dilog", "q-dilogarithm");
  auto* bseries = app.add_subcommand("bseries", "coefficients of the natural logarithm b");
  auto* verify = app.add_subcommand("verify", "run a verification suite");

  for (auto* s : {eval, sums, lnq, zeros, turning, collide, cont, contour, bern, zeta, dilog, bseries, verify})
    add_common(s, a.common);

  auto fam_fn = [&](CLI::App* s) {
    s->add_option("--family", a.family, "exp|cos|sin|derivative|integral")->check(CLI::IsMember(kFunctionFamilies));
    s->add_option("--r", a.r, "order for derivative/integral")->check(CLI::NonNegativeNumber);
  };
  for (auto* s : {eval, zeros, turning, collide, cont, contour}) fam_fn(s);

  eval->add_option("--re", a.re, "real part of z");
  eval->add_option("--im", a.im, "imaginary part of z");
  eval->add_option("--tol", a.tol, "relative term tolerance")->check(CLI::PositiveNumber);

  for (auto* s : {sums, bseries}) {
    s->add_option("--family", a.family, "e|jackson|derivative|integral|cos|sin")->check(CLI::IsMember(kSumFamilies));
    s->add_option("--r", a.r, "order for derivative/integral")->check(CLI::NonNegativeNumber);
    s->add_option("--method", a.method, "series|recursive|direct|closed|zeros")
        ->check(CLI::IsMember({"series", "recursive", "direct", "closed", "zeros"}));
  }
  sums->add_option("--n", a.n, "sum-rule index")->check(CLI::PositiveNumber);
  sums->add_option("--M", a.M, "zero count for --method zeros")->check(CLI::Range(3, 10000));
  bseries->add_option("--N", a.N, "number of coefficients")->check(CLI::Range(1, 200));

  lnq->add_option("--N", a.N, "number of coefficients")->check(CLI::Range(1, 200));
  lnq->add_option("--method", a.method, "recursive|reversion")->check(CLI::IsMember({"recursive", "reversion"}));
  lnq->add_flag("--qderivative", a.qderivative, "emit the q-derivative series instead");
  auto* wre = lnq->add_option("--w-re", a.w_re, "evaluate at w (real part)");
  auto* wim = lnq->add_option("--w-im", a.w_im, "evaluate at w (imaginary part)");

  for (auto* s : {zeros, turning}) {
    s->add_option("--count", a.count, "first roots by modulus")->check(CLI::Range(1, 1000));
    s->add_option("--window", a.window, "real window x_min x_max")->expected(2);
    s->add_option("--max-count", a.max_count, "cap for --window")->check(CLI::Range(1, 100000));
    s->add_option("--pairs", a.pairs, "complex pairs by continuation")->check(CLI::Range(1, 100));
  }

  collide->add_option("--kind", a.kind, "zero|turning")->check(CLI::IsMember({"zero", "turning"}));
  collide->add_option("--pair", a.pair, "pair index")->check(CLI::Range(1, 20));

  cont->add_option("--kind", a.kind, "zero|turning")->check(CLI::IsMember({"zero", "turning"}));
  cont->add_option("--from", a.q_from, "start q")->check(CLI::PositiveNumber);
  cont->add_option("--to", a.q_to, "end q")->check(CLI::PositiveNumber);
  cont->add_option("--steps", a.steps, "rows")->check(CLI::Range(1, 100000));
  cont->add_option("--count", a.count, "tracked roots")->check(CLI::Range(1, 100));

  contour->add_option("--window", a.window, "x_min x_max y_min y_max")->expected(4)->required();
  contour->add_option("--grid", a.grid, "cells per side")->check(CLI::Range(16, 4096));
  contour->add_option("--field", a.field, "re|im")->check(CLI::IsMember({"re", "im"}));

  bern->add_option("--n", a.n, "index")->check(CLI::PositiveNumber);
  bern->add_option("--variant", a.variant, "plain|tilde")->check(CLI::IsMember({"plain", "tilde"}));
  zeta->add_option("--p", a.p, "real p > 1");
  zeta->add_option("--variant", a.variant, "plain|tilde")->check(CLI::IsMember({"plain", "tilde"}));
  zeta->add_option("--M", a.M, "zero count")->check(CLI::Range(3, 10000));
  dilog->add_option("--re", a.re, "real part of z");
  dilog->add_option("--im", a.im, "imaginary part of z");
  dilog->add_option("--N", a.N, "terms")->check(CLI::Range(1, 1000000));

  verify->add_option("--suite", a.suite, "paper-fixtures|invariants|all")
      ->check(CLI::IsMember({"paper-fixtures", "invariants", "all"}));

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }
  a.have_w = wre->count() > 0 || wim->count() > 0;

  std::string name;
  for (auto* s : app.get_subcommands()) name = s->get_name();
  try {
    return dispatch(name, a, out, err);
  } catch (const DomainError& e) {
    error_json(err, "domain", e.what());
    return 2;
  } catch (const OverflowError& e) {
    error_json(err, "overflow", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    error_json(err, "usage", e.what());
    return 2;
  } catch (const ConvergenceError& e) {
    error_json(err, "no-convergence", e.what());
    return 1;
  } catch (const std::exception& e) {
    error_json(err, "internal", e.what());
    return 1;
  }
}

}  // namespace qlog::cli
