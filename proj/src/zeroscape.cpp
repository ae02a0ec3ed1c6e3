#include "qlog/zeroscape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "evaluator.hpp"
#include "qlog/errors.hpp"

namespace qlog {

namespace {

using cd = std::complex<double>;
using detail::Evaluator;
using detail::Jet;

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kMinScanStep = 1e-3;
constexpr double kScanReach = 1e7;
constexpr double kQStepFloor = 1e-7;
constexpr double kQDiff = 1e-6;

bool trig_family(const FunctionSpec& s) {
  return s.family == Family::Cos || s.family == Family::Sin;
}

// Real roots of the series families lie on the negative axis, trig ones on both.
int scan_direction(const FunctionSpec& s) { return trig_family(s) ? 1 : -1; }

Evaluator target_evaluator(const FunctionSpec& s, RootTarget t) {
  return Evaluator(s, t == RootTarget::Turning ? 1 : 0, t == RootTarget::Zero);
}

// Symmetric q > 1 is the same function as 1/q.
FunctionSpec canonical(const FunctionSpec& s) {
  if (!s.qp.jackson() && s.qp.q > 1.0) return s.with_q(1.0 / s.qp.q);
  return s;
}

double reach(const FunctionSpec& s) {
  return std::min(kScanReach, 0.999 * s.qp.radius());
}

int sign_of(double v) { return v < 0 ? -1 : 1; }

double real_part(const Jet& j, int k) { return j.d[k].real(); }

// Sign change of jet component k (0: g, 1: g') bracketed in [a, b]:
// Newton with bisection fallback.
double polish_bracket(const Evaluator& ev, double a, double b, int k) {
  double fa = real_part(ev.jet(a, k), k);
  if (fa == 0.0) return a;
  double x = 0.5 * (a + b);
  for (int it = 0; it < 300; ++it) {
    Jet j = ev.jet(x, k + 1);
    double f = real_part(j, k), df = real_part(j, k + 1);
    if (f == 0.0) return x;
    if (sign_of(f) == sign_of(fa)) {
      a = x;
      fa = f;
    } else {
      b = x;
    }
    double xn = x - f / df;
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (!std::isfinite(xn) || xn <= lo || xn >= hi) xn = 0.5 * (a + b);
    const double tol = 4 * kEps * std::max(std::abs(xn), 1e-300);
    if (std::abs(xn - x) <= tol || hi - lo <= tol) return xn;
    x = xn;
  }
  return x;
}

struct RealRoot {
  double x = 0.0;
  bool near_degenerate = false;
};

// Examine one scan cell [s0, s1] in outward coordinate s (x = dir * s);
// appends the roots found.
void examine_cell(const Evaluator& ev, int dir, double s0, double s1, const Jet& j0,
                  const Jet& j1, std::vector<RealRoot>& out) {
  const double x0 = dir * s0, x1 = dir * s1;
  const double g0 = real_part(j0, 0), g1 = real_part(j1, 0);
  const double d0 = real_part(j0, 1), d1 = real_part(j1, 1);
  if (sign_of(g0) != sign_of(g1)) {
    out.push_back({polish_bracket(ev, x0, x1, 0), false});
    return;
  }
  if (sign_of(d0) == sign_of(d1)) return;
  // An extremum inside the cell: two close roots or a near-double root.
  const double c = polish_bracket(ev, x0, x1, 1);
  const Jet jc = ev.jet(c, 0);
  const double gc = real_part(jc, 0);
  if (sign_of(gc) != sign_of(g0)) {
    RealRoot a{polish_bracket(ev, x0, c, 0), false};
    RealRoot b{polish_bracket(ev, c, x1, 0), false};
    out.push_back(a);
    out.push_back(b);
  } else if (std::abs(gc) <= 1e-24 * jc.magnitude) {
    out.push_back({c, true});
  }
}

// Scan outward from s_from to s_to; stops after max_count roots.
std::vector<RealRoot> scan_outward(const Evaluator& ev, int dir, double s_from, double s_to,
                                   int max_count, bool* truncated) {
  std::vector<RealRoot> out;
  double s = s_from;
  Jet j0 = ev.jet(dir * s, 1);
  while (s < s_to) {
    const double h = std::max(kMinScanStep, s / 50.0);
    const double s1 = std::min(s + h, s_to);
    Jet j1 = ev.jet(dir * s1, 1);
    examine_cell(ev, dir, s, s1, j0, j1, out);
    if (static_cast<int>(out.size()) >= max_count) {
      if (static_cast<int>(out.size()) > max_count || s1 < s_to) {
        if (truncated) *truncated = static_cast<int>(out.size()) > max_count || s1 < s_to;
      }
      out.resize(std::min<std::size_t>(out.size(), max_count));
      return out;
    }
    s = s1;
    j0 = j1;
  }
  return out;
}

std::vector<RealRoot> scan_window(const Evaluator& ev, double x_min, double x_max, int max_count,
                                  bool* truncated) {
  if (!(x_min < x_max)) throw std::invalid_argument("window needs x_min < x_max");
  if (max_count < 1) throw std::invalid_argument("max_count must be positive");
  std::vector<RealRoot> roots;
  auto append = [&](int dir, double a, double b) {
    bool tr = false;
    auto part = scan_outward(ev, dir, a, b, max_count, &tr);
    if (tr) *truncated = true;
    roots.insert(roots.end(), part.begin(), part.end());
  };
  if (x_min >= 0) append(1, x_min, x_max);
  else if (x_max <= 0) append(-1, -x_max, -x_min);
  else {
    append(-1, 0.0, -x_min);
    append(1, 0.0, x_max);
  }
  std::sort(roots.begin(), roots.end(),
            [](const RealRoot& a, const RealRoot& b) { return std::abs(a.x) < std::abs(b.x); });
  if (static_cast<int>(roots.size()) > max_count) {
    roots.resize(max_count);
    *truncated = true;
  }
  return roots;
}

std::optional<cd> newton_complex(const Evaluator& ev, cd z, double max_move) {
  const cd start = z;
  for (int it = 0; it < 100; ++it) {
    Jet j = ev.jet(z, 1);
    cd dz = j.d[0] / j.d[1];
    if (!std::isfinite(dz.real()) || !std::isfinite(dz.imag())) return std::nullopt;
    const double lim = 0.5 * (1.0 + std::abs(z));
    if (std::abs(dz) > lim) dz *= lim / std::abs(dz);
    z -= dz;
    if (std::abs(z - start) > max_move) return std::nullopt;
    if (std::abs(dz) <= 8 * kEps * std::max(std::abs(z), 1e-3)) {
      Jet jf = ev.jet(z, 1);
      cd last = jf.d[0] / jf.d[1];
      if (std::isfinite(last.real()) && std::isfinite(last.imag())) z -= last;
      return z;
    }
  }
  return std::nullopt;
}

std::optional<double> newton_real(const Evaluator& ev, double x, double max_move) {
  const double start = x;
  for (int it = 0; it < 60; ++it) {
    Jet j = ev.jet(x, 1);
    const double dx = real_part(j, 0) / real_part(j, 1);
    if (!std::isfinite(dx)) return std::nullopt;
    x -= dx;
    if (std::abs(x - start) > max_move) return std::nullopt;
    if (std::abs(dx) <= 8 * kEps * std::max(std::abs(x), 1e-3)) return x;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Argument principle

double wrap_angle(double a) {
  while (a > std::numbers::pi) a -= 2 * std::numbers::pi;
  while (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
  return a;
}

struct ContourSampler {
  const Evaluator& ev;
  bool hit_zero = false;

  cd value(cd z) {
    Jet j = ev.jet(z, 0);
    if (std::abs(j.d[0]) <= 1e-26 * j.magnitude) hit_zero = true;
    return j.d[0];
  }
};

template <class Path>
double accumulate_arg(ContourSampler& sm, Path path, double t0, double t1, cd g0, cd g1,
                      int depth) {
  const double da = wrap_angle(std::arg(g1) - std::arg(g0));
  if (std::abs(da) < std::numbers::pi / 4 || depth > 18) return da;
  const double tm = 0.5 * (t0 + t1);
  const cd gm = sm.value(path(tm));
  return accumulate_arg(sm, path, t0, tm, g0, gm, depth + 1) +
         accumulate_arg(sm, path, tm, t1, gm, g1, depth + 1);
}

template <class Path>
int winding(const Evaluator& ev, Path path, int samples) {
  ContourSampler sm{ev};
  double total = 0;
  cd g_prev = sm.value(path(0.0));
  const cd g_first = g_prev;
  for (int i = 1; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    const cd g = i == samples ? g_first : sm.value(path(t));
    total += accumulate_arg(sm, path, static_cast<double>(i - 1) / samples, t, g_prev, g, 0);
    g_prev = g;
  }
  if (sm.hit_zero) return -1;
  return static_cast<int>(std::lround(total / (2 * std::numbers::pi)));
}

int disk_count(const Evaluator& ev, double radius) {
  auto path = [radius](double t) { return std::polar(radius, 2 * std::numbers::pi * t); };
  return winding(ev, path, 512);
}

int rect_winding(const Evaluator& ev, cd c, double hw, double hh) {
  auto path = [c, hw, hh](double t) {
    const double u = 4 * t;
    if (u < 1) return c + cd(-hw + 2 * hw * u, -hh);
    if (u < 2) return c + cd(hw, -hh + 2 * hh * (u - 1));
    if (u < 3) return c + cd(hw - 2 * hw * (u - 2), hh);
    return c + cd(-hw, hh - 2 * hh * (u - 3));
  };
  return winding(ev, path, 64);
}

// ---------------------------------------------------------------------------
// Local root count used by the tracker near a colliding pair.

struct LocalCount {
  int count = 0;
  std::vector<double> roots;  // sorted ascending
  double critical = 0.0;      // extremum with the smallest |g| relative to scale
  bool has_critical = false;
};

LocalCount local_count(const Evaluator& ev, double lo, double hi) {
  constexpr int kCells = 48;
  LocalCount lc;
  std::vector<RealRoot> found;
  double best = std::numeric_limits<double>::infinity();
  Jet j0 = ev.jet(lo, 1);
  for (int i = 1; i <= kCells; ++i) {
    const double x0 = lo + (hi - lo) * (i - 1) / kCells;
    const double x1 = lo + (hi - lo) * i / kCells;
    Jet j1 = ev.jet(x1, 1);
    if (sign_of(real_part(j0, 1)) != sign_of(real_part(j1, 1))) {
      const double c = polish_bracket(ev, x0, x1, 1);
      Jet jc = ev.jet(c, 0);
      const double rel = std::abs(real_part(jc, 0)) / jc.magnitude;
      if (rel < best) {
        best = rel;
        lc.critical = c;
        lc.has_critical = true;
      }
    }
    examine_cell(ev, 1, x0, x1, j0, j1, found);
    j0 = j1;
  }
  for (const auto& r : found) lc.roots.push_back(r.x);
  std::sort(lc.roots.begin(), lc.roots.end());
  lc.count = static_cast<int>(lc.roots.size());
  return lc;
}

// ---------------------------------------------------------------------------
// Continuation

struct Slot {
  cd z;
  RootKind kind = RootKind::RealAxis;
};

struct Tracker {
  FunctionSpec base;
  RootTarget target;
  double q = 0.0;
  std::vector<Slot> slots;  // modulus order at the start; pair partners adjacent
  std::vector<CollisionEvent> events;

  Evaluator at(double qq) const { return target_evaluator(base.with_q(qq), target); }

  // g_q / g' at z for the current q (predictor direction is minus this).
  cd velocity(const Evaluator& ev, const Evaluator& lo, const Evaluator& hi, cd z) const {
    const cd gq = (hi.value(z) - lo.value(z)) / (2 * kQDiff);
    return -gq / ev.jet(z, 1).d[1];
  }

  std::vector<int> real_slots() const {
    std::vector<int> idx;
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
      if (slots[i].kind == RootKind::RealAxis) idx.push_back(i);
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return slots[a].z.real() < slots[b].z.real(); });
    return idx;
  }

  double nearest_other(int i) const {
    double d = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(slots.size()); ++k)
      if (k != i) d = std::min(d, std::abs(slots[k].z - slots[i].z));
    return d;
  }

  // Attempt one step to q_new; false means retry with a smaller step.
  bool advance(double q_new);
};

bool Tracker::advance(double q_new) {
  const double dq = q_new - q;
  const Evaluator ev_old = at(q);
  const Evaluator ev_lo = at(q - kQDiff);
  const Evaluator ev_hi = at(q + kQDiff);
  const Evaluator ev_new = at(q_new);
  std::vector<Slot> next = slots;

  // Complex representatives.
  for (int i = 0; i < static_cast<int>(slots.size()); ++i) {
    if (slots[i].kind != RootKind::ConjugatePairUpper) continue;
    const cd z = slots[i].z;
    const double room = 0.25 * nearest_other(i);
    cd pred = z + dq * velocity(ev_old, ev_lo, ev_hi, z);
    if (std::abs(pred - z) > room) return false;
    auto zn = newton_complex(ev_new, pred, room);
    if (!zn || zn->imag() <= 0 || std::abs(*zn - pred) > room) return false;
    next[i].z = *zn;
    // The lower partner is the following slot.
    next[i + 1].z = std::conj(*zn);
  }

  // Real roots, in ascending x.
  const std::vector<int> reals = real_slots();
  const int nr = static_cast<int>(reals.size());
  std::vector<bool> suspicious(nr, false);
  std::vector<double> xn(nr);
  auto gap = [&](int a, int b) { return std::abs(slots[reals[a]].z.real() - slots[reals[b]].z.real()); };
  for (int k = 0; k < nr; ++k) {
    const double x = slots[reals[k]].z.real();
    double room = std::numeric_limits<double>::infinity();
    if (k > 0) room = std::min(room, gap(k - 1, k));
    if (k + 1 < nr) room = std::min(room, gap(k, k + 1));
    for (int i = 0; i < static_cast<int>(slots.size()); ++i)
      if (slots[i].kind != RootKind::RealAxis) room = std::min(room, std::abs(slots[i].z - x));
    if (!std::isfinite(room)) room = std::max(1.0, std::abs(x));
    room *= 0.25;
    const double v = velocity(ev_old, ev_lo, ev_hi, x).real();
    double pred = x + dq * v;
    if (!std::isfinite(pred) || std::abs(pred - x) > room) {
      suspicious[k] = true;
      xn[k] = x;
      continue;
    }
    auto r = newton_real(ev_new, pred, room);
    if (!r) {
      suspicious[k] = true;
      xn[k] = x;
      continue;
    }
    xn[k] = *r;
  }
  for (int k = 0; k + 1 < nr; ++k) {
    const double old_gap = gap(k, k + 1);
    const double new_gap = xn[k + 1] - xn[k];
    if (new_gap < 0.5 * old_gap) suspicious[k] = suspicious[k + 1] = true;
  }

  // Resolve suspicious roots pairwise with the local count.
  std::vector<bool> handled(nr, false);
  for (int k = 0; k < nr; ++k) {
    if (!suspicious[k] || handled[k]) continue;
    // Partner: the suspicious neighbour with the smaller gap.
    int partner = -1;
    const bool left_ok = k > 0 && !handled[k - 1];
    const bool right_ok = k + 1 < nr;
    if (left_ok && right_ok) partner = gap(k - 1, k) < gap(k, k + 1) ? k - 1 : k + 1;
    else if (right_ok) partner = k + 1;
    else if (left_ok) partner = k - 1;
    if (partner < 0) return false;
    const int a = std::min(k, partner), b = std::max(k, partner);
    const double u = slots[reals[a]].z.real(), w = slots[reals[b]].z.real();
    const double pg = w - u;
    double lo = a > 0 ? u - 0.45 * gap(a - 1, a) : u - 0.45 * pg;
    double hi = b + 1 < nr ? w + 0.45 * gap(b, b + 1) : w + 0.45 * pg;
    LocalCount lc = local_count(ev_new, lo, hi);
    handled[a] = handled[b] = true;
    if (lc.count == 2) {
      xn[a] = lc.roots[0];
      xn[b] = lc.roots[1];
      continue;
    }
    if (lc.count != 0 || !lc.has_critical) return false;
    // The pair left the axis between q and q_new: locate the collision.
    double qa = q, qb = q_new;
    double loc = lc.critical;
    while (qb - qa > 1e-11 * std::max(1.0, qb)) {
      const double qm = 0.5 * (qa + qb);
      LocalCount m = local_count(at(qm), lo, hi);
      if (m.count >= 2) qa = qm;
      else if (m.count == 0) {
        qb = qm;
        if (m.has_critical) loc = m.critical;
      } else {
        break;
      }
    }
    const double c = lc.critical;
    const Jet jc = ev_new.jet(c, 2);
    const double ratio = 2 * real_part(jc, 0) / real_part(jc, 2);
    if (!(ratio > 0)) return false;
    const cd seed(c, std::sqrt(ratio));
    auto z = newton_complex(ev_new, seed, 0.45 * pg + std::sqrt(ratio));
    if (!z || z->imag() <= 0) return false;
    const int sa = reals[a], sb = reals[b];
    // Keep the upper representative in the lower slot index.
    const int up = std::min(sa, sb), dn = std::max(sa, sb);
    next[up] = {*z, RootKind::ConjugatePairUpper};
    next[dn] = {std::conj(*z), RootKind::ConjugatePairLower};
    events.push_back({0.5 * (qa + qb), loc, up});
    xn[a] = xn[b] = std::numeric_limits<double>::quiet_NaN();
  }
  for (int k = 0; k < nr; ++k)
    if (!std::isnan(xn[k])) next[reals[k]] = {cd(xn[k], 0.0), RootKind::RealAxis};

  // Partners must stay adjacent: upper slots followed by their lower partner.
  for (int i = 0; i < static_cast<int>(next.size()); ++i)
    if (next[i].kind == RootKind::ConjugatePairUpper &&
        (i + 1 >= static_cast<int>(next.size()) || next[i + 1].kind != RootKind::ConjugatePairLower))
      return false;
  slots = std::move(next);
  q = q_new;
  return true;
}

std::vector<Slot> initial_slots(const std::vector<cd>& tracked) {
  std::vector<cd> sorted = tracked;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](cd a, cd b) { return std::abs(a) < std::abs(b); });
  std::vector<Slot> slots;
  for (cd z : sorted) {
    if (z.imag() == 0.0) slots.push_back({z, RootKind::RealAxis});
    else if (z.imag() > 0) {
      slots.push_back({z, RootKind::ConjugatePairUpper});
      slots.push_back({std::conj(z), RootKind::ConjugatePairLower});
    }
    // lower-half inputs are implied by their upper partner
  }
  return slots;
}

// Runs the tracker; `stop` is polled after each accepted grid row.
template <class Stop>
Trajectory run_continuation(const FunctionSpec& spec, RootTarget target, double q_from, double q_to,
                            int steps, const std::vector<cd>& tracked, Stop stop) {
  if (!(q_to > q_from)) throw std::invalid_argument("continuation needs q_to > q_from");
  if (steps < 1) throw std::invalid_argument("steps must be positive");
  if (!(q_from > 0)) throw DomainError("q must be positive");
  Tracker tr{canonical(spec), target, q_from, initial_slots(tracked), {}};
  Trajectory out;
  out.target = target;
  auto record = [&]() {
    out.q.push_back(tr.q);
    std::vector<cd> row;
    std::vector<RootKind> kinds;
    for (const auto& s : tr.slots) {
      row.push_back(s.z);
      kinds.push_back(s.kind);
    }
    out.roots.push_back(std::move(row));
    out.kinds.push_back(std::move(kinds));
  };
  record();
  const double grid = (q_to - q_from) / steps;
  double dq = grid;
  for (int k = 1; k <= steps; ++k) {
    const double q_target = k == steps ? q_to : q_from + k * grid;
    while (tr.q < q_target) {
      const double q_new = std::min(q_target, tr.q + dq);
      bool ok = false;
      try {
        ok = tr.advance(q_new);
      } catch (const ConvergenceError&) {
        ok = false;
      }
      if (ok) {
        dq = std::min(grid, dq * 1.5);
        continue;
      }
      dq *= 0.5;
      if (dq < kQStepFloor) {
        out.truncated = true;
        std::ostringstream os;
        os.precision(10);
        os << "step size underflow at q=" << tr.q;
        out.note = os.str();
        out.events = tr.events;
        return out;
      }
    }
    record();
    if (stop(tr)) break;
  }
  out.events = tr.events;
  return out;
}

std::vector<cd> first_real_roots(const Evaluator& ev, const FunctionSpec& spec, int K) {
  bool tr = false;
  auto rr = scan_outward(ev, scan_direction(spec), 0.0, reach(spec), K, &tr);
  std::vector<cd> out;
  for (const auto& r : rr) out.emplace_back(r.x, 0.0);
  return out;
}

// Upper-half-plane roots at spec's q obtained from K roots real at q_start.
std::vector<cd> complex_by_continuation(const FunctionSpec& spec, RootTarget target, int K,
                                        std::string* note) {
  const double q = spec.qp.q;
  const double q_start = std::min(0.1, 0.5 * q);
  const FunctionSpec s0 = spec.with_q(q_start);
  auto start = first_real_roots(target_evaluator(s0, target), s0, K);
  if (static_cast<int>(start.size()) < K) {
    if (note) *note = "not enough real roots at the continuation start";
    if (start.size() < 2) return {};
  }
  const int steps = std::max(8, static_cast<int>(std::ceil((q - q_start) / 0.01)));
  Trajectory t = run_continuation(spec, target, q_start, q, steps, start,
                                  [](const Tracker&) { return false; });
  if (t.truncated) {
    if (note) *note = t.note;
    return {};
  }
  std::vector<cd> out;
  for (std::size_t i = 0; i < t.roots.back().size(); ++i)
    if (t.kinds.back()[i] == RootKind::ConjugatePairUpper) out.push_back(t.roots.back()[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Records

template <class Record>
Record make_record(const FunctionSpec& spec, RootTarget target, cd z, RootKind kind,
                   bool near_degenerate) {
  Record r;
  r.location = z;
  r.kind = kind;
  r.spec = spec;
  r.near_degenerate = near_degenerate;
  const Evaluator raw(spec, target == RootTarget::Turning ? 1 : 0, false);
  r.residual = std::abs(raw.value(z));
  double scale = 0.0;
  for (cd off : {cd(1, 0), cd(-1, 0), cd(0, 1), cd(0, -1)}) {
    try {
      scale = std::max(scale, std::abs(raw.value(z + off)));
    } catch (const DomainError&) {
    }
  }
  r.scale = scale;
  if constexpr (std::is_same_v<Record, TurningPointRecord>) {
    const Evaluator f(spec, 0, false);
    r.branch_value = f.value(z);
  }
  return r;
}

template <class Record>
void certify(RootList<Record>& list, RootTarget target) {
  if (list.roots.empty()) return;
  const FunctionSpec& spec = list.roots.front().spec;
  const Evaluator ev = target_evaluator(spec, target);
  for (auto& r : list.roots) {
    if (r.near_degenerate) continue;
    double d = std::numeric_limits<double>::infinity();
    for (const auto& o : list.roots)
      if (&o != &r) d = std::min(d, std::abs(o.location - r.location));
    double h = std::min(0.3 * d, 0.05 * (1.0 + std::abs(r.location)));
    if (r.kind != RootKind::RealAxis) h = std::min(h, 0.9 * std::abs(r.location.imag()));
    if (!std::isfinite(h) || h <= 0) continue;
    try {
      r.certified = rect_winding(ev, r.location, h, h) == 1;
    } catch (const std::exception&) {
      r.certified = false;
    }
  }
}

template <class Record>
void sort_and_index(RootList<Record>& list) {
  std::stable_sort(list.roots.begin(), list.roots.end(), [](const Record& a, const Record& b) {
    const double ma = std::abs(a.location), mb = std::abs(b.location);
    if (ma != mb) return ma < mb;
    return a.location.imag() > b.location.imag();
  });
  for (std::size_t i = 0; i < list.roots.size(); ++i) list.roots[i].index = static_cast<int>(i) + 1;
}

template <class Record>
void add_pair(RootList<Record>& list, const FunctionSpec& spec, RootTarget target, cd z) {
  z = cd(z.real(), std::abs(z.imag()));
  list.roots.push_back(make_record<Record>(spec, target, z, RootKind::ConjugatePairUpper, false));
  Record lower = list.roots.back();
  lower.location = std::conj(z);
  lower.kind = RootKind::ConjugatePairLower;
  if constexpr (std::is_same_v<Record, TurningPointRecord>)
    lower.branch_value = std::conj(list.roots.back().branch_value);
  list.roots.push_back(lower);
}

template <class Record>
RootList<Record> real_roots(const FunctionSpec& spec_in, RootTarget target, double x_min,
                            double x_max, int max_count) {
  const FunctionSpec spec = canonical(spec_in);
  const Evaluator ev = target_evaluator(spec, target);
  RootList<Record> list;
  auto roots = scan_window(ev, x_min, x_max, max_count, &list.truncated);
  for (const auto& r : roots)
    list.roots.push_back(
        make_record<Record>(spec_in, target, cd(r.x, 0), RootKind::RealAxis, r.near_degenerate));
  if (list.truncated) list.notes.push_back("max_count reached");
  sort_and_index(list);
  certify(list, target);
  return list;
}

std::vector<cd> dedupe(std::vector<cd> zs) {
  std::vector<cd> out;
  for (cd z : zs) {
    bool dup = false;
    for (cd o : out) dup = dup || std::abs(o - z) <= 1e-9 * (1 + std::abs(z));
    if (!dup) out.push_back(z);
  }
  return out;
}

template <class Record>
RootList<Record> complex_roots(const FunctionSpec& spec_in, RootTarget target, int pairs,
                               const std::vector<cd>& seeds) {
  if (pairs < 1) throw std::invalid_argument("pair count must be positive");
  const FunctionSpec spec = canonical(spec_in);
  const Evaluator ev = target_evaluator(spec, target);
  RootList<Record> list;
  std::vector<cd> found;
  if (!seeds.empty()) {
    for (cd s : seeds) {
      auto z = newton_complex(ev, s, 0.5 * (1 + std::abs(s)));
      if (!z) {
        std::ostringstream os;
        os << "seed (" << s.real() << "," << s.imag() << ") rejected: Newton diverged";
        list.notes.push_back(os.str());
        continue;
      }
      if (std::abs(z->imag()) <= 1e-12 * (1 + std::abs(*z))) {
        list.notes.push_back("seed converged to a real root");
        continue;
      }
      found.push_back(cd(z->real(), std::abs(z->imag())));
    }
  } else {
    if (spec.qp.jackson()) throw DomainError("continuation seeding needs the symmetric convention");
    for (int K = 2 * pairs + 2; K <= 2 * pairs + 8; K += 2) {
      std::string note;
      found = complex_by_continuation(spec, target, K, &note);
      if (trig_family(spec)) {
        std::vector<cd> right;
        for (cd z : found)
          if (z.real() > 0) right.push_back(z);
        found = right;
      }
      if (!note.empty()) list.notes.push_back(note);
      if (static_cast<int>(found.size()) >= pairs) break;
    }
  }
  found = dedupe(found);
  std::sort(found.begin(), found.end(), [](cd a, cd b) { return std::abs(a) < std::abs(b); });
  if (static_cast<int>(found.size()) > pairs) found.resize(pairs);
  if (static_cast<int>(found.size()) < pairs) {
    list.truncated = true;
    list.complete = false;
    list.notes.push_back("fewer complex pairs found than requested");
  }
  for (cd z : found) add_pair(list, spec_in, target, z);
  sort_and_index(list);
  certify(list, target);
  return list;
}

template <class Record>
RootList<Record> first_roots(const FunctionSpec& spec_in, RootTarget target, int count) {
  if (count < 1) throw std::invalid_argument("count must be positive");
  const FunctionSpec spec = canonical(spec_in);
  const bool trig = trig_family(spec);
  const Evaluator ev = target_evaluator(spec, target);
  const int dir = scan_direction(spec);
  bool tr = false;
  auto reals = scan_outward(ev, dir, 0.0, reach(spec), count + 1, &tr);

  RootList<Record> list;
  double R;
  if (static_cast<int>(reals.size()) >= count + 1)
    R = std::sqrt(std::abs(reals[count - 1].x) * std::abs(reals[count].x));
  else if (!reals.empty())
    R = std::min(reach(spec), 2 * std::max(4.0, std::abs(reals.back().x)));
  else
    R = std::min(reach(spec), 16.0);

  int inside = 0;
  for (const auto& r : reals)
    if (std::abs(r.x) < R) ++inside;
  const int per_real = trig ? 2 : 1;
  const int per_pair = trig ? 4 : 2;
  std::vector<cd> cplx;
  int total = -1;
  try {
    total = disk_count(ev, R);
  } catch (const std::exception&) {
    total = -1;
  }
  if (total < 0) {
    list.complete = false;
    list.notes.push_back("argument-principle count failed");
  } else {
    const int missing = total - per_real * inside;
    if (missing < 0 || missing % per_pair != 0) {
      list.complete = false;
      list.notes.push_back("root count inconsistent with the real scan");
    } else if (missing > 0) {
      const int need = missing / per_pair;
      if (spec.qp.jackson()) {
        list.complete = false;
        list.notes.push_back("complex roots present but continuation needs the symmetric convention");
      } else {
        for (int K = missing / (trig ? 2 : 1) + 2; K <= missing / (trig ? 2 : 1) + 8; K += 2) {
          std::string note;
          auto got = complex_by_continuation(spec, target, K, &note);
          cplx.clear();
          for (cd z : got)
            if (std::abs(z) < R && (!trig || z.real() > 0)) cplx.push_back(z);
          cplx = dedupe(cplx);
          if (static_cast<int>(cplx.size()) == need) break;
        }
        if (static_cast<int>(cplx.size()) != need) {
          list.complete = false;
          list.notes.push_back("continuation did not recover every complex root inside the disk");
        }
      }
    }
  }
  if (tr && static_cast<int>(reals.size()) < count) list.truncated = true;

  for (const auto& r : reals)
    if (std::abs(r.x) < R || static_cast<int>(list.roots.size()) < count)
      list.roots.push_back(
          make_record<Record>(spec_in, target, cd(r.x, 0), RootKind::RealAxis, r.near_degenerate));
  for (cd z : cplx) add_pair(list, spec_in, target, z);
  sort_and_index(list);
  // Trim to count, never splitting a conjugate pair.
  if (static_cast<int>(list.roots.size()) > count) {
    int keep = count;
    if (list.roots[keep - 1].kind == RootKind::ConjugatePairUpper) ++keep;
    list.roots.resize(keep);
  }
  if (static_cast<int>(list.roots.size()) < count) list.truncated = true;
  certify(list, target);
  return list;
}

}  // namespace

ZeroList find_real_zeros(const FunctionSpec& spec, double x_min, double x_max, int max_count) {
  return real_roots<ZeroRecord>(spec, RootTarget::Zero, x_min, x_max, max_count);
}

TurningList find_real_turning_points(const FunctionSpec& spec, double x_min, double x_max,
                                     int max_count) {
  return real_roots<TurningPointRecord>(spec, RootTarget::Turning, x_min, x_max, max_count);
}

ZeroList find_complex_zeros(const FunctionSpec& spec, int pairs, const std::vector<cd>& seeds) {
  return complex_roots<ZeroRecord>(spec, RootTarget::Zero, pairs, seeds);
}

TurningList find_complex_turning_points(const FunctionSpec& spec, int pairs,
                                        const std::vector<cd>& seeds) {
  return complex_roots<TurningPointRecord>(spec, RootTarget::Turning, pairs, seeds);
}

ZeroList find_zeros(const FunctionSpec& spec, int count) {
  return first_roots<ZeroRecord>(spec, RootTarget::Zero, count);
}

TurningList find_turning_points(const FunctionSpec& spec, int count) {
  return first_roots<TurningPointRecord>(spec, RootTarget::Turning, count);
}

Trajectory continue_in_q(const FunctionSpec& spec, RootTarget target, double q_from, double q_to,
                         int steps, const std::vector<cd>& tracked) {
  if (!spec.qp.jackson() && (q_from > 1.0 || q_to > 1.0))
    throw DomainError("symmetric continuation runs on 0 < q <= 1");
  return run_continuation(spec, target, q_from, q_to, steps, tracked,
                          [](const Tracker&) { return false; });
}

int count_roots_in_disk(const FunctionSpec& spec, RootTarget target, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("radius must be positive");
  return disk_count(target_evaluator(canonical(spec), target), radius);
}

int winding_number(const FunctionSpec& spec, RootTarget target, cd center, double half_width,
                   double half_height) {
  if (!(half_width > 0 && half_height > 0)) throw std::invalid_argument("rectangle must be non-empty");
  return rect_winding(target_evaluator(canonical(spec), target), center, half_width, half_height);
}

CollisionResult collision_point(const FunctionSpec& spec_in, RootTarget target, int pair) {
  if (pair < 1) throw std::invalid_argument("pair index must be >= 1");
  CollisionResult res;
  res.target = target;
  res.pair = pair;
  const FunctionSpec spec = canonical(spec_in);
  const int K = 2 * pair + 2;
  double q_lo, q_hi;
  int steps;
  if (spec.qp.jackson()) {
    q_lo = 1.05;
    q_hi = 10.0;
    steps = 400;
  } else {
    q_lo = 0.05;
    q_hi = 1.0;
    steps = 95;
  }
  const FunctionSpec s0 = spec.with_q(q_lo);
  auto start = first_real_roots(target_evaluator(s0, target), s0, K);
  if (static_cast<int>(start.size()) < 2 * pair) {
    res.note = "not enough real roots at the scan start";
    return res;
  }
  const int slot = 2 * (pair - 1);
  auto stop = [slot](const Tracker& t) {
    for (const auto& e : t.events)
      if (e.slot == slot) return true;
    return false;
  };
  Trajectory traj = run_continuation(spec, target, q_lo, q_hi, steps, start, stop);
  const CollisionEvent* ev = nullptr;
  for (const auto& e : traj.events)
    if (e.slot == slot) ev = &e;
  if (!ev) {
    std::ostringstream os;
    os << "no collision of pair " << pair << " for q in [" << q_lo << ", " << q_hi << "]";
    if (traj.truncated) os << "; " << traj.note;
    res.note = os.str();
    return res;
  }
  res.found = true;
  res.q_star = ev->q;
  res.location = ev->location;
  res.bracket_width = 1e-11 * std::max(1.0, ev->q);

  // Newton on (g, g') = 0 in (x, q).
  double x = ev->location, q = ev->q;
  for (int it = 0; it < 30; ++it) {
    Tracker tr{spec, target, q, {}, {}};
    const Evaluator e0 = tr.at(q), elo = tr.at(q - kQDiff), ehi = tr.at(q + kQDiff);
    const Jet j = e0.jet(x, 2), jl = elo.jet(x, 1), jh = ehi.jet(x, 1);
    const double F = real_part(j, 0), G = real_part(j, 1);
    const double Fx = real_part(j, 1), Gx = real_part(j, 2);
    const double Fq = (real_part(jh, 0) - real_part(jl, 0)) / (2 * kQDiff);
    const double Gq = (real_part(jh, 1) - real_part(jl, 1)) / (2 * kQDiff);
    const double det = Fx * Gq - Fq * Gx;
    if (det == 0 || !std::isfinite(det)) break;
    const double dx = (F * Gq - Fq * G) / det;
    const double dqq = (Fx * G - F * Gx) / det;
    x -= dx;
    q -= dqq;
    if (std::abs(dx) < 1e-13 * (1 + std::abs(x)) && std::abs(dqq) < 1e-14) break;
  }
  if (std::isfinite(q) && std::abs(q - ev->q) < 1e-6) {
    res.q_star = q;
    res.location = x;
  } else {
    res.note = "Newton refinement rejected; bisection value kept";
  }
  return res;
}

}  // namespace qlog
