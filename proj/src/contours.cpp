#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>

#include "evaluator.hpp"
#include "qlog/zeroscape.hpp"

namespace qlog {

namespace {

using cd = std::complex<double>;

// Crossing points are keyed by the grid edge they sit on; a crossing exactly
// at a vertex is keyed by the vertex so that neighbouring cells chain.
using Key = std::pair<long, int>;  // (vertex id, edge dir: 0 = +x, 1 = +y, 2 = vertex)

struct Crossing {
  Key key;
  cd z;
};

}  // namespace

ContourSet extract_contours(const FunctionSpec& spec, const Window& window, int grid_n,
                            ContourField field) {
  if (grid_n < 16) throw std::invalid_argument("grid_n must be at least 16");
  if (!(window.x_min < window.x_max && window.y_min < window.y_max))
    throw std::invalid_argument("window must have positive extent");
  const detail::Evaluator ev(spec, 0, false);
  const int n = grid_n;
  const double hx = (window.x_max - window.x_min) / n;
  const double hy = (window.y_max - window.y_min) / n;
  auto node = [&](int i, int j) { return cd(window.x_min + i * hx, window.y_min + j * hy); };
  auto pick = [field](cd w) { return field == ContourField::ReZero ? w.real() : w.imag(); };
  auto id = [n](int i, int j) { return static_cast<long>(j) * (n + 1) + i; };

  std::vector<double> F(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) F[id(i, j)] = pick(ev.value(node(i, j)));

  // Exact zeros count as negative, so a zero set lying on grid lines is traced once.
  auto neg = [](double v) { return v <= 0.0; };
  double tolerance = 0.0;

  auto crossing = [&](int i0, int j0, int i1, int j1) -> Crossing {
    const double a = F[id(i0, j0)], b = F[id(i1, j1)];
    tolerance = std::max({tolerance, std::abs(a), std::abs(b)});
    if (a == 0.0) return {{id(i0, j0), 2}, node(i0, j0)};
    if (b == 0.0) return {{id(i1, j1), 2}, node(i1, j1)};
    const double t = a / (a - b);
    const int dir = i1 != i0 ? 0 : 1;
    return {{id(std::min(i0, i1), std::min(j0, j1)), dir}, node(i0, j0) + t * (node(i1, j1) - node(i0, j0))};
  };

  std::vector<std::pair<Crossing, Crossing>> segments;
  std::set<std::pair<Key, Key>> seen;
  auto emit = [&](const Crossing& a, const Crossing& b) {
    if (a.key == b.key) return;
    auto k = std::minmax(a.key, b.key);
    if (!seen.insert({k.first, k.second}).second) return;
    segments.push_back({a, b});
  };

  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      // corners counter-clockwise: 0 (i,j), 1 (i+1,j), 2 (i+1,j+1), 3 (i,j+1)
      const int ci[4] = {i, i + 1, i + 1, i};
      const int cj[4] = {j, j, j + 1, j + 1};
      int mask = 0;
      for (int c = 0; c < 4; ++c)
        if (neg(F[id(ci[c], cj[c])])) mask |= 1 << c;
      if (mask == 0 || mask == 15) continue;
      std::vector<Crossing> cuts;  // edge e joins corner e and e+1
      std::vector<int> edges;
      for (int e = 0; e < 4; ++e) {
        const int a = e, b = (e + 1) % 4;
        if (((mask >> a) & 1) != ((mask >> b) & 1)) {
          cuts.push_back(crossing(ci[a], cj[a], ci[b], cj[b]));
          edges.push_back(e);
        }
      }
      if (cuts.size() == 2) {
        emit(cuts[0], cuts[1]);
      } else if (cuts.size() == 4) {
        // Saddle: the centre value decides which corners connect.
        const double centre = pick(ev.value(node(i, j) + cd(hx / 2, hy / 2)));
        const bool centre_neg = neg(centre);
        const bool corner0_neg = (mask & 1) != 0;
        if (centre_neg == corner0_neg) {
          // corner 0's region reaches the centre: cut off corners 1 and 3
          emit(cuts[0], cuts[1]);
          emit(cuts[2], cuts[3]);
        } else {
          emit(cuts[3], cuts[0]);
          emit(cuts[1], cuts[2]);
        }
      }
    }
  }

  // Chain segments into polylines.
  std::map<Key, std::vector<int>> at;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    at[segments[s].first.key].push_back(s);
    at[segments[s].second.key].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  auto other_end = [&](int s, const Key& k) -> const Crossing& {
    return segments[s].first.key == k ? segments[s].second : segments[s].first;
  };
  auto extend = [&](std::vector<Crossing>& line) {
    for (;;) {
      const Key k = line.back().key;
      int nextseg = -1;
      for (int s : at[k])
        if (!used[s]) {
          nextseg = s;
          break;
        }
      if (nextseg < 0) return;
      used[nextseg] = true;
      line.push_back(other_end(nextseg, k));
    }
  };

  ContourSet out;
  out.field = field;
  out.spec = spec;
  out.window = window;
  out.grid_n = grid_n;
  // Start from loose ends first so open curves come out whole.
  std::vector<int> order;
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    if (at[segments[s].first.key].size() == 1 || at[segments[s].second.key].size() == 1)
      order.push_back(s);
  }
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) order.push_back(s);
  for (int s : order) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<Crossing> line;
    if (at[segments[s].first.key].size() == 1) {
      line = {segments[s].first, segments[s].second};
    } else {
      line = {segments[s].second, segments[s].first};
    }
    extend(line);
    std::reverse(line.begin(), line.end());
    extend(line);
    std::vector<cd> pts, imgs;
    for (const auto& c : line) {
      pts.push_back(c.z);
      imgs.push_back(ev.value(c.z));
    }
    out.polylines.push_back(std::move(pts));
    out.w_images.push_back(std::move(imgs));
  }
  out.tolerance = tolerance;
  return out;
}

}  // namespace qlog
