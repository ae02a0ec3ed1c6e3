#include <map>
#include <mutex>
#include <shared_mutex>
#include <tuple>

#include "series_core.hpp"

namespace qlog::detail {

void SeriesTable::extend(int n) {
  if (coeff.empty()) {
    coeff.push_back(series_lead<Wide>(spec, normalized));
    majorant.push_back(Wide(0));
  }
  while (size() < n) {
    const int m = size();
    coeff.push_back(coeff.back() * series_ratio<Wide>(spec, m));
    majorant.push_back(series_majorant<Wide>(spec, m));
  }
}

SeriesTable make_series_table(const FunctionSpec& s, bool normalized, int n) {
  SeriesTable t;
  t.spec = s;
  t.normalized = normalized;
  t.step = series_step(s.family);
  t.shift = series_shift(s, normalized);
  t.extend(n);
  return t;
}

namespace {

using Key = std::tuple<int, int, double, int, bool>;

struct TableCache {
  std::shared_mutex mu;
  std::map<Key, std::shared_ptr<const SeriesTable>> tables;
};

TableCache& table_cache() {
  static TableCache c;
  return c;
}

constexpr std::size_t kMaxCachedTables = 256;

}  // namespace

std::shared_ptr<const SeriesTable> cached_series_table(const FunctionSpec& s, bool normalized,
                                                       int min_terms) {
  const Key key{static_cast<int>(s.family), s.r, s.qp.q, static_cast<int>(s.qp.convention),
                normalized};
  auto& cache = table_cache();
  {
    std::shared_lock lock(cache.mu);
    auto it = cache.tables.find(key);
    if (it != cache.tables.end() && it->second->size() >= min_terms) return it->second;
  }
  std::unique_lock lock(cache.mu);
  auto it = cache.tables.find(key);
  if (it != cache.tables.end() && it->second->size() >= min_terms) return it->second;
  auto grown = std::make_shared<SeriesTable>(
      it != cache.tables.end() ? *it->second : make_series_table(s, normalized, 1));
  grown->extend(std::max(min_terms, 2 * grown->size()));
  if (cache.tables.size() >= kMaxCachedTables && it == cache.tables.end()) cache.tables.clear();
  cache.tables[key] = grown;
  return grown;
}

}  // namespace qlog::detail
