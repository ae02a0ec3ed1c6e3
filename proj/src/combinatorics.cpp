#include "qlog/combinatorics.hpp"

#include <algorithm>

namespace qlog {

CompositionStream::CompositionStream(int n, int l) : n_(n), l_(l) {
  if (l < 1 || n < 1 || l > n) {
    done_ = true;
    return;
  }
  parts_.assign(static_cast<std::size_t>(l), 1);
  parts_.back() = n - l + 1;
}

bool CompositionStream::next() {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    changed_from_ = 0;
    return true;
  }
  // Rightmost slot that can grow while the tail stays all-positive.
  int tail = parts_[l_ - 1];
  for (int j = l_ - 2; j >= 0; --j) {
    if (tail > l_ - 1 - j) {
      ++parts_[j];
      --tail;
      for (int i = j + 1; i < l_ - 1; ++i) parts_[i] = 1;
      parts_[l_ - 1] = tail - (l_ - 2 - j);
      changed_from_ = j;
      return true;
    }
    tail += parts_[j];
  }
  done_ = true;
  return false;
}

std::vector<Composition> compositions(int n, int l) {
  std::vector<Composition> out;
  CompositionStream s(n, l);
  while (s.next()) out.push_back(s.current());
  return out;
}

std::uint64_t composition_count(int n, int l) {
  if (l < 1 || n < 1 || l > n) return 0;
  // C(n-1, l-1)
  std::uint64_t c = 1;
  int k = std::min(l - 1, n - l);
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - 1 - k + i) / i;
  return c;
}

double composition_sum(int n, int l, const std::function<double(const Composition&)>& weight) {
  if (n > kMaxCompositionDegree) throw DomainError("composition degree above cap");
  CompositionStream s(n, l);
  CompensatedSum<double> acc;
  while (s.next()) acc.add(weight(s.current()));
  return acc.value();
}

}  // namespace qlog
