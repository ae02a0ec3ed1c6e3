#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "qlog/errors.hpp"
#include "qlog/precision.hpp"

namespace qlog {

// Composition sums are exponential in n; beyond this degree use the
// convolution recurrences instead.
inline constexpr int kMaxCompositionDegree = 24;

struct Composition {
  std::vector<int> parts;
  int n = 0;
  int l = 0;
};

// Ordered l-part compositions of n in lexicographic order, one at a time.
//
//   CompositionStream s(4, 2);
//   while (s.next()) use(s.parts());
class CompositionStream {
 public:
  CompositionStream(int n, int l);

  bool next();
  const std::vector<int>& parts() const { return parts_; }
  Composition current() const { return {parts_, n_, l_}; }
  // Lowest index changed by the last call to next().
  int changed_from() const { return changed_from_; }

 private:
  int n_, l_;
  std::vector<int> parts_;
  bool started_ = false;
  bool done_ = false;
  int changed_from_ = 0;
};

std::vector<Composition> compositions(int n, int l);
std::uint64_t composition_count(int n, int l);

double composition_sum(int n, int l, const std::function<double(const Composition&)>& weight);

// sum over compositions of prod_i x[k_i]; x indexed by part size (x[0] unused).
template <class T>
T composition_product_sum(int n, int l, const std::vector<T>& x) {
  if (n > kMaxCompositionDegree) throw DomainError("composition degree above cap");
  CompositionStream s(n, l);
  std::vector<T> prefix(static_cast<std::size_t>(l) + 1, T(1));
  CompensatedSum<T> acc;
  while (s.next()) {
    const auto& p = s.parts();
    for (int i = s.changed_from(); i < l; ++i) prefix[i + 1] = prefix[i] * x[p[i]];
    acc.add(prefix[l]);
  }
  return acc.value();
}

}  // namespace qlog
