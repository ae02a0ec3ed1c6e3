#pragma once

// Derivative jets of g = f^(d) for the zero engine. With `normalized` the
// prefactor (a_0, z for Sin, z^r/r! for integrals) is divided out so that
// origin zeros disappear.

#include <array>
#include <complex>
#include <memory>

#include "qlog/qnum.hpp"
#include "series_core.hpp"

namespace qlog::detail {

inline constexpr int kMaxJetOrder = 4;

struct Jet {
  std::array<std::complex<double>, kMaxJetOrder + 1> d{};
  double magnitude = 0.0;  // sum of |terms| of g, a rounding scale
};

class Evaluator {
 public:
  Evaluator(const FunctionSpec& spec, int d, bool normalized);

  Jet jet(std::complex<double> z, int order) const;
  std::complex<double> value(std::complex<double> z) const { return jet(z, 0).d[0]; }

  const FunctionSpec& spec() const { return spec_; }
  int derivative_order() const { return d_; }

 private:
  std::array<WideCx, 6> series_jet(const WideCx& z, int count, Wide* magnitude) const;
  std::array<WideCx, 6> reduced_jet(const WideCx& z, int count, Wide* magnitude) const;

  FunctionSpec spec_;
  int d_;
  bool normalized_;
  bool classical_;
  bool reducible_;  // Jackson q > 1 exponential: E(z) = prod_j (1 + (q-1) z / q^j) E(z / q^k)
  mutable std::shared_ptr<const SeriesTable> table_;
};

}  // namespace qlog::detail
