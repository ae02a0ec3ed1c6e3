#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <complex>
#include <type_traits>

namespace qlog {

// Working precision for series and coefficient recurrences. The public API
// rounds to double on the way out.
using Wide = boost::multiprecision::float128;

// Used where reconstructions cancel more than binary128 can absorb.
using Extended = boost::multiprecision::cpp_bin_float_100;

// std::complex<T> is unspecified for non-builtin T, so a minimal pair type.
template <class T>
struct Cx {
  T re{0};
  T im{0};

  Cx() = default;
  Cx(T r) : re(r) {}
  template <class U>
    requires std::is_arithmetic_v<U>
  Cx(U r) : re(r) {}
  Cx(T r, T i) : re(r), im(i) {}
  static Cx from(std::complex<double> z) { return Cx(T(z.real()), T(z.imag())); }

  Cx& operator+=(const Cx& o) { re += o.re; im += o.im; return *this; }
  Cx& operator-=(const Cx& o) { re -= o.re; im -= o.im; return *this; }
  Cx& operator*=(const Cx& o) {
    T r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  Cx& operator*=(const T& s) { re *= s; im *= s; return *this; }
  Cx& operator/=(const T& s) { re /= s; im /= s; return *this; }

  friend Cx operator+(Cx a, const Cx& b) { return a += b; }
  friend Cx operator-(Cx a, const Cx& b) { return a -= b; }
  friend Cx operator*(Cx a, const Cx& b) { return a *= b; }
  friend Cx operator*(Cx a, const T& s) { return a *= s; }
  friend Cx operator*(const T& s, Cx a) { return a *= s; }
  friend Cx operator/(Cx a, const T& s) { return a /= s; }
  friend Cx operator/(const Cx& a, const Cx& b) {
    T d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  Cx operator-() const { return {-re, -im}; }

  T norm() const { return re * re + im * im; }
  T abs() const {
    using std::hypot;
    return hypot(re, im);
  }
  Cx conj() const { return {re, -im}; }

  std::complex<double> to_std() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

using WideCx = Cx<Wide>;

// Neumaier compensated accumulator.
template <class T>
class CompensatedSum {
 public:
  void add(const T& x) {
    using std::abs;
    T t = sum_ + x;
    if (abs(sum_) >= abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

template <class T>
class CompensatedCxSum {
 public:
  void add(const Cx<T>& z) { re_.add(z.re); im_.add(z.im); }
  Cx<T> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<T> re_, im_;
};

}  // namespace qlog
