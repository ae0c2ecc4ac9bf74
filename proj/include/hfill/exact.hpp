#ifndef HFILL_EXACT_HPP_
#define HFILL_EXACT_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/gmp.hpp>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace hfill {

  // Fixed-width integer that throws std::overflow_error instead of wrapping.
  // Exact algorithms run on it first and retry on BigInt when it overflows.
  using SmallInt = boost::multiprecision::checked_int128_t;
  using BigInt   = boost::multiprecision::mpz_int;

  template <typename Int>
  Int gcd_abs(Int a, Int b) {
    if (a < 0) {
      a = -a;
    }
    if (b < 0) {
      b = -b;
    }
    while (b != 0) {
      Int t = a % b;
      a     = b;
      b     = t;
    }
    return a;
  }

  // Exact rational number in lowest terms with positive denominator.
  template <typename Int>
  class Fraction {
   public:
    Fraction() : _num(0), _den(1) {}
    Fraction(Int n) : _num(std::move(n)), _den(1) {}  // NOLINT
    Fraction(std::int64_t n) : _num(n), _den(1) {}    // NOLINT
    Fraction(int n) : _num(n), _den(1) {}             // NOLINT
    Fraction(Int n, Int d) : _num(std::move(n)), _den(std::move(d)) {
      if (_den == 0) {
        throw std::domain_error("zero denominator");
      }
      normalize();
    }

    Int const& num() const noexcept {
      return _num;
    }
    Int const& den() const noexcept {
      return _den;
    }
    bool is_zero() const {
      return _num == 0;
    }
    bool is_integer() const {
      return _den == 1;
    }
    int sign() const {
      return _num > 0 ? 1 : (_num < 0 ? -1 : 0);
    }

    Int floor() const {
      Int q = _num / _den;
      if (_num < 0 && q * _den != _num) {
        q -= 1;
      }
      return q;
    }
    Int ceil() const {
      Int q = _num / _den;
      if (_num > 0 && q * _den != _num) {
        q += 1;
      }
      return q;
    }

    Fraction operator-() const {
      Fraction r;
      r._num = -_num;
      r._den = _den;
      return r;
    }

    Fraction& operator+=(Fraction const& o) {
      if (_den == 1 && o._den == 1) {
        _num += o._num;
        return *this;
      }
      _num = _num * o._den + o._num * _den;
      _den = _den * o._den;
      normalize();
      return *this;
    }
    Fraction& operator-=(Fraction const& o) {
      if (_den == 1 && o._den == 1) {
        _num -= o._num;
        return *this;
      }
      _num = _num * o._den - o._num * _den;
      _den = _den * o._den;
      normalize();
      return *this;
    }
    Fraction& operator*=(Fraction const& o) {
      if (_den == 1 && o._den == 1) {
        _num *= o._num;
        return *this;
      }
      _num *= o._num;
      _den *= o._den;
      normalize();
      return *this;
    }
    Fraction& operator/=(Fraction const& o) {
      if (o._num == 0) {
        throw std::domain_error("division by zero");
      }
      Int n = _num * o._den;
      Int d = _den * o._num;
      _num  = std::move(n);
      _den  = std::move(d);
      normalize();
      return *this;
    }

    friend Fraction operator+(Fraction a, Fraction const& b) {
      return a += b;
    }
    friend Fraction operator-(Fraction a, Fraction const& b) {
      return a -= b;
    }
    friend Fraction operator*(Fraction a, Fraction const& b) {
      return a *= b;
    }
    friend Fraction operator/(Fraction a, Fraction const& b) {
      return a /= b;
    }

    friend bool operator==(Fraction const& a, Fraction const& b) {
      return a._num == b._num && a._den == b._den;
    }
    friend bool operator!=(Fraction const& a, Fraction const& b) {
      return !(a == b);
    }
    friend bool operator<(Fraction const& a, Fraction const& b) {
      if (a._den == 1 && b._den == 1) {
        return a._num < b._num;
      }
      return a._num * b._den < b._num * a._den;
    }
    friend bool operator>(Fraction const& a, Fraction const& b) {
      return b < a;
    }
    friend bool operator<=(Fraction const& a, Fraction const& b) {
      return !(b < a);
    }
    friend bool operator>=(Fraction const& a, Fraction const& b) {
      return !(a < b);
    }

    friend std::ostream& operator<<(std::ostream& os, Fraction const& f) {
      os << f._num;
      if (f._den != 1) {
        os << '/' << f._den;
      }
      return os;
    }

   private:
    void normalize() {
      if (_den < 0) {
        _num = -_num;
        _den = -_den;
      }
      if (_den == 1) {
        return;
      }
      Int g = gcd_abs(_num, _den);
      if (g > 1) {
        _num /= g;
        _den /= g;
      }
      if (_num == 0) {
        _den = 1;
      }
    }

    Int _num;
    Int _den;
  };

  template <typename Int>
  std::int64_t to_int64(Int const& v) {
    if (v > std::numeric_limits<std::int64_t>::max()
        || v < std::numeric_limits<std::int64_t>::min()) {
      throw std::overflow_error("value does not fit in 64 bits");
    }
    return static_cast<std::int64_t>(v);
  }

}  // namespace hfill

#endif  // HFILL_EXACT_HPP_
