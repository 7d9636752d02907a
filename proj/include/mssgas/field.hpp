// Copyright 2026 The mssgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <ios>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mssgas/error.hpp"
#include "mssgas/random.hpp"

namespace mssgas {

// ---------------------------------------------------------------------------
// Hex encoding. Emit is lowercase, minimal length ("0" for zero); parse
// accepts leading zeros and either case but no prefix or sign.

inline std::string to_hex(const BigInt& v) {
  if (v < 0) throw Error(Errc::value_out_of_range, "negative value has no hex form");
  std::string s = v.str(0, std::ios_base::hex);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

inline BigInt parse_hex(std::string_view text) {
  if (text.empty()) throw Error(Errc::parse_error, "empty hex string");
  BigInt out = 0;
  for (char c : text) {
    int nibble;
    if (c >= '0' && c <= '9') nibble = c - '0';
    else if (c >= 'a' && c <= 'f') nibble = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') nibble = c - 'A' + 10;
    else throw Error(Errc::parse_error, "invalid hex digit in '" + std::string(text) + "'");
    out <<= 4;
    out |= nibble;
  }
  return out;
}

/// Parses a non-negative integer written in decimal, or in hex with a
/// leading "0x".
inline BigInt parse_integer(std::string_view text) {
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    return parse_hex(text.substr(2));
  }
  if (text.empty()) throw Error(Errc::parse_error, "empty integer");
  BigInt out = 0;
  for (char c : text) {
    if (c < '0' || c > '9') {
      throw Error(Errc::parse_error, "invalid decimal integer '" + std::string(text) + "'");
    }
    out *= 10;
    out += c - '0';
  }
  return out;
}

class Prime;

/// A residue in Z_p. Only a Prime can mint one, so the value is always
/// fully reduced with respect to the prime that produced it.
class FieldElement {
 public:
  FieldElement() = default;

  const BigInt& value() const noexcept { return value_; }
  bool is_zero() const { return value_.is_zero(); }
  std::string to_hex() const { return mssgas::to_hex(value_); }

  friend bool operator==(const FieldElement& a, const FieldElement& b) {
    return a.value_ == b.value_;
  }
  friend bool operator<(const FieldElement& a, const FieldElement& b) {
    return a.value_ < b.value_;
  }

 private:
  friend class Prime;
  explicit FieldElement(BigInt v) : value_(std::move(v)) {}

  BigInt value_ = 0;
};

namespace detail {

inline constexpr std::array<std::uint32_t, 168> kSmallPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,
    53,  59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113,
    127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197,
    199, 211, 223, 227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281,
    283, 293, 307, 311, 313, 317, 331, 337, 347, 349, 353, 359, 367, 373, 379,
    383, 389, 397, 401, 409, 419, 421, 431, 433, 439, 443, 449, 457, 461, 463,
    467, 479, 487, 491, 499, 503, 509, 521, 523, 541, 547, 557, 563, 569, 571,
    577, 587, 593, 599, 601, 607, 613, 617, 619, 631, 641, 643, 647, 653, 659,
    661, 673, 677, 683, 691, 701, 709, 719, 727, 733, 739, 743, 751, 757, 761,
    769, 773, 787, 797, 809, 811, 821, 823, 827, 829, 839, 853, 857, 859, 863,
    877, 881, 883, 887, 907, 911, 919, 929, 937, 941, 947, 953, 967, 971, 977,
    983, 991, 997};

inline BigInt powm(const BigInt& base, const BigInt& exponent, const BigInt& modulus) {
  return boost::multiprecision::powm(base, exponent, modulus);
}

// One strong-probable-prime test of odd n > 3 to base a, with n - 1 = d * 2^s.
inline bool strong_probable_prime(const BigInt& n, const BigInt& d, unsigned s,
                                  const BigInt& a) {
  const BigInt n_minus_1 = n - 1;
  BigInt x = powm(a, d, n);
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned r = 1; r < s; ++r) {
    x = (x * x) % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

// Bases 2..41 are a deterministic witness set below this bound.
inline const BigInt& deterministic_mr_bound() {
  static const BigInt bound("3317044064679887385961981");
  return bound;
}

}  // namespace detail

/// Miller-Rabin primality test. Deterministic below ~3.3e24; above that,
/// 33 rounds with random bases bound the error by 4^-33 < 2^-64.
inline bool is_probable_prime(const BigInt& n, RandomSource& rng) {
  if (n < 2) return false;
  for (std::uint32_t sp : detail::kSmallPrimes) {
    if (n == sp) return true;
    if (n % sp == 0) return false;
  }
  BigInt d = n - 1;
  unsigned s = 0;
  while (!boost::multiprecision::bit_test(d, 0)) {
    d >>= 1;
    ++s;
  }
  if (n < detail::deterministic_mr_bound()) {
    for (std::uint32_t a : {2u, 3u, 5u, 7u, 11u, 13u, 17u, 19u, 23u, 29u, 31u, 37u, 41u}) {
      if (!detail::strong_probable_prime(n, d, s, a)) return false;
    }
    return true;
  }
  for (int round = 0; round < 33; ++round) {
    BigInt a = rng.between(2, n - 2);
    if (!detail::strong_probable_prime(n, d, s, a)) return false;
  }
  return true;
}

inline bool is_probable_prime(const BigInt& n) {
  RandomSource rng = RandomSource::system();
  return is_probable_prime(n, rng);
}

/// The field modulus. Construction goes through validate_prime or
/// generate_prime, so holding a Prime means the value passed a primality
/// test.
class Prime {
 public:
  const BigInt& value() const noexcept { return p_; }
  unsigned bit_length() const noexcept { return bits_; }

  /// Wraps v, which must already lie in [0, p).
  FieldElement element(const BigInt& v) const {
    if (v < 0 || v >= p_) {
      throw Error(Errc::value_out_of_range,
                  "value " + v.str() + " is not a residue mod " + p_.str());
    }
    return FieldElement(v);
  }

  FieldElement reduce(const BigInt& v) const {
    BigInt r = v % p_;
    if (r < 0) r += p_;
    return FieldElement(std::move(r));
  }

  bool contains(const BigInt& v) const { return v >= 0 && v < p_; }

  FieldElement zero() const { return FieldElement(0); }
  FieldElement one() const { return FieldElement(1); }

  FieldElement add(const FieldElement& a, const FieldElement& b) const {
    BigInt r = a.value() + b.value();
    if (r >= p_) r -= p_;
    return FieldElement(std::move(r));
  }

  FieldElement sub(const FieldElement& a, const FieldElement& b) const {
    BigInt r = a.value() - b.value();
    if (r < 0) r += p_;
    return FieldElement(std::move(r));
  }

  FieldElement neg(const FieldElement& a) const {
    return a.is_zero() ? a : FieldElement(p_ - a.value());
  }

  FieldElement mul(const FieldElement& a, const FieldElement& b) const {
    return FieldElement((a.value() * b.value()) % p_);
  }

  FieldElement pow(const FieldElement& base, const BigInt& exponent) const {
    return FieldElement(detail::powm(base.value(), exponent, p_));
  }

  /// Multiplicative inverse by the extended Euclidean algorithm.
  FieldElement inverse(const FieldElement& a) const {
    if (a.is_zero()) throw Error(Errc::value_out_of_range, "zero has no inverse");
    BigInt t = 0, next_t = 1;
    BigInt r = p_, next_r = a.value();
    while (!next_r.is_zero()) {
      BigInt quotient = r / next_r;
      BigInt tmp = t - quotient * next_t;
      t = std::move(next_t);
      next_t = std::move(tmp);
      tmp = r - quotient * next_r;
      r = std::move(next_r);
      next_r = std::move(tmp);
    }
    if (t < 0) t += p_;
    return FieldElement(std::move(t));
  }

  FieldElement random(RandomSource& rng) const { return FieldElement(rng.below(p_)); }

  FieldElement random_nonzero(RandomSource& rng) const {
    return FieldElement(rng.between(1, p_ - 1));
  }

  friend bool operator==(const Prime& a, const Prime& b) { return a.p_ == b.p_; }

 private:
  friend Prime validate_prime(const BigInt& candidate);
  friend Prime generate_prime(unsigned bits, RandomSource& rng);
  friend Prime generate_safe_prime(unsigned bits, RandomSource& rng);

  explicit Prime(BigInt p) : p_(std::move(p)), bits_(mssgas::bit_length(p_)) {}

  BigInt p_;
  unsigned bits_;
};

inline Prime validate_prime(const BigInt& candidate) {
  if (candidate < 3) {
    throw Error(Errc::too_small, "prime candidate " + candidate.str() + " is below 3");
  }
  if (!is_probable_prime(candidate)) {
    throw Error(Errc::not_prime, candidate.str() + " is composite");
  }
  return Prime(candidate);
}

/// Random prime with exactly `bits` bits (bits >= 3).
inline Prime generate_prime(unsigned bits, RandomSource& rng) {
  if (bits < 3) throw Error(Errc::too_small, "prime width must be at least 3 bits");
  for (;;) {
    BigInt candidate = rng.bits(bits);
    boost::multiprecision::bit_set(candidate, bits - 1);
    boost::multiprecision::bit_set(candidate, 0);
    if (is_probable_prime(candidate, rng)) return Prime(candidate);
  }
}

/// Random safe prime p = 2q + 1 (q prime) with exactly `bits` bits. The
/// factorisation of p - 1 is then trivial, which makes primitive roots easy
/// to find for discrete-log commitments.
inline Prime generate_safe_prime(unsigned bits, RandomSource& rng) {
  if (bits < 3) throw Error(Errc::too_small, "prime width must be at least 3 bits");
  if (bits == 3) return Prime(7);
  for (;;) {
    BigInt q = rng.bits(bits - 1);
    boost::multiprecision::bit_set(q, bits - 2);
    boost::multiprecision::bit_set(q, 0);
    BigInt p = 2 * q + 1;
    bool sieved = false;
    for (std::uint32_t sp : detail::kSmallPrimes) {
      if ((q % sp == 0 && q != sp) || (p % sp == 0 && p != sp)) {
        sieved = true;
        break;
      }
    }
    if (sieved) continue;
    if (is_probable_prime(q, rng) && is_probable_prime(p, rng)) return Prime(p);
  }
}

// ---------------------------------------------------------------------------
// Polynomials over Z_p.

/// coefficients[0] is the constant term.
struct Polynomial {
  std::vector<FieldElement> coefficients;

  std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  const FieldElement& constant_term() const { return coefficients.front(); }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;
};

/// Horner evaluation of f at x.
inline FieldElement poly_eval(const Polynomial& f, const FieldElement& x, const Prime& p) {
  FieldElement acc = p.zero();
  for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) {
    acc = p.add(p.mul(acc, x), *it);
  }
  return acc;
}

/// Constant term `secret`, every other coefficient uniform over Z_p. A zero
/// leading coefficient is allowed; it only lowers the actual degree.
inline Polynomial sample_polynomial(const FieldElement& secret, std::size_t degree,
                                    const Prime& p, RandomSource& rng) {
  if (degree < 1) throw Error(Errc::degree_too_small, "polynomial degree must be at least 1");
  Polynomial f;
  f.coefficients.reserve(degree + 1);
  f.coefficients.push_back(secret);
  for (std::size_t k = 0; k < degree; ++k) f.coefficients.push_back(p.random(rng));
  return f;
}

struct Point {
  FieldElement x;
  FieldElement y;
};

/// Value at zero of the unique polynomial of degree < points.size() through
/// `points`.
inline FieldElement lagrange_at_zero(std::span<const Point> points, const Prime& p) {
  if (points.size() < 2) {
    throw Error(Errc::insufficient_points, "interpolation needs at least two points");
  }
  std::vector<FieldElement> xs;
  xs.reserve(points.size());
  for (const Point& pt : points) xs.push_back(pt.x);
  std::sort(xs.begin(), xs.end());
  if (auto dup = std::adjacent_find(xs.begin(), xs.end()); dup != xs.end()) {
    throw Error(Errc::duplicate_abscissa, "abscissa " + dup->to_hex() + " appears twice");
  }

  FieldElement sum = p.zero();
  for (std::size_t b = 0; b < points.size(); ++b) {
    FieldElement num = p.one();
    FieldElement den = p.one();
    for (std::size_t r = 0; r < points.size(); ++r) {
      if (r == b) continue;
      num = p.mul(num, p.neg(points[r].x));
      den = p.mul(den, p.sub(points[b].x, points[r].x));
    }
    sum = p.add(sum, p.mul(points[b].y, p.mul(num, p.inverse(den))));
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Primitive roots, for discrete-log commitments.

namespace detail {

inline BigInt gcd(BigInt a, BigInt b) {
  while (!b.is_zero()) {
    BigInt t = a % b;
    a = std::move(b);
    b = std::move(t);
  }
  return a;
}

// Brent's variant of Pollard's rho. Returns a nontrivial factor of the odd
// composite n, or nullopt if the step budget runs out.
inline std::optional<BigInt> pollard_brent(const BigInt& n, std::uint64_t budget) {
  for (unsigned c = 1; c < 64; ++c) {
    BigInt y = 2, x, ys, q = 1, g = 1;
    std::uint64_t r = 1, steps = 0;
    const std::uint64_t batch = 128;
    auto f = [&](const BigInt& v) { return (v * v + c) % n; };
    while (g == 1) {
      x = y;
      for (std::uint64_t i = 0; i < r; ++i) y = f(y);
      std::uint64_t k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (std::uint64_t i = 0; i < std::min(batch, r - k); ++i) {
          y = f(y);
          BigInt diff = x > y ? BigInt(x - y) : BigInt(y - x);
          q = (q * diff) % n;
        }
        g = gcd(q, n);
        k += batch;
      }
      r *= 2;
      steps += r;
      if (steps > budget) return std::nullopt;
    }
    if (g == n) {
      do {
        ys = f(ys);
        BigInt diff = x > ys ? BigInt(x - ys) : BigInt(ys - x);
        g = gcd(diff, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
  return std::nullopt;
}

inline bool collect_prime_factors(BigInt n, std::vector<BigInt>& out) {
  for (std::uint32_t sp : kSmallPrimes) {
    if (n % sp == 0) {
      out.emplace_back(sp);
      while (n % sp == 0) n /= sp;
    }
  }
  std::vector<BigInt> pending;
  if (n > 1) pending.push_back(std::move(n));
  while (!pending.empty()) {
    BigInt m = std::move(pending.back());
    pending.pop_back();
    if (m == 1) continue;
    if (is_probable_prime(m)) {
      out.push_back(std::move(m));
      continue;
    }
    auto factor = pollard_brent(m, std::uint64_t{1} << 22);
    if (!factor) return false;
    pending.push_back(*factor);
    pending.push_back(m / *factor);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return true;
}

}  // namespace detail

/// Distinct prime factors of p - 1, or nullopt if they cannot be found
/// within the factoring budget.
inline std::optional<std::vector<BigInt>> group_order_factors(const Prime& p) {
  std::vector<BigInt> factors;
  if (!detail::collect_prime_factors(p.value() - 1, factors)) return std::nullopt;
  return factors;
}

inline bool is_primitive_root(const FieldElement& g, const Prime& p,
                              std::span<const BigInt> order_factors) {
  if (g.is_zero()) return false;
  const BigInt order = p.value() - 1;
  for (const BigInt& f : order_factors) {
    if (p.pow(g, order / f) == p.one()) return false;
  }
  return true;
}

/// Smallest primitive root of Z_p^*. Deterministic; consumes no randomness.
inline FieldElement find_primitive_root(const Prime& p) {
  auto factors = group_order_factors(p);
  if (!factors) {
    throw Error(Errc::generator_unavailable,
                "cannot factor p - 1 to find a generator; supply one explicitly");
  }
  for (BigInt g = 2; g < p.value(); ++g) {
    FieldElement candidate = p.element(g);
    if (is_primitive_root(candidate, p, *factors)) return candidate;
  }
  throw Error(Errc::generator_unavailable, "no primitive root found");
}

}  // namespace mssgas
