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

#include <gtest/gtest.h>

#include <boost/multiprecision/miller_rabin.hpp>
#include <boost/random/mersenne_twister.hpp>

#include <map>
#include <vector>

#include "mssgas/field.hpp"

namespace mssgas {
namespace {

Prime P13() { return validate_prime(13); }

// Independent primality oracle: Boost's own Miller-Rabin.
bool boost_is_prime(const BigInt& n) {
  boost::random::mt19937 gen(12345);
  return boost::multiprecision::miller_rabin_test(n, 40, gen);
}

TEST(ValidatePrime, SmallKnownPrime) {
  Prime p = validate_prime(13);
  EXPECT_EQ(p.value(), 13);
  EXPECT_EQ(p.bit_length(), 4u);
}

TEST(ValidatePrime, RejectsComposite) {
  try {
    validate_prime(15);
    FAIL() << "15 accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_prime);
  }
}

TEST(ValidatePrime, RejectsTooSmall) {
  for (int v : {-1, 0, 1, 2}) {
    try {
      validate_prime(v);
      FAIL() << v << " accepted";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::too_small);
    }
  }
}

TEST(ValidatePrime, MersenneSixtyOne) {
  const BigInt m61 = (BigInt(1) << 61) - 1;
  ASSERT_EQ(m61, BigInt("2305843009213693951"));
  ASSERT_TRUE(boost_is_prime(m61));
  Prime p = validate_prime(m61);
  EXPECT_EQ(p.bit_length(), 61u);
}

TEST(ValidatePrime, AgreesWithBoostOracle) {
  auto rng = RandomSource::seeded(11);
  // Carmichael numbers and strong pseudoprimes to small bases.
  for (const char* s : {"561", "1105", "2047", "3215031751", "3825123056546413051",
                        "318665857834031151167461"}) {
    EXPECT_FALSE(is_probable_prime(BigInt(s), rng)) << s;
    EXPECT_FALSE(boost_is_prime(BigInt(s))) << s;
  }
  for (int trial = 0; trial < 2000; ++trial) {
    const unsigned bits = 2 + static_cast<unsigned>(rng.uniform(0, 126));
    BigInt n = rng.bits(bits);
    EXPECT_EQ(is_probable_prime(n, rng), boost_is_prime(n)) << n;
  }
}

TEST(GeneratePrime, ExactWidthAndPrime) {
  auto rng = RandomSource::seeded(5);
  for (unsigned bits : {3u, 8u, 64u, 128u, 256u}) {
    Prime p = generate_prime(bits, rng);
    EXPECT_EQ(p.bit_length(), bits);
    EXPECT_TRUE(boost_is_prime(p.value()));
  }
}

TEST(GeneratePrime, SafePrime) {
  auto rng = RandomSource::seeded(6);
  for (unsigned bits : {8u, 64u}) {
    Prime p = generate_safe_prime(bits, rng);
    EXPECT_EQ(p.bit_length(), bits);
    EXPECT_TRUE(boost_is_prime(p.value()));
    EXPECT_TRUE(boost_is_prime((p.value() - 1) / 2));
  }
}

TEST(FieldElement, ArithmeticStaysReduced) {
  auto rng = RandomSource::seeded(3);
  for (int trial = 0; trial < 200; ++trial) {
    Prime p = generate_prime(3 + static_cast<unsigned>(rng.uniform(0, 90)), rng);
    FieldElement a = p.random(rng), b = p.random(rng);
    for (const FieldElement& r : {p.add(a, b), p.sub(a, b), p.mul(a, b), p.neg(a)}) {
      EXPECT_TRUE(r.value() >= 0 && r.value() < p.value());
    }
    EXPECT_EQ(p.add(a, b).value(), (a.value() + b.value()) % p.value());
    EXPECT_EQ(p.add(p.sub(a, b), b), a);
    if (!a.is_zero()) {
      FieldElement inv = p.inverse(a);
      EXPECT_TRUE(inv.value() < p.value());
      EXPECT_EQ(p.mul(a, inv), p.one());
    }
  }
}

TEST(FieldElement, RangeChecks) {
  Prime p = P13();
  EXPECT_THROW(p.element(13), Error);
  EXPECT_THROW(p.element(-1), Error);
  EXPECT_EQ(p.reduce(-1).value(), 12);
  EXPECT_EQ(p.reduce(27).value(), 1);
  EXPECT_THROW(p.inverse(p.zero()), Error);
}

TEST(Hex, MinimalLowercaseAndLenientParse) {
  EXPECT_EQ(to_hex(0), "0");
  EXPECT_EQ(to_hex(255), "ff");
  EXPECT_EQ(parse_hex("00FF"), 255);
  EXPECT_EQ(parse_integer("0x1f"), 31);
  EXPECT_EQ(parse_integer("1234"), 1234);
  EXPECT_THROW(parse_hex(""), Error);
  EXPECT_THROW(parse_hex("0x1"), Error);
  EXPECT_THROW(parse_integer("12a"), Error);
}

TEST(Hex, RoundTripProperty) {
  auto rng = RandomSource::seeded(99);
  for (int trial = 0; trial < 500; ++trial) {
    BigInt v = rng.bits(static_cast<unsigned>(rng.uniform(1, 300)));
    const std::string h = to_hex(v);
    EXPECT_EQ(parse_hex(h), v);
    EXPECT_TRUE(h == "0" || h[0] != '0');
  }
}

// ---------------------------------------------------------------------------

Polynomial poly(const Prime& p, std::initializer_list<int> coeffs) {
  Polynomial f;
  for (int c : coeffs) f.coefficients.push_back(p.element(c));
  return f;
}

TEST(PolyEval, HandComputed) {
  Prime p = P13();
  EXPECT_EQ(poly_eval(poly(p, {2, 3}), p.element(4), p).value(), 1);  // 14 mod 13
  EXPECT_EQ(poly_eval(poly(p, {7, 5, 11}), p.element(0), p).value(), 7);
  EXPECT_EQ(poly_eval(poly(p, {0, 1}), p.element(9), p).value(), 9);
}

TEST(PolyEval, MatchesPowerSumOracle) {
  auto rng = RandomSource::seeded(17);
  for (int trial = 0; trial < 1000; ++trial) {
    Prime p = trial % 2 ? P13() : generate_prime(64, rng);
    Polynomial f;
    const auto len = rng.uniform(1, 8);
    for (std::uint64_t k = 0; k < len; ++k) f.coefficients.push_back(p.random(rng));
    FieldElement x = p.random(rng);
    BigInt naive = 0;
    for (std::size_t k = 0; k < f.coefficients.size(); ++k) {
      BigInt power = 1;
      for (std::size_t e = 0; e < k; ++e) power *= x.value();
      naive += f.coefficients[k].value() * power;
    }
    FieldElement got = poly_eval(f, x, p);
    EXPECT_EQ(got.value(), naive % p.value());
    EXPECT_TRUE(got.value() < p.value());
  }
}

TEST(SamplePolynomial, Structure) {
  Prime p = P13();
  auto rng = RandomSource::seeded(1);
  Polynomial f = sample_polynomial(p.element(2), 1, p, rng);
  EXPECT_EQ(f.coefficients.size(), 2u);
  EXPECT_EQ(f.constant_term().value(), 2);
  Polynomial g = sample_polynomial(p.element(0), 3, p, rng);
  EXPECT_EQ(g.coefficients.size(), 4u);
  EXPECT_EQ(g.constant_term().value(), 0);
  try {
    sample_polynomial(p.element(2), 0, p, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::degree_too_small);
  }
}

TEST(SamplePolynomial, CoefficientsAreUniform) {
  Prime p = P13();
  auto rng = RandomSource::seeded(2024);
  constexpr int kSamples = 10000;
  constexpr std::size_t kDegree = 3;
  std::vector<std::map<BigInt, int>> counts(kDegree + 1);
  for (int s = 0; s < kSamples; ++s) {
    Polynomial f = sample_polynomial(p.element(5), kDegree, p, rng);
    for (std::size_t k = 1; k <= kDegree; ++k) ++counts[k][f.coefficients[k].value()];
  }
  double chi_square = 0;
  const double expected = kSamples / 13.0;
  for (std::size_t k = 1; k <= kDegree; ++k) {
    ASSERT_EQ(counts[k].size(), 13u) << "every residue, zero included, should occur";
    for (const auto& [value, count] : counts[k]) {
      EXPECT_NEAR(count / double(kSamples), 1.0 / 13.0, 0.01) << "coefficient " << k;
      chi_square += (count - expected) * (count - expected) / expected;
    }
  }
  // 36 degrees of freedom; 99.9th percentile is about 67.99.
  EXPECT_LT(chi_square, 67.99);
}

// ---------------------------------------------------------------------------

std::vector<Point> points(const Prime& p, std::initializer_list<std::pair<int, int>> xy) {
  std::vector<Point> out;
  for (auto [x, y] : xy) out.push_back({p.element(x), p.element(y)});
  return out;
}

TEST(LagrangeAtZero, HandComputed) {
  Prime p = P13();
  // s + d = 5, s + 2d = 8  =>  d = 3, s = 2.
  EXPECT_EQ(lagrange_at_zero(points(p, {{1, 5}, {2, 8}}), p).value(), 2);
  EXPECT_EQ(lagrange_at_zero(points(p, {{2, 8}, {1, 5}}), p).value(), 2);
  EXPECT_EQ(lagrange_at_zero(points(p, {{1, 4}, {2, 4}, {3, 4}}), p).value(), 4);
}

TEST(LagrangeAtZero, Errors) {
  Prime p = P13();
  try {
    lagrange_at_zero(points(p, {{1, 5}}), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::insufficient_points);
  }
  try {
    lagrange_at_zero(points(p, {{1, 5}, {3, 2}, {1, 6}}), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::duplicate_abscissa);
  }
}

TEST(LagrangeAtZero, RoundTripOverRandomPrimes) {
  auto rng = RandomSource::seeded(77);
  for (int trial = 0; trial < 1000; ++trial) {
    Prime p = generate_prime(64, rng);
    const auto degree = static_cast<std::size_t>(rng.uniform(1, 6));
    FieldElement s = p.random(rng);
    Polynomial f = sample_polynomial(s, degree, p, rng);
    std::vector<Point> pts;
    std::set<BigInt> used;
    while (pts.size() < degree + 1) {
      FieldElement x = p.random_nonzero(rng);
      if (!used.insert(x.value()).second) continue;
      pts.push_back({x, poly_eval(f, x, p)});
    }
    FieldElement got = lagrange_at_zero(pts, p);
    ASSERT_EQ(got, s);
    ASSERT_TRUE(got.value() < p.value());
  }
}

// With one point short, every constant term is still consistent with the
// remaining points. Checked by enumerating every candidate polynomial.
TEST(LagrangeAtZero, UnderDeterminedAtSmallPrime) {
  Prime p = P13();
  auto rng = RandomSource::seeded(4);
  for (std::size_t degree : {1u, 2u}) {
    Polynomial f = sample_polynomial(p.random(rng), degree, p, rng);
    std::vector<Point> known;
    for (int x = 1; x <= static_cast<int>(degree); ++x) {
      known.push_back({p.element(x), poly_eval(f, p.element(x), p)});
    }
    for (int candidate = 0; candidate < 13; ++candidate) {
      int through_all = 0;
      // Enumerate every choice of the non-constant coefficients.
      const int combos = degree == 1 ? 13 : 169;
      for (int c = 0; c < combos; ++c) {
        Polynomial g{{p.element(candidate), p.element(c % 13)}};
        if (degree == 2) g.coefficients.push_back(p.element(c / 13));
        bool ok = true;
        for (const Point& pt : known) ok = ok && poly_eval(g, pt.x, p) == pt.y;
        through_all += ok;
      }
      EXPECT_EQ(through_all, 1) << "degree " << degree << " candidate " << candidate;
    }
  }
}

// ---------------------------------------------------------------------------

// Brute force: the order of g is the least e > 0 with g^e = 1.
bool brute_force_generator(int g, int p) {
  int acc = 1;
  for (int e = 1; e < p - 1; ++e) {
    acc = acc * g % p;
    if (acc == 1) return false;
  }
  return true;
}

TEST(PrimitiveRoot, MatchesBruteForceForSmallPrimes) {
  for (int p : {3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 97, 101, 191, 199}) {
    Prime prime = validate_prime(p);
    int expected = 2;
    while (!brute_force_generator(expected, p)) ++expected;
    EXPECT_EQ(find_primitive_root(prime).value(), expected) << p;
  }
}

TEST(PrimitiveRoot, LargePrimes) {
  auto rng = RandomSource::seeded(8);
  for (int trial = 0; trial < 20; ++trial) {
    Prime p = generate_prime(64, rng);
    FieldElement g = find_primitive_root(p);
    auto factors = group_order_factors(p);
    ASSERT_TRUE(factors.has_value());
    BigInt product = 1;
    BigInt rest = p.value() - 1;
    for (const BigInt& f : *factors) {
      EXPECT_TRUE(boost_is_prime(f));
      while (rest % f == 0) rest /= f;
    }
    EXPECT_EQ(rest, 1) << "factorisation of p - 1 incomplete";
    EXPECT_TRUE(is_primitive_root(g, p, *factors));
  }
  Prime safe = generate_safe_prime(256, rng);
  EXPECT_TRUE(is_primitive_root(find_primitive_root(safe), safe, *group_order_factors(safe)));
}

TEST(RandomSource, SeededIsReproducible) {
  auto a = RandomSource::seeded(42), b = RandomSource::seeded(42);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a.below(BigInt(1) << 200), b.below(BigInt(1) << 200));
  auto c = RandomSource::system();
  EXPECT_FALSE(c.is_seeded());
  EXPECT_LT(c.below(13), 13);
}

}  // namespace
}  // namespace mssgas
