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

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mssgas/error.hpp"
#include "mssgas/field.hpp"

namespace mssgas {

using Bytes = std::vector<std::uint8_t>;

// ---------------------------------------------------------------------------
// Hash algorithms

enum class HashAlgorithm { sha256, sha384, sha512, sha3_256 };

inline std::string_view hash_name(HashAlgorithm h) {
  switch (h) {
    case HashAlgorithm::sha256: return "sha256";
    case HashAlgorithm::sha384: return "sha384";
    case HashAlgorithm::sha512: return "sha512";
    case HashAlgorithm::sha3_256: return "sha3-256";
  }
  return "unknown";
}

inline HashAlgorithm parse_hash_algorithm(std::string_view name) {
  for (HashAlgorithm h : {HashAlgorithm::sha256, HashAlgorithm::sha384,
                          HashAlgorithm::sha512, HashAlgorithm::sha3_256}) {
    if (hash_name(h) == name) return h;
  }
  throw Error(Errc::unknown_hash_algorithm, "unknown hash algorithm '" + std::string(name) + "'");
}

inline unsigned digest_bits(HashAlgorithm h) {
  switch (h) {
    case HashAlgorithm::sha256: return 256;
    case HashAlgorithm::sha384: return 384;
    case HashAlgorithm::sha512: return 512;
    case HashAlgorithm::sha3_256: return 256;
  }
  return 0;
}

namespace detail {

inline const EVP_MD* evp_md(HashAlgorithm h) {
  switch (h) {
    case HashAlgorithm::sha256: return EVP_sha256();
    case HashAlgorithm::sha384: return EVP_sha384();
    case HashAlgorithm::sha512: return EVP_sha512();
    case HashAlgorithm::sha3_256: return EVP_sha3_256();
  }
  throw Error(Errc::unknown_hash_algorithm, "unsupported hash algorithm");
}

inline thread_local std::uint64_t hash_invocations = 0;

}  // namespace detail

/// Plain digest of a byte string. Not counted as a protocol hash
/// invocation; used for file identifiers.
inline Bytes raw_digest(std::span<const std::uint8_t> data, HashAlgorithm h) {
  Bytes out(EVP_MAX_MD_SIZE);
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, detail::evp_md(h), nullptr) != 1) {
    throw std::runtime_error("EVP_Digest failed");
  }
  out.resize(len);
  return out;
}

/// Number of protocol hash invocations made so far on this thread.
inline std::uint64_t hash_invocation_count() noexcept { return detail::hash_invocations; }

/// Counts protocol hash invocations on the current thread from construction on.
class HashCounter {
 public:
  HashCounter() noexcept : start_(hash_invocation_count()) {}
  std::uint64_t count() const noexcept { return hash_invocation_count() - start_; }
  void reset() noexcept { start_ = hash_invocation_count(); }

 private:
  std::uint64_t start_;
};

// ---------------------------------------------------------------------------
// Bit strings

/// Ordered sequence of bits, most significant first.
class BitString {
 public:
  BitString() = default;

  /// Parses a string of '0'/'1' characters.
  static BitString parse(std::string_view text) {
    BitString out;
    for (char c : text) {
      if (c != '0' && c != '1') throw Error(Errc::parse_error, "bit strings hold only 0 and 1");
      out.bits_.push_back(c == '1');
    }
    return out;
  }

  /// Appends v as exactly `width` bits, big-endian. v must fit.
  void append(const BigInt& v, unsigned width) {
    if (v < 0 || bit_length(v) > width) {
      throw Error(Errc::value_out_of_range, v.str() + " does not fit in " +
                                                std::to_string(width) + " bits");
    }
    for (unsigned k = width; k-- > 0;) bits_.push_back(boost::multiprecision::bit_test(v, k));
  }

  void append(const BitString& other) {
    bits_.insert(bits_.end(), other.bits_.begin(), other.bits_.end());
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  /// Left-pads with zero bits to a whole number of bytes.
  Bytes to_bytes() const {
    const std::size_t nbytes = (bits_.size() + 7) / 8;
    const std::size_t pad = nbytes * 8 - bits_.size();
    Bytes out(nbytes, 0);
    for (std::size_t k = 0; k < bits_.size(); ++k) {
      if (!bits_[k]) continue;
      const std::size_t pos = pad + k;
      out[pos / 8] |= static_cast<std::uint8_t>(0x80u >> (pos % 8));
    }
    return out;
  }

  friend bool operator==(const BitString&, const BitString&) = default;

 private:
  std::vector<bool> bits_;
};

/// The protocol hash h: byte-aligns the input (left zero padding) and
/// digests it. Every call is counted.
inline Bytes hash_bits(const BitString& input, HashAlgorithm h) {
  ++detail::hash_invocations;
  const Bytes bytes = input.to_bytes();
  return raw_digest(bytes, h);
}

// ---------------------------------------------------------------------------
// Encoding of pseudo-share hash inputs

/// Field widths of x || i || q.
struct EncodingParams {
  unsigned element_bits = 0;      // bit length of p
  unsigned secret_index_bits = 0;
  unsigned set_index_bits = 0;

  /// Widths frozen from the declared capacities rather than the current
  /// counts, so later additions never change existing encodings.
  static EncodingParams for_capacity(const Prime& p, std::uint64_t max_secrets,
                                     std::uint64_t max_sets) {
    return {p.bit_length(), bit_length(BigInt(max_secrets)), bit_length(BigInt(max_sets))};
  }

  friend bool operator==(const EncodingParams&, const EncodingParams&) = default;
};

inline BitString encode_hash_input(const BigInt& x, std::uint64_t secret_index,
                                   std::uint64_t set_index, const EncodingParams& params) {
  auto check_index = [](std::uint64_t idx, unsigned width, const char* what) {
    if (idx < 1 || bit_length(BigInt(idx)) > width) {
      throw Error(Errc::index_overflow, std::string(what) + " index " + std::to_string(idx) +
                                            " does not fit in " + std::to_string(width) + " bits");
    }
  };
  check_index(secret_index, params.secret_index_bits, "secret");
  check_index(set_index, params.set_index_bits, "set");
  BitString out;
  out.append(x, params.element_bits);
  out.append(BigInt(secret_index), params.secret_index_bits);
  out.append(BigInt(set_index), params.set_index_bits);
  return out;
}

/// h(input), truncated to the leading bit_length(p) bits and reduced mod p.
inline FieldElement hash_to_field(const BitString& input, const Prime& p, HashAlgorithm h) {
  if (input.empty()) throw Error(Errc::value_out_of_range, "hash input is empty");
  const unsigned width = p.bit_length();
  const unsigned dbits = digest_bits(h);
  if (dbits < width) {
    throw Error(Errc::hash_too_short, std::string(hash_name(h)) + " yields " +
                                          std::to_string(dbits) + " bits but p needs " +
                                          std::to_string(width));
  }
  const Bytes digest = hash_bits(input, h);
  BigInt v = 0;
  for (std::uint8_t byte : digest) {
    v <<= 8;
    v |= byte;
  }
  v >>= (dbits - width);
  return p.reduce(v);
}

// ---------------------------------------------------------------------------
// Commitments

enum class CommitMode { hash, dlog };

inline std::string_view mode_name(CommitMode m) { return m == CommitMode::hash ? "hash" : "dlog"; }

inline CommitMode parse_commit_mode(std::string_view name) {
  if (name == "hash") return CommitMode::hash;
  if (name == "dlog") return CommitMode::dlog;
  throw Error(Errc::parse_error, "unknown commitment mode '" + std::string(name) + "'");
}

/// Published commitment: a digest h(value) in hash mode, or g^value mod p in
/// discrete-log mode.
struct Commitment {
  std::variant<Bytes, FieldElement> payload;

  CommitMode mode() const {
    return std::holds_alternative<Bytes>(payload) ? CommitMode::hash : CommitMode::dlog;
  }
  const Bytes& digest() const { return std::get<Bytes>(payload); }
  const FieldElement& power() const { return std::get<FieldElement>(payload); }

  friend bool operator==(const Commitment&, const Commitment&) = default;
};

struct CommitParams {
  Prime prime;
  HashAlgorithm hash = HashAlgorithm::sha256;
  std::optional<FieldElement> generator;
};

inline Commitment commit(const FieldElement& value, CommitMode mode, const CommitParams& params) {
  if (mode == CommitMode::hash) {
    BitString encoded;
    encoded.append(value.value(), params.prime.bit_length());
    return Commitment{hash_bits(encoded, params.hash)};
  }
  if (!params.generator) {
    throw Error(Errc::missing_generator, "discrete-log commitments need a generator");
  }
  return Commitment{params.prime.pow(*params.generator, value.value())};
}

inline bool verify_commitment(const FieldElement& value, const Commitment& c,
                              const CommitParams& params) {
  if (c.mode() == CommitMode::dlog) {
    if (!params.generator) return false;
    return commit(value, CommitMode::dlog, params) == c;
  }
  const Commitment expected = commit(value, CommitMode::hash, params);
  const Bytes& a = expected.digest();
  const Bytes& b = c.digest();
  return a.size() == b.size() && CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace mssgas
