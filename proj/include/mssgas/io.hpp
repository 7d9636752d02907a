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

#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mssgas/commit.hpp"
#include "mssgas/error.hpp"
#include "mssgas/field.hpp"
#include "mssgas/renew.hpp"
#include "mssgas/scheme.hpp"

// File formats. Every document is a JSON object with sorted keys; field
// elements are minimal lowercase hex; keyed tables are arrays sorted by
// (secret, set, participant). emit_canonical() is the only serializer, so
// parse -> emit is byte-stable.

namespace mssgas::io {

using json = nlohmann::json;

inline constexpr std::string_view kBulletinFormat = "mssgas-bulletin/1";
inline constexpr std::string_view kStateFormat = "mssgas-dealer-state/1";
inline constexpr std::string_view kShareFormat = "mssgas-share/1";
inline constexpr std::string_view kPseudoShareFormat = "mssgas-pseudo-share/1";

inline std::string emit_canonical(const json& doc) { return doc.dump(2) + "\n"; }

inline json parse_document(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

namespace detail {

// Wraps nlohmann access so malformed documents surface as parse_error.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
}

inline void expect_format(const json& doc, std::string_view format) {
  if (!doc.is_object() || !doc.contains("format") || doc.at("format") != format) {
    throw Error(Errc::parse_error, "expected a " + std::string(format) + " document");
  }
}

inline std::string bytes_hex(const Bytes& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (std::uint8_t b : bytes) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 0xf]);
  }
  return s;
}

inline Bytes hex_bytes(std::string_view text) {
  if (text.size() % 2 != 0) throw Error(Errc::parse_error, "digest hex has odd length");
  Bytes out;
  out.reserve(text.size() / 2);
  for (std::size_t k = 0; k < text.size(); k += 2) {
    out.push_back(static_cast<std::uint8_t>(parse_hex(text.substr(k, 2))));
  }
  return out;
}

inline FieldElement element(const json& v, const Prime& p) {
  return p.element(parse_hex(v.get<std::string>()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Building blocks

inline json to_json(const Commitment& c) {
  if (c.mode() == CommitMode::hash) {
    return {{"mode", "hash"}, {"payload", detail::bytes_hex(c.digest())}};
  }
  return {{"mode", "dlog"}, {"payload", c.power().to_hex()}};
}

inline Commitment commitment_from_json(const json& j, const Prime& p) {
  return detail::guarded([&] {
    const CommitMode mode = parse_commit_mode(j.at("mode").get<std::string>());
    const std::string payload = j.at("payload").get<std::string>();
    if (mode == CommitMode::hash) return Commitment{detail::hex_bytes(payload)};
    return Commitment{p.element(parse_hex(payload))};
  });
}

inline json to_json(const SchemeParameters& params) {
  json j = {
      {"prime", to_hex(params.prime.value())},
      {"hash", hash_name(params.hash)},
      {"mode", mode_name(params.mode)},
      {"encoding",
       {{"element_bits", params.encoding.element_bits},
        {"secret_index_bits", params.encoding.secret_index_bits},
        {"set_index_bits", params.encoding.set_index_bits}}},
      {"capacities", {{"secrets", params.capacities.secrets}, {"sets", params.capacities.sets}}},
  };
  if (params.generator) j["generator"] = params.generator->to_hex();
  return j;
}

inline SchemeParameters params_from_json(const json& j) {
  return detail::guarded([&] {
    SchemeParameters params{validate_prime(parse_hex(j.at("prime").get<std::string>()))};
    params.hash = parse_hash_algorithm(j.at("hash").get<std::string>());
    params.mode = parse_commit_mode(j.at("mode").get<std::string>());
    params.capacities.secrets = j.at("capacities").at("secrets").get<std::uint32_t>();
    params.capacities.sets = j.at("capacities").at("sets").get<std::uint32_t>();
    params.encoding.element_bits = j.at("encoding").at("element_bits").get<unsigned>();
    params.encoding.secret_index_bits = j.at("encoding").at("secret_index_bits").get<unsigned>();
    params.encoding.set_index_bits = j.at("encoding").at("set_index_bits").get<unsigned>();
    if (!(params.encoding == EncodingParams::for_capacity(params.prime, params.capacities.secrets,
                                                          params.capacities.sets))) {
      throw Error(Errc::parse_error, "encoding widths do not match prime and capacities");
    }
    if (j.contains("generator")) params.generator = detail::element(j.at("generator"), params.prime);
    if (params.mode == CommitMode::dlog && !params.generator) {
      throw Error(Errc::missing_generator, "dlog mode bulletin lacks a generator");
    }
    return params;
  });
}

/// Identifier binding share files to a scheme: SHA-256 of the compact
/// parameter document. Renewal never changes it.
inline std::string scheme_identifier(const SchemeParameters& params) {
  const std::string text = to_json(params).dump();
  const Bytes digest = raw_digest(
      std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()),
      HashAlgorithm::sha256);
  return detail::bytes_hex(digest);
}

namespace detail {

inline json participants_json(const std::map<ParticipantIndex, ParticipantRecord>& m) {
  json arr = json::array();
  for (const auto& [idx, rec] : m) {
    arr.push_back({{"index", idx}, {"id", rec.id.to_hex()}, {"active", rec.active}});
  }
  return arr;
}

inline std::map<ParticipantIndex, ParticipantRecord> participants_from(const json& arr,
                                                                       const Prime& p) {
  std::map<ParticipantIndex, ParticipantRecord> m;
  for (const json& e : arr) {
    m[e.at("index").get<ParticipantIndex>()] =
        ParticipantRecord{element(e.at("id"), p), e.at("active").get<bool>()};
  }
  return m;
}

inline json structure_json(const std::map<SecretIndex, SecretAccess>& m) {
  json arr = json::array();
  for (const auto& [i, access] : m) {
    json sets = json::array();
    for (const auto& [q, members] : access.sets) sets.push_back({{"set", q}, {"members", members}});
    arr.push_back({{"secret", i},
                   {"active", access.active},
                   {"issued_sets", access.issued_sets},
                   {"sets", sets}});
  }
  return arr;
}

inline std::map<SecretIndex, SecretAccess> structure_from(const json& arr) {
  std::map<SecretIndex, SecretAccess> m;
  for (const json& e : arr) {
    SecretAccess access;
    access.active = e.at("active").get<bool>();
    access.issued_sets = e.at("issued_sets").get<SetIndex>();
    for (const json& s : e.at("sets")) {
      access.sets[s.at("set").get<SetIndex>()] = s.at("members").get<QualifiedSet>();
    }
    m[e.at("secret").get<SecretIndex>()] = std::move(access);
  }
  return m;
}

inline json entry_key_json(const EntryKey& k) {
  return {{"secret", k.secret}, {"set", k.set}, {"participant", k.participant}};
}

inline EntryKey entry_key_from(const json& e) {
  return {e.at("secret").get<SecretIndex>(), e.at("set").get<SetIndex>(),
          e.at("participant").get<ParticipantIndex>()};
}

inline json masks_json(const std::map<EntryKey, FieldElement>& m) {
  json arr = json::array();
  for (const auto& [k, v] : m) {
    json e = entry_key_json(k);
    e["value"] = v.to_hex();
    arr.push_back(std::move(e));
  }
  return arr;
}

inline std::map<EntryKey, FieldElement> masks_from(const json& arr, const Prime& p) {
  std::map<EntryKey, FieldElement> m;
  for (const json& e : arr) m[entry_key_from(e)] = element(e.at("value"), p);
  return m;
}

inline json commitments_json(const std::map<EntryKey, Commitment>& m) {
  json arr = json::array();
  for (const auto& [k, c] : m) {
    json e = entry_key_json(k);
    e.update(to_json(c));
    arr.push_back(std::move(e));
  }
  return arr;
}

inline std::map<EntryKey, Commitment> commitments_from(const json& arr, const Prime& p) {
  std::map<EntryKey, Commitment> m;
  for (const json& e : arr) m[entry_key_from(e)] = commitment_from_json(e, p);
  return m;
}

inline json secret_commitments_json(const std::map<SecretIndex, Commitment>& m) {
  json arr = json::array();
  for (const auto& [i, c] : m) {
    json e = to_json(c);
    e["secret"] = i;
    arr.push_back(std::move(e));
  }
  return arr;
}

inline std::map<SecretIndex, Commitment> secret_commitments_from(const json& arr,
                                                                 const Prime& p) {
  std::map<SecretIndex, Commitment> m;
  for (const json& e : arr) m[e.at("secret").get<SecretIndex>()] = commitment_from_json(e, p);
  return m;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Bulletin

inline json to_json(const Bulletin& b) {
  return {
      {"format", kBulletinFormat},
      {"version", b.version},
      {"params", to_json(b.params)},
      {"participants", detail::participants_json(b.participants)},
      {"structure", detail::structure_json(b.structure)},
      {"masks", detail::masks_json(b.masks)},
      {"participant_commitments", detail::commitments_json(b.participant_commitments)},
      {"secret_commitments", detail::secret_commitments_json(b.secret_commitments)},
  };
}

inline Bulletin bulletin_from_json(const json& j) {
  detail::expect_format(j, kBulletinFormat);
  return detail::guarded([&] {
    Bulletin b{params_from_json(j.at("params")), j.at("version").get<std::uint64_t>()};
    const Prime& p = b.params.prime;
    b.participants = detail::participants_from(j.at("participants"), p);
    b.structure = detail::structure_from(j.at("structure"));
    b.masks = detail::masks_from(j.at("masks"), p);
    b.participant_commitments = detail::commitments_from(j.at("participant_commitments"), p);
    b.secret_commitments = detail::secret_commitments_from(j.at("secret_commitments"), p);
    return b;
  });
}

inline std::string emit_bulletin(const Bulletin& b) { return emit_canonical(to_json(b)); }
inline Bulletin parse_bulletin(std::string_view text) {
  return bulletin_from_json(parse_document(text));
}

// ---------------------------------------------------------------------------
// Dealer state

inline json to_json(const SchemeState& st) {
  json secrets = json::array();
  for (const auto& [i, s] : st.secrets) secrets.push_back({{"secret", i}, {"value", s.to_hex()}});
  json polys = json::array();
  for (const auto& [key, f] : st.polynomials) {
    json coeffs = json::array();
    for (const FieldElement& c : f.coefficients) coeffs.push_back(c.to_hex());
    polys.push_back({{"secret", key.secret}, {"set", key.set}, {"coefficients", coeffs}});
  }
  json shares = json::array();
  for (const auto& [j, x] : st.shares) shares.push_back({{"participant", j}, {"share", x.to_hex()}});
  json doc = {{"format", kStateFormat},
              {"bulletin", to_json(st.bulletin)},
              {"secrets", secrets},
              {"polynomials", polys},
              {"shares", shares}};
  if (st.seed) doc["seed"] = *st.seed;
  return doc;
}

inline SchemeState state_from_json(const json& j) {
  detail::expect_format(j, kStateFormat);
  return detail::guarded([&] {
    SchemeState st{bulletin_from_json(j.at("bulletin"))};
    const Prime& p = st.bulletin.params.prime;
    for (const json& e : j.at("secrets")) {
      st.secrets[e.at("secret").get<SecretIndex>()] = detail::element(e.at("value"), p);
    }
    for (const json& e : j.at("polynomials")) {
      Polynomial f;
      for (const json& c : e.at("coefficients")) f.coefficients.push_back(detail::element(c, p));
      st.polynomials[{e.at("secret").get<SecretIndex>(), e.at("set").get<SetIndex>()}] = f;
    }
    for (const json& e : j.at("shares")) {
      st.shares[e.at("participant").get<ParticipantIndex>()] = detail::element(e.at("share"), p);
    }
    if (j.contains("seed")) st.seed = j.at("seed").get<std::uint64_t>();
    return st;
  });
}

// ---------------------------------------------------------------------------
// Share files and pseudo-share documents

struct ShareFile {
  ParticipantIndex participant = 0;
  BigInt share = 0;
  std::string scheme;

  friend bool operator==(const ShareFile&, const ShareFile&) = default;
};

inline json to_json(const ShareFile& s) {
  return {{"format", kShareFormat},
          {"participant", s.participant},
          {"share", to_hex(s.share)},
          {"scheme", s.scheme}};
}

inline ShareFile share_from_json(const json& j) {
  detail::expect_format(j, kShareFormat);
  return detail::guarded([&] {
    return ShareFile{j.at("participant").get<ParticipantIndex>(),
                     parse_hex(j.at("share").get<std::string>()),
                     j.at("scheme").get<std::string>()};
  });
}

inline json to_json(const PseudoShare& ps, const std::string& scheme) {
  return {{"format", kPseudoShareFormat},
          {"participant", ps.participant},
          {"secret", ps.secret},
          {"set", ps.set},
          {"value", ps.value.to_hex()},
          {"scheme", scheme}};
}

/// Values outside [0, p) are reduced; such a pseudo-share simply fails
/// verification.
inline PseudoShare pseudo_share_from_json(const json& j, const SchemeParameters& params) {
  detail::expect_format(j, kPseudoShareFormat);
  return detail::guarded([&] {
    if (j.at("scheme").get<std::string>() != scheme_identifier(params)) {
      throw Error(Errc::scheme_mismatch, "pseudo-share was issued for a different scheme");
    }
    return PseudoShare{params.prime.reduce(parse_hex(j.at("value").get<std::string>())),
                       j.at("secret").get<SecretIndex>(), j.at("set").get<SetIndex>(),
                       j.at("participant").get<ParticipantIndex>()};
  });
}

// ---------------------------------------------------------------------------
// Journal

inline json to_json(const BulletinDelta& d, const std::optional<SchemeParameters>& params = {}) {
  json removed = json::array();
  for (const EntryKey& k : d.removed_entries) removed.push_back(detail::entry_key_json(k));
  json doc = {
      {"version", d.version},
      {"kind", renewal_name(d.kind)},
      {"participants", detail::participants_json(d.participants)},
      {"structure", detail::structure_json(d.structure)},
      {"masks", detail::masks_json(d.masks)},
      {"participant_commitments", detail::commitments_json(d.participant_commitments)},
      {"secret_commitments", detail::secret_commitments_json(d.secret_commitments)},
      {"removed_entries", removed},
      {"removed_secret_commitments", d.removed_secret_commitments},
  };
  if (params) doc["params"] = to_json(*params);
  return doc;
}

inline BulletinDelta delta_from_json(const json& j, const Prime& p) {
  return detail::guarded([&] {
    BulletinDelta d;
    d.version = j.at("version").get<std::uint64_t>();
    d.kind = parse_renewal_kind(j.at("kind").get<std::string>());
    d.participants = detail::participants_from(j.at("participants"), p);
    d.structure = detail::structure_from(j.at("structure"));
    d.masks = detail::masks_from(j.at("masks"), p);
    d.participant_commitments = detail::commitments_from(j.at("participant_commitments"), p);
    d.secret_commitments = detail::secret_commitments_from(j.at("secret_commitments"), p);
    for (const json& k : j.at("removed_entries")) d.removed_entries.insert(detail::entry_key_from(k));
    for (const json& i : j.at("removed_secret_commitments")) {
      d.removed_secret_commitments.insert(i.get<SecretIndex>());
    }
    return d;
  });
}

/// One journal line (compact JSON, newline-terminated). The setup record
/// carries the immutable parameters.
inline std::string journal_line(const BulletinDelta& d,
                                const std::optional<SchemeParameters>& params = {}) {
  return to_json(d, params).dump() + "\n";
}

/// Rebuilds the bulletin by folding every journal record, starting from the
/// parameters in the first one.
inline Bulletin replay_journal(std::istream& in) {
  std::optional<Bulletin> b;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json doc = parse_document(line);
    if (!b) {
      if (!doc.contains("params")) {
        throw Error(Errc::parse_error, "journal does not start with a setup record");
      }
      b = empty_bulletin(params_from_json(doc.at("params")));
    }
    const BulletinDelta d = delta_from_json(doc, b->params.prime);
    if (d.version != b->version + 1) {
      throw Error(Errc::parse_error, "journal versions are not consecutive");
    }
    apply_delta(*b, d);
  }
  if (!b) throw Error(Errc::parse_error, "journal is empty");
  return *b;
}

// ---------------------------------------------------------------------------
// Dealer configuration

namespace detail {

inline BigInt integer_field(const json& v) {
  if (v.is_number_unsigned()) return BigInt(v.get<std::uint64_t>());
  if (v.is_number_integer()) return BigInt(v.get<std::int64_t>());
  if (v.is_string()) {
    std::string s = v.get<std::string>();
    if (!s.empty() && s[0] == '-') return -parse_integer(std::string_view(s).substr(1));
    return parse_integer(s);
  }
  throw Error(Errc::parse_error, "expected an integer or integer string");
}

}  // namespace detail

/// Dealer configuration document:
///   prime        decimal/0x-hex string or number; or
///   prime_bits   width of a prime to generate (with optional safe_prime)
///   secrets      list of non-negative integers (numbers or strings)
///   participants participant count n
///   structure    structure[i][q] = member list of set q+1 of secret i+1
///   hash, mode, capacities {secrets, sets}, generator, shares   optional
inline DealerConfig config_from_json(const json& j, RandomSource& rng) {
  return detail::guarded([&] {
    std::optional<Prime> prime;
    if (j.contains("prime")) {
      prime = validate_prime(detail::integer_field(j.at("prime")));
    } else if (j.contains("prime_bits")) {
      const unsigned bits = j.at("prime_bits").get<unsigned>();
      prime = j.value("safe_prime", false) ? generate_safe_prime(bits, rng)
                                           : generate_prime(bits, rng);
    } else {
      throw Error(Errc::parse_error, "configuration needs 'prime' or 'prime_bits'");
    }
    DealerConfig cfg{*prime};
    for (const json& s : j.at("secrets")) cfg.secrets.push_back(detail::integer_field(s));
    cfg.structure = j.at("structure").get<std::vector<std::vector<QualifiedSet>>>();
    cfg.participants = j.at("participants").get<ParticipantIndex>();
    if (j.contains("hash")) cfg.hash = parse_hash_algorithm(j.at("hash").get<std::string>());
    if (j.contains("mode")) cfg.mode = parse_commit_mode(j.at("mode").get<std::string>());
    if (j.contains("capacities")) {
      cfg.capacities = Capacities{j.at("capacities").at("secrets").get<std::uint32_t>(),
                                  j.at("capacities").at("sets").get<std::uint32_t>()};
    }
    if (j.contains("generator")) cfg.generator = detail::integer_field(j.at("generator"));
    if (j.contains("shares")) {
      std::vector<BigInt> shares;
      for (const json& s : j.at("shares")) shares.push_back(detail::integer_field(s));
      cfg.chosen_shares = std::move(shares);
    }
    return cfg;
  });
}

}  // namespace mssgas::io
