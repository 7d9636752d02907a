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
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mssgas/commit.hpp"
#include "mssgas/error.hpp"
#include "mssgas/field.hpp"
#include "mssgas/random.hpp"

namespace mssgas {

// Indices are 1-based throughout, matching the published bulletin.
using ParticipantIndex = std::uint32_t;
using SecretIndex = std::uint32_t;
using SetIndex = std::uint32_t;

struct SetKey {
  SecretIndex secret = 0;
  SetIndex set = 0;

  auto operator<=>(const SetKey&) const = default;
};

/// (i, q, participant): the key of every per-member bulletin entry.
struct EntryKey {
  SecretIndex secret = 0;
  SetIndex set = 0;
  ParticipantIndex participant = 0;

  SetKey set_key() const { return {secret, set}; }
  auto operator<=>(const EntryKey&) const = default;
};

inline std::string to_string(const SetKey& k) {
  return "(" + std::to_string(k.secret) + "," + std::to_string(k.set) + ")";
}
inline std::string to_string(const EntryKey& k) {
  return "(" + std::to_string(k.secret) + "," + std::to_string(k.set) + "," +
         std::to_string(k.participant) + ")";
}

/// Upper bounds on issued secret and set indices. They fix the index
/// widths of the pseudo-share encoding for the lifetime of the scheme.
struct Capacities {
  std::uint32_t secrets = 0;
  std::uint32_t sets = 0;

  friend bool operator==(const Capacities&, const Capacities&) = default;
};

/// Parameters fixed at setup and never changed by renewal.
struct SchemeParameters {
  explicit SchemeParameters(Prime p) : prime(std::move(p)) {}

  Prime prime;
  HashAlgorithm hash = HashAlgorithm::sha256;
  CommitMode mode = CommitMode::hash;
  EncodingParams encoding;
  Capacities capacities;
  std::optional<FieldElement> generator;

  CommitParams commit_params() const { return {prime, hash, generator}; }

  friend bool operator==(const SchemeParameters&, const SchemeParameters&) = default;
};

struct ParticipantRecord {
  FieldElement id;
  bool active = true;

  friend bool operator==(const ParticipantRecord&, const ParticipantRecord&) = default;
};

using QualifiedSet = std::vector<ParticipantIndex>;

/// Access structure of one secret. Set indices are never reused: retired
/// sets disappear from `sets` but still count towards `issued_sets`.
struct SecretAccess {
  bool active = true;
  SetIndex issued_sets = 0;
  std::map<SetIndex, QualifiedSet> sets;

  friend bool operator==(const SecretAccess&, const SecretAccess&) = default;
};

/// Everything the dealer publishes.
struct Bulletin {
  explicit Bulletin(SchemeParameters p, std::uint64_t v = 0) : version(v), params(std::move(p)) {}

  std::uint64_t version = 0;
  SchemeParameters params;
  std::map<ParticipantIndex, ParticipantRecord> participants;
  std::map<SecretIndex, SecretAccess> structure;
  std::map<EntryKey, FieldElement> masks;
  std::map<EntryKey, Commitment> participant_commitments;
  std::map<SecretIndex, Commitment> secret_commitments;

  const QualifiedSet* find_set(SetKey key) const {
    auto s = structure.find(key.secret);
    if (s == structure.end() || !s->second.active) return nullptr;
    auto q = s->second.sets.find(key.set);
    return q == s->second.sets.end() ? nullptr : &q->second;
  }

  const QualifiedSet& qualified_set(SetKey key) const {
    if (const QualifiedSet* set = find_set(key)) return *set;
    throw Error(Errc::unknown_set, "no active qualified set " + to_string(key));
  }

  bool secret_active(SecretIndex i) const {
    auto s = structure.find(i);
    return s != structure.end() && s->second.active;
  }

  SecretIndex issued_secrets() const { return structure.empty() ? 0 : structure.rbegin()->first; }

  std::size_t active_participants() const {
    return static_cast<std::size_t>(std::count_if(
        participants.begin(), participants.end(), [](const auto& kv) { return kv.second.active; }));
  }

  friend bool operator==(const Bulletin&, const Bulletin&) = default;
};

/// What a participant hands to the combiner for one (i, q).
struct PseudoShare {
  FieldElement value;
  SecretIndex secret = 0;
  SetIndex set = 0;
  ParticipantIndex participant = 0;

  EntryKey key() const { return {secret, set, participant}; }
  friend bool operator==(const PseudoShare&, const PseudoShare&) = default;
};

/// Dealer-private state. The bulletin is exactly the publication of the
/// rest of it, which audit_bulletin checks.
struct SchemeState {
  explicit SchemeState(Bulletin b) : bulletin(std::move(b)) {}

  std::map<SecretIndex, FieldElement> secrets;
  std::map<SetKey, Polynomial> polynomials;
  std::map<ParticipantIndex, FieldElement> shares;
  Bulletin bulletin;
  std::optional<std::uint64_t> seed;  // only for seeded (test) dealings

  friend bool operator==(const SchemeState&, const SchemeState&) = default;
};

struct DealerConfig {
  explicit DealerConfig(Prime p) : prime(std::move(p)) {}

  Prime prime;
  std::vector<BigInt> secrets;
  /// structure[i - 1] lists the qualified sets of secret i.
  std::vector<std::vector<QualifiedSet>> structure;
  ParticipantIndex participants = 0;
  HashAlgorithm hash = HashAlgorithm::sha256;
  CommitMode mode = CommitMode::hash;
  std::optional<Capacities> capacities;  // defaults to twice the initial k and l
  std::optional<BigInt> generator;
  /// Participant-chosen shares, one per participant. Rejected unless all
  /// distinct.
  std::optional<std::vector<BigInt>> chosen_shares;
};

struct SetupResult {
  SchemeState state;
  std::map<ParticipantIndex, FieldElement> shares;
};

// ---------------------------------------------------------------------------
// Building blocks shared by the dealer, the participants and renewal.

/// U = h(x || i || q) as a field element.
inline FieldElement derive_pseudo_share(const FieldElement& share, SecretIndex i, SetIndex q,
                                        const SchemeParameters& params) {
  return hash_to_field(encode_hash_input(share.value(), i, q, params.encoding), params.prime,
                       params.hash);
}

/// M = f(ID) - U mod p.
inline FieldElement mask_for(const Polynomial& f, const FieldElement& id,
                             const FieldElement& pseudo_share, const Prime& p) {
  return p.sub(poly_eval(f, id, p), pseudo_share);
}

namespace detail {

inline BigInt max_sets_for(std::size_t n) {
  // 2^n - (n + 1): all subsets of size >= 2.
  return (BigInt(1) << n) - (n + 1);
}

/// Checks a list of new qualified sets for one secret against the registry.
inline void validate_sets(const Bulletin& b, const std::vector<QualifiedSet>& sets,
                          SecretIndex i) {
  const std::string where = "secret " + std::to_string(i);
  if (sets.empty()) throw Error(Errc::structure_invalid, where + " has no qualified set");
  std::set<std::vector<ParticipantIndex>> seen;
  for (const QualifiedSet& set : sets) {
    if (set.size() < 2) {
      throw Error(Errc::structure_invalid,
                  where + ": qualified set must have at least 2 members");
    }
    std::vector<ParticipantIndex> sorted = set;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw Error(Errc::structure_invalid, where + ": qualified set lists a member twice");
    }
    for (ParticipantIndex j : sorted) {
      auto it = b.participants.find(j);
      if (it == b.participants.end()) {
        throw Error(Errc::structure_invalid,
                    where + ": qualified set names unknown participant " + std::to_string(j));
      }
      if (!it->second.active) {
        throw Error(Errc::structure_invalid,
                    where + ": qualified set names inactive participant " + std::to_string(j));
      }
    }
    if (!seen.insert(sorted).second) {
      throw Error(Errc::structure_invalid, where + ": duplicate qualified set");
    }
  }
  const std::size_t n = b.active_participants();
  if (n < 64 && BigInt(sets.size()) > max_sets_for(n)) {
    throw Error(Errc::structure_invalid,
                where + ": more qualified sets than subsets of size >= 2");
  }
}

inline void publish_set(SchemeState& st, SetKey key) {
  Bulletin& b = st.bulletin;
  const SchemeParameters& params = b.params;
  const Polynomial& f = st.polynomials.at(key);
  const CommitParams cp = params.commit_params();
  for (ParticipantIndex j : b.qualified_set(key)) {
    const FieldElement u = derive_pseudo_share(st.shares.at(j), key.secret, key.set, params);
    const EntryKey entry{key.secret, key.set, j};
    b.masks[entry] = mask_for(f, b.participants.at(j).id, u, params.prime);
    b.participant_commitments[entry] = commit(u, params.mode, cp);
  }
}

inline void retract_set(SchemeState& st, SetKey key) {
  Bulletin& b = st.bulletin;
  auto first = b.masks.lower_bound({key.secret, key.set, 0});
  auto last = b.masks.lower_bound({key.secret, key.set + 1, 0});
  b.masks.erase(first, last);
  auto cfirst = b.participant_commitments.lower_bound({key.secret, key.set, 0});
  auto clast = b.participant_commitments.lower_bound({key.secret, key.set + 1, 0});
  b.participant_commitments.erase(cfirst, clast);
  st.polynomials.erase(key);
}

inline void publish_secret(SchemeState& st, SecretIndex i) {
  Bulletin& b = st.bulletin;
  b.secret_commitments[i] = commit(st.secrets.at(i), b.params.mode, b.params.commit_params());
}

/// Samples a fresh polynomial for an existing set and publishes its entries.
inline void deal_set(SchemeState& st, SetKey key, RandomSource& rng) {
  const QualifiedSet& set = st.bulletin.qualified_set(key);
  st.polynomials[key] =
      sample_polynomial(st.secrets.at(key.secret), set.size() - 1, st.bulletin.params.prime, rng);
  publish_set(st, key);
}

inline FieldElement draw_distinct(const Prime& p, const std::set<BigInt>& taken, bool nonzero,
                                  RandomSource& rng) {
  for (;;) {
    FieldElement v = nonzero ? p.random_nonzero(rng) : p.random(rng);
    if (!taken.contains(v.value())) return v;
  }
}

inline FieldElement secret_element(const Prime& p, const BigInt& s) {
  if (!p.contains(s)) {
    throw Error(Errc::secret_out_of_range,
                "secret " + s.str() + " must satisfy 0 <= s < p = " + p.value().str());
  }
  return p.element(s);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dealer

/// Initialisation, pseudo-share generation and publication of every mask
/// and commitment.
inline SetupResult dealer_setup(const DealerConfig& cfg, RandomSource& rng) {
  const Prime& p = cfg.prime;
  const std::size_t k = cfg.secrets.size();
  const ParticipantIndex n = cfg.participants;
  if (k == 0) throw Error(Errc::structure_invalid, "at least one secret is required");
  if (cfg.structure.size() != k) {
    throw Error(Errc::structure_invalid, "access structure must list one entry per secret");
  }
  if (n < 2) throw Error(Errc::structure_invalid, "at least two participants are required");
  if (BigInt(n) >= p.value()) {
    throw Error(Errc::field_exhausted, "participant count must be below p");
  }

  SchemeState st{Bulletin{SchemeParameters{p}}};
  for (std::size_t idx = 0; idx < k; ++idx) {
    st.secrets[static_cast<SecretIndex>(idx + 1)] = detail::secret_element(p, cfg.secrets[idx]);
  }

  std::size_t l = 0;
  for (const auto& sets : cfg.structure) l = std::max(l, sets.size());
  Capacities caps = cfg.capacities.value_or(
      Capacities{static_cast<std::uint32_t>(2 * k), static_cast<std::uint32_t>(2 * l)});
  if (caps.secrets < k || caps.sets < l) {
    throw Error(Errc::capacity_exceeded, "declared capacities are below the initial k or l");
  }

  SchemeParameters& params = st.bulletin.params;
  params.hash = cfg.hash;
  params.mode = cfg.mode;
  params.capacities = caps;
  params.encoding = EncodingParams::for_capacity(p, caps.secrets, caps.sets);
  if (digest_bits(cfg.hash) < p.bit_length()) {
    throw Error(Errc::hash_too_short, std::string(hash_name(cfg.hash)) +
                                          " digest is shorter than the field width");
  }
  if (cfg.generator) {
    if (*cfg.generator < 2 || *cfg.generator >= p.value()) {
      throw Error(Errc::missing_generator, "generator must lie in [2, p)");
    }
    FieldElement g = p.element(*cfg.generator);
    if (auto factors = group_order_factors(p); factors && !is_primitive_root(g, p, *factors)) {
      throw Error(Errc::missing_generator, "supplied generator is not a primitive root");
    }
    params.generator = g;
  } else if (cfg.mode == CommitMode::dlog) {
    params.generator = find_primitive_root(p);
  }

  // Identifiers in Z_p^*, shares in Z_p, both pairwise distinct.
  Bulletin& b = st.bulletin;
  b.version = 1;
  std::set<BigInt> ids;
  for (ParticipantIndex j = 1; j <= n; ++j) {
    FieldElement id = detail::draw_distinct(p, ids, true, rng);
    ids.insert(id.value());
    b.participants[j] = ParticipantRecord{id, true};
  }
  std::set<BigInt> taken;
  if (cfg.chosen_shares) {
    if (cfg.chosen_shares->size() != n) {
      throw Error(Errc::structure_invalid, "one chosen share is required per participant");
    }
    for (ParticipantIndex j = 1; j <= n; ++j) {
      const BigInt& x = (*cfg.chosen_shares)[j - 1];
      if (!p.contains(x)) {
        throw Error(Errc::value_out_of_range, "chosen share must lie in [0, p)");
      }
      if (!taken.insert(x).second) {
        throw Error(Errc::duplicate_share, "participant " + std::to_string(j) +
                                               " chose a share already in use");
      }
      st.shares[j] = p.element(x);
    }
  } else {
    for (ParticipantIndex j = 1; j <= n; ++j) {
      FieldElement x = detail::draw_distinct(p, taken, false, rng);
      taken.insert(x.value());
      st.shares[j] = x;
    }
  }

  for (std::size_t idx = 0; idx < k; ++idx) {
    const auto i = static_cast<SecretIndex>(idx + 1);
    const auto& sets = cfg.structure[idx];
    detail::validate_sets(b, sets, i);
    SecretAccess access;
    access.issued_sets = static_cast<SetIndex>(sets.size());
    for (std::size_t q = 0; q < sets.size(); ++q) {
      access.sets[static_cast<SetIndex>(q + 1)] = sets[q];
    }
    b.structure[i] = std::move(access);
  }

  for (const auto& [i, access] : b.structure) {
    for (const auto& [q, set] : access.sets) detail::deal_set(st, {i, q}, rng);
  }
  for (const auto& [i, access] : b.structure) detail::publish_secret(st, i);

  return SetupResult{st, st.shares};
}

// ---------------------------------------------------------------------------
// Participants

/// Phase I: the participant derives the one-time value for (i, q).
inline PseudoShare participant_pseudo_share(const FieldElement& share, ParticipantIndex j,
                                            SecretIndex i, SetIndex q, const Bulletin& b) {
  const QualifiedSet& set = b.qualified_set({i, q});
  if (std::find(set.begin(), set.end(), j) == set.end()) {
    throw Error(Errc::not_a_member, "participant " + std::to_string(j) +
                                        " is not a member of set " + to_string(SetKey{i, q}));
  }
  return PseudoShare{derive_pseudo_share(share, i, q, b.params), i, q, j};
}

/// Phase II: checks a secret announced by the combiner against S_i.
inline bool participant_verify_secret(const FieldElement& claimed, SecretIndex i,
                                      const Bulletin& b) {
  auto it = b.secret_commitments.find(i);
  if (it == b.secret_commitments.end() || !b.secret_active(i)) {
    throw Error(Errc::unknown_secret_index, "no active secret " + std::to_string(i));
  }
  return verify_commitment(claimed, it->second, b.params.commit_params());
}

// ---------------------------------------------------------------------------
// Combiner

inline bool combiner_verify_participant(const PseudoShare& claimed, const Bulletin& b) {
  auto it = b.participant_commitments.find(claimed.key());
  if (it == b.participant_commitments.end()) {
    throw Error(Errc::unknown_triple, "no commitment published for " + to_string(claimed.key()));
  }
  if (!b.params.prime.contains(claimed.value.value())) return false;
  return verify_commitment(claimed.value, it->second, b.params.commit_params());
}

struct ReconstructOptions {
  /// Skipping verification is for adversarial testing only.
  bool verify = true;
};

namespace detail {

inline void check_submission(SetKey key, const std::map<ParticipantIndex, PseudoShare>& shares,
                             const Bulletin& b) {
  const QualifiedSet& set = b.qualified_set(key);
  std::vector<std::uint32_t> missing;
  for (ParticipantIndex j : set) {
    if (!shares.contains(j)) missing.push_back(j);
  }
  if (!missing.empty()) {
    std::string names;
    for (auto j : missing) names += " " + std::to_string(j);
    throw MemberError(Errc::incomplete_set,
                      "qualified set " + to_string(key) + " is missing participants" + names,
                      missing);
  }
  for (const auto& [j, ps] : shares) {
    if (std::find(set.begin(), set.end(), j) == set.end()) {
      throw Error(Errc::not_a_member, "participant " + std::to_string(j) +
                                          " is not a member of set " + to_string(key));
    }
    if (ps.participant != j || ps.secret != key.secret || ps.set != key.set) {
      throw Error(Errc::unknown_triple, "pseudo-share " + to_string(ps.key()) +
                                            " submitted for " + to_string(EntryKey{key.secret, key.set, j}));
    }
  }
}

}  // namespace detail

/// One verdict per member of A_q^{s_i}.
inline std::map<ParticipantIndex, bool> combiner_verify_set(
    SecretIndex i, SetIndex q, const std::map<ParticipantIndex, PseudoShare>& shares,
    const Bulletin& b) {
  detail::check_submission({i, q}, shares, b);
  std::map<ParticipantIndex, bool> verdicts;
  for (const auto& [j, ps] : shares) verdicts[j] = combiner_verify_participant(ps, b);
  return verdicts;
}

/// Verifies every member (unless told not to) and interpolates the points
/// (ID_b, U_b + M_b) at zero.
inline FieldElement combiner_reconstruct(SecretIndex i, SetIndex q,
                                         const std::map<ParticipantIndex, PseudoShare>& shares,
                                         const Bulletin& b, ReconstructOptions options = {}) {
  detail::check_submission({i, q}, shares, b);
  const Prime& p = b.params.prime;
  if (options.verify) {
    std::vector<std::uint32_t> failed;
    for (const auto& [j, ps] : shares) {
      if (!combiner_verify_participant(ps, b)) failed.push_back(j);
    }
    if (!failed.empty()) {
      std::string names;
      for (auto j : failed) names += " " + std::to_string(j);
      throw MemberError(Errc::verification_failed, "dishonest participants:" + names, failed);
    }
  }
  std::vector<Point> points;
  points.reserve(shares.size());
  for (const auto& [j, ps] : shares) {
    const FieldElement& mask = b.masks.at(ps.key());
    points.push_back({b.participants.at(j).id, p.add(p.reduce(ps.value.value()), mask)});
  }
  return lagrange_at_zero(points, p);
}

// ---------------------------------------------------------------------------
// Audit

struct AuditFinding {
  std::string table;  // "masks", "participant_commitments", "secret_commitments", "polynomials"
  EntryKey key;       // secret commitments use {i, 0, 0}; polynomials use {i, q, 0}
  std::string problem;
};

/// Recomputes every published value from the private state and reports
/// each mismatch with the bulletin.
inline std::vector<AuditFinding> audit_findings(const SchemeState& st) {
  std::vector<AuditFinding> out;
  const Bulletin& b = st.bulletin;
  const SchemeParameters& params = b.params;
  const CommitParams cp = params.commit_params();

  std::map<EntryKey, FieldElement> masks;
  std::map<EntryKey, Commitment> commitments;
  std::map<SecretIndex, Commitment> secret_commitments;
  for (const auto& [i, access] : b.structure) {
    if (!access.active) continue;
    auto secret = st.secrets.find(i);
    if (secret == st.secrets.end()) {
      out.push_back({"secret_commitments", {i, 0, 0}, "no private secret"});
      continue;
    }
    secret_commitments[i] = commit(secret->second, params.mode, cp);
    for (const auto& [q, set] : access.sets) {
      auto poly = st.polynomials.find({i, q});
      if (poly == st.polynomials.end()) {
        out.push_back({"polynomials", {i, q, 0}, "no polynomial"});
        continue;
      }
      const Polynomial& f = poly->second;
      if (f.coefficients.size() != set.size() || !(f.constant_term() == secret->second)) {
        out.push_back({"polynomials", {i, q, 0}, "polynomial does not match set or secret"});
      }
      for (ParticipantIndex j : set) {
        const FieldElement u = derive_pseudo_share(st.shares.at(j), i, q, params);
        masks[{i, q, j}] = mask_for(f, b.participants.at(j).id, u, params.prime);
        commitments[{i, q, j}] = commit(u, params.mode, cp);
      }
    }
  }

  auto compare = [&out](const char* table, const auto& expected, const auto& actual, auto to_key) {
    for (const auto& [k, v] : expected) {
      auto it = actual.find(k);
      if (it == actual.end()) out.push_back({table, to_key(k), "missing"});
      else if (!(it->second == v)) out.push_back({table, to_key(k), "differs"});
    }
    for (const auto& [k, v] : actual) {
      if (!expected.contains(k)) out.push_back({table, to_key(k), "unexpected"});
    }
  };
  auto same = [](const EntryKey& k) { return k; };
  compare("masks", masks, b.masks, same);
  compare("participant_commitments", commitments, b.participant_commitments, same);
  compare("secret_commitments", secret_commitments, b.secret_commitments,
          [](SecretIndex i) { return EntryKey{i, 0, 0}; });
  return out;
}

inline bool audit_bulletin(const SchemeState& st) { return audit_findings(st).empty(); }

}  // namespace mssgas
