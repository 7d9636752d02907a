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
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "mssgas/error.hpp"
#include "mssgas/scheme.hpp"

namespace mssgas {

enum class RenewalKind {
  setup,
  add_secret,
  deactivate_secret,
  remove_secret,
  add_participant,
  deactivate_participant,
  add_set,
  deactivate_set,
};

inline std::string_view renewal_name(RenewalKind k) {
  switch (k) {
    case RenewalKind::setup: return "setup";
    case RenewalKind::add_secret: return "add-secret";
    case RenewalKind::deactivate_secret: return "deactivate-secret";
    case RenewalKind::remove_secret: return "remove-secret";
    case RenewalKind::add_participant: return "add-participant";
    case RenewalKind::deactivate_participant: return "deactivate-participant";
    case RenewalKind::add_set: return "add-set";
    case RenewalKind::deactivate_set: return "deactivate-set";
  }
  return "unknown";
}

inline RenewalKind parse_renewal_kind(std::string_view name) {
  for (RenewalKind k :
       {RenewalKind::setup, RenewalKind::add_secret, RenewalKind::deactivate_secret,
        RenewalKind::remove_secret, RenewalKind::add_participant,
        RenewalKind::deactivate_participant, RenewalKind::add_set, RenewalKind::deactivate_set}) {
    if (renewal_name(k) == name) return k;
  }
  throw Error(Errc::parse_error, "unknown renewal kind '" + std::string(name) + "'");
}

/// Change record between two bulletin versions. Participants and
/// per-secret structure are carried whole; entries are upserted or removed
/// by key. Folding deltas from an empty bulletin reproduces the current one.
struct BulletinDelta {
  std::uint64_t version = 0;
  RenewalKind kind = RenewalKind::setup;
  std::map<ParticipantIndex, ParticipantRecord> participants;
  std::map<SecretIndex, SecretAccess> structure;
  std::map<EntryKey, FieldElement> masks;
  std::map<EntryKey, Commitment> participant_commitments;
  std::map<SecretIndex, Commitment> secret_commitments;
  std::set<EntryKey> removed_entries;
  std::set<SecretIndex> removed_secret_commitments;

  /// Secrets whose structure or published values changed.
  std::set<SecretIndex> touched_secrets() const {
    std::set<SecretIndex> out;
    for (const auto& [i, a] : structure) out.insert(i);
    for (const auto& [k, v] : masks) out.insert(k.secret);
    for (const auto& [k, v] : participant_commitments) out.insert(k.secret);
    for (const auto& [i, c] : secret_commitments) out.insert(i);
    for (const auto& k : removed_entries) out.insert(k.secret);
    for (SecretIndex i : removed_secret_commitments) out.insert(i);
    return out;
  }

  friend bool operator==(const BulletinDelta&, const BulletinDelta&) = default;
};

inline BulletinDelta diff_bulletins(const Bulletin& before, const Bulletin& after,
                                    RenewalKind kind) {
  BulletinDelta d;
  d.version = after.version;
  d.kind = kind;
  for (const auto& [j, rec] : after.participants) {
    auto it = before.participants.find(j);
    if (it == before.participants.end() || !(it->second == rec)) d.participants[j] = rec;
  }
  for (const auto& [i, access] : after.structure) {
    auto it = before.structure.find(i);
    if (it == before.structure.end() || !(it->second == access)) d.structure[i] = access;
  }
  auto upserts = [](const auto& old_map, const auto& new_map, auto& out) {
    for (const auto& [k, v] : new_map) {
      auto it = old_map.find(k);
      if (it == old_map.end() || !(it->second == v)) out[k] = v;
    }
  };
  upserts(before.masks, after.masks, d.masks);
  upserts(before.participant_commitments, after.participant_commitments,
          d.participant_commitments);
  upserts(before.secret_commitments, after.secret_commitments, d.secret_commitments);
  for (const auto& [k, v] : before.masks) {
    if (!after.masks.contains(k)) d.removed_entries.insert(k);
  }
  for (const auto& [k, v] : before.participant_commitments) {
    if (!after.participant_commitments.contains(k)) d.removed_entries.insert(k);
  }
  for (const auto& [i, c] : before.secret_commitments) {
    if (!after.secret_commitments.contains(i)) d.removed_secret_commitments.insert(i);
  }
  return d;
}

inline void apply_delta(Bulletin& b, const BulletinDelta& d) {
  b.version = d.version;
  for (const auto& [j, rec] : d.participants) b.participants[j] = rec;
  for (const auto& [i, access] : d.structure) b.structure[i] = access;
  for (const auto& k : d.removed_entries) {
    b.masks.erase(k);
    b.participant_commitments.erase(k);
  }
  for (SecretIndex i : d.removed_secret_commitments) b.secret_commitments.erase(i);
  for (const auto& [k, v] : d.masks) b.masks[k] = v;
  for (const auto& [k, v] : d.participant_commitments) b.participant_commitments[k] = v;
  for (const auto& [i, c] : d.secret_commitments) b.secret_commitments[i] = c;
}

/// A bulletin carrying only the immutable parameters, at version 0.
inline Bulletin empty_bulletin(const SchemeParameters& params) { return Bulletin{params}; }

/// The record of the initial dealing, replayable onto empty_bulletin().
inline BulletinDelta setup_delta(const Bulletin& b) {
  return diff_bulletins(empty_bulletin(b.params), b, RenewalKind::setup);
}

struct AddParticipantResult {
  BulletinDelta delta;
  ParticipantIndex index = 0;
  FieldElement share;
};

namespace detail {

// Runs `op` on a copy of the state and commits only on success, bumping
// the bulletin version and returning the delta.
template <typename Op>
BulletinDelta transact(SchemeState& st, RenewalKind kind, Op&& op) {
  SchemeState next = st;
  op(next);
  next.bulletin.version = st.bulletin.version + 1;
  BulletinDelta delta = diff_bulletins(st.bulletin, next.bulletin, kind);
  st = std::move(next);
  return delta;
}

inline SecretAccess& active_secret(SchemeState& st, SecretIndex i) {
  auto it = st.bulletin.structure.find(i);
  if (it == st.bulletin.structure.end() || !it->second.active) {
    throw Error(Errc::unknown_secret_index, "no active secret " + std::to_string(i));
  }
  return it->second;
}

// Set indices are never reused, so the limit on issued indices is the
// frozen encoding width rather than the active-set capacity.
inline SetIndex next_set_index(SchemeState& st, SecretIndex i) {
  SecretAccess& access = st.bulletin.structure.at(i);
  const unsigned width = st.bulletin.params.encoding.set_index_bits;
  if (bit_length(BigInt(access.issued_sets) + 1) > width) {
    throw Error(Errc::capacity_exceeded, "secret " + std::to_string(i) +
                                             " has used every set index that fits in " +
                                             std::to_string(width) + " bits");
  }
  return ++access.issued_sets;
}

// Replaces secret i and redeals every remaining set of it under fresh set
// indices. Old indices are retired so that pseudo-shares revealed earlier
// cannot be combined with the new masks.
inline void reissue_secret(SchemeState& st, SecretIndex i, const FieldElement& replacement,
                           RandomSource& rng) {
  SecretAccess& access = active_secret(st, i);
  std::vector<QualifiedSet> sets;
  for (const auto& [q, set] : access.sets) {
    sets.push_back(set);
    retract_set(st, {i, q});
  }
  access.sets.clear();
  st.secrets[i] = replacement;
  std::vector<SetIndex> fresh;
  for (QualifiedSet& set : sets) {
    const SetIndex q = next_set_index(st, i);
    st.bulletin.structure.at(i).sets[q] = std::move(set);
    fresh.push_back(q);
  }
  for (SetIndex q : fresh) deal_set(st, {i, q}, rng);
  publish_secret(st, i);
}

inline FieldElement replacement_element(const SchemeState& st, SecretIndex i,
                                        const BigInt& replacement) {
  FieldElement r = secret_element(st.bulletin.params.prime, replacement);
  if (r == st.secrets.at(i)) {
    throw Error(Errc::secret_out_of_range,
                "replacement for secret " + std::to_string(i) + " equals the current secret");
  }
  return r;
}

}  // namespace detail

/// Uniform replacement value distinct from the current secret i.
inline BigInt random_replacement(const SchemeState& st, SecretIndex i, RandomSource& rng) {
  const Prime& p = st.bulletin.params.prime;
  const FieldElement& current = st.secrets.at(i);
  for (;;) {
    FieldElement v = p.random(rng);
    if (!(v == current)) return v.value();
  }
}

/// Adds secret s_new with access structure `sets` under the next secret index.
inline BulletinDelta add_secret(SchemeState& st, const BigInt& s_new,
                                const std::vector<QualifiedSet>& sets, RandomSource& rng) {
  return detail::transact(st, RenewalKind::add_secret, [&](SchemeState& next) {
    Bulletin& b = next.bulletin;
    const SecretIndex i = b.issued_secrets() + 1;
    if (i > b.params.capacities.secrets) {
      throw Error(Errc::capacity_exceeded, "all " + std::to_string(b.params.capacities.secrets) +
                                               " secret indices are in use");
    }
    if (sets.size() > b.params.capacities.sets) {
      throw Error(Errc::capacity_exceeded, "more qualified sets than the set capacity");
    }
    detail::validate_sets(b, sets, i);
    next.secrets[i] = detail::secret_element(b.params.prime, s_new);
    SecretAccess access;
    for (const QualifiedSet& set : sets) access.sets[++access.issued_sets] = set;
    b.structure[i] = access;
    for (const auto& [q, set] : access.sets) detail::deal_set(next, {i, q}, rng);
    detail::publish_secret(next, i);
  });
}

/// Replaces secret i by `replacement` (random if absent) and republishes
/// everything that depends on it.
inline BulletinDelta deactivate_secret(SchemeState& st, SecretIndex i,
                                       std::optional<BigInt> replacement, RandomSource& rng) {
  return detail::transact(st, RenewalKind::deactivate_secret, [&](SchemeState& next) {
    detail::active_secret(next, i);
    const BigInt value = replacement ? *replacement : random_replacement(next, i, rng);
    detail::reissue_secret(next, i, detail::replacement_element(next, i, value), rng);
  });
}

/// Hard delete: secret i stops existing and all of its entries are removed.
inline BulletinDelta remove_secret(SchemeState& st, SecretIndex i) {
  return detail::transact(st, RenewalKind::remove_secret, [&](SchemeState& next) {
    SecretAccess& access = detail::active_secret(next, i);
    for (const auto& [q, set] : access.sets) detail::retract_set(next, {i, q});
    access.sets.clear();
    access.active = false;
    next.secrets.erase(i);
    next.bulletin.secret_commitments.erase(i);
  });
}

/// Registers a new participant with a fresh identifier and share. The
/// bulletin gains only the identifier; the participant joins qualified sets
/// through later operations.
inline AddParticipantResult add_participant(SchemeState& st, std::optional<BigInt> supplied_share,
                                            RandomSource& rng) {
  AddParticipantResult result;
  result.delta = detail::transact(st, RenewalKind::add_participant, [&](SchemeState& next) {
    Bulletin& b = next.bulletin;
    const Prime& p = b.params.prime;
    const ParticipantIndex j =
        b.participants.empty() ? 1 : b.participants.rbegin()->first + 1;
    if (BigInt(j) >= p.value()) {
      throw Error(Errc::field_exhausted, "no room for another participant below p");
    }
    std::set<BigInt> ids, shares;
    for (const auto& [idx, rec] : b.participants) ids.insert(rec.id.value());
    for (const auto& [idx, x] : next.shares) shares.insert(x.value());
    FieldElement share;
    if (supplied_share) {
      if (!p.contains(*supplied_share)) {
        throw Error(Errc::value_out_of_range, "supplied share must lie in [0, p)");
      }
      if (shares.contains(*supplied_share)) {
        throw Error(Errc::duplicate_share, "supplied share is already held by a participant");
      }
      share = p.element(*supplied_share);
    } else {
      share = detail::draw_distinct(p, shares, false, rng);
    }
    FieldElement id = detail::draw_distinct(p, ids, true, rng);
    b.participants[j] = ParticipantRecord{id, true};
    next.shares[j] = share;
    result.index = j;
    result.share = share;
  });
  return result;
}

/// Removes participant j from every qualified set and replaces each secret
/// j could help reconstruct. Sets that shrink below two members are
/// dropped, as are sets that collapse onto another set of the same secret.
inline BulletinDelta deactivate_participant(SchemeState& st, ParticipantIndex j,
                                            const std::map<SecretIndex, BigInt>& replacements,
                                            RandomSource& rng) {
  return detail::transact(st, RenewalKind::deactivate_participant, [&](SchemeState& next) {
    Bulletin& b = next.bulletin;
    auto rec = b.participants.find(j);
    if (rec == b.participants.end() || !rec->second.active) {
      throw Error(Errc::unknown_participant, "no active participant " + std::to_string(j));
    }
    std::vector<SecretIndex> affected;
    for (const auto& [i, access] : b.structure) {
      if (!access.active) continue;
      for (const auto& [q, set] : access.sets) {
        if (std::find(set.begin(), set.end(), j) != set.end()) {
          affected.push_back(i);
          break;
        }
      }
    }
    for (SecretIndex i : affected) {
      if (!replacements.contains(i)) {
        throw Error(Errc::missing_replacement,
                    "secret " + std::to_string(i) + " needs a replacement value");
      }
    }
    for (SecretIndex i : affected) {
      SecretAccess& access = b.structure.at(i);
      std::map<SetIndex, QualifiedSet> kept;
      std::set<std::vector<ParticipantIndex>> seen;
      for (auto& [q, set] : access.sets) {
        QualifiedSet shrunk;
        std::copy_if(set.begin(), set.end(), std::back_inserter(shrunk),
                     [j](ParticipantIndex m) { return m != j; });
        if (shrunk.size() < 2) continue;
        std::vector<ParticipantIndex> sorted = shrunk;
        std::sort(sorted.begin(), sorted.end());
        if (!seen.insert(sorted).second) continue;
        kept[q] = std::move(shrunk);
      }
      if (kept.empty()) {
        throw Error(Errc::orphaned_secret, "secret " + std::to_string(i) +
                                               " would lose all of its qualified sets");
      }
      // Retract everything first so dropped sets leave no entries behind.
      for (const auto& [q, set] : access.sets) detail::retract_set(next, {i, q});
      access.sets = std::move(kept);
      detail::reissue_secret(next, i, detail::replacement_element(next, i, replacements.at(i)),
                             rng);
    }
    rec->second.active = false;
  });
}

/// Appends a qualified set to secret i under the next set index.
inline BulletinDelta add_qualified_set(SchemeState& st, SecretIndex i, const QualifiedSet& members,
                                       RandomSource& rng) {
  return detail::transact(st, RenewalKind::add_set, [&](SchemeState& next) {
    SecretAccess& access = detail::active_secret(next, i);
    detail::validate_sets(next.bulletin, {members}, i);
    std::vector<ParticipantIndex> sorted = members;
    std::sort(sorted.begin(), sorted.end());
    for (const auto& [q, set] : access.sets) {
      std::vector<ParticipantIndex> other = set;
      std::sort(other.begin(), other.end());
      if (other == sorted) {
        throw Error(Errc::duplicate_set, "secret " + std::to_string(i) +
                                             " already has this qualified set as set " +
                                             std::to_string(q));
      }
    }
    const std::size_t n = next.bulletin.active_participants();
    if (n < 64 && BigInt(access.sets.size() + 1) > detail::max_sets_for(n)) {
      throw Error(Errc::structure_invalid, "more qualified sets than subsets of size >= 2");
    }
    if (access.sets.size() >= next.bulletin.params.capacities.sets) {
      throw Error(Errc::capacity_exceeded,
                  "secret " + std::to_string(i) + " already has " +
                      std::to_string(access.sets.size()) + " active qualified sets");
    }
    const SetIndex q = detail::next_set_index(next, i);
    next.bulletin.structure.at(i).sets[q] = members;
    detail::deal_set(next, {i, q}, rng);
  });
}

/// Retires set (i, q) and replaces secret i, redealing its remaining sets.
inline BulletinDelta deactivate_qualified_set(SchemeState& st, SecretIndex i, SetIndex q,
                                              std::optional<BigInt> replacement,
                                              RandomSource& rng) {
  return detail::transact(st, RenewalKind::deactivate_set, [&](SchemeState& next) {
    SecretAccess& access = detail::active_secret(next, i);
    if (!access.sets.contains(q)) {
      throw Error(Errc::unknown_set, "no active qualified set " + to_string(SetKey{i, q}));
    }
    if (access.sets.size() == 1) {
      throw Error(Errc::orphaned_secret, "set " + to_string(SetKey{i, q}) +
                                             " is the only qualified set of its secret");
    }
    detail::retract_set(next, {i, q});
    access.sets.erase(q);
    const BigInt value = replacement ? *replacement : random_replacement(next, i, rng);
    detail::reissue_secret(next, i, detail::replacement_element(next, i, value), rng);
  });
}

}  // namespace mssgas
