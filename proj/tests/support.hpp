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

// Shared helpers for the unit and acceptance suites: random scheme
// generation and honest protocol runs.

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "mssgas/renew.hpp"
#include "mssgas/scheme.hpp"

namespace mssgas::testing {

/// The error code raised by `f`, or nothing if it returns normally.
template <typename F>
std::optional<Errc> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

struct SchemeShape {
  ParticipantIndex max_participants = 8;
  std::size_t max_secrets = 4;
  std::size_t max_sets = 3;
};

inline QualifiedSet random_subset(RandomSource& rng, const std::vector<ParticipantIndex>& pool) {
  std::vector<ParticipantIndex> members = pool;
  std::shuffle(members.begin(), members.end(), rng);
  const auto size = static_cast<std::size_t>(rng.uniform(2, members.size()));
  members.resize(size);
  return members;
}

/// Distinct qualified sets drawn from `pool`.
inline std::vector<QualifiedSet> random_sets(RandomSource& rng,
                                             const std::vector<ParticipantIndex>& pool,
                                             std::size_t count) {
  if (pool.size() < 16) count = std::min(count, (std::size_t{1} << pool.size()) - (pool.size() + 1));
  std::vector<QualifiedSet> sets;
  std::set<QualifiedSet> seen;
  while (sets.size() < count) {
    QualifiedSet s = random_subset(rng, pool);
    QualifiedSet sorted = s;
    std::sort(sorted.begin(), sorted.end());
    if (seen.insert(sorted).second) sets.push_back(std::move(s));
  }
  return sets;
}

inline DealerConfig random_config(RandomSource& rng, const Prime& p, const SchemeShape& shape = {}) {
  DealerConfig cfg{p};
  cfg.participants = static_cast<ParticipantIndex>(rng.uniform(2, shape.max_participants));
  std::vector<ParticipantIndex> pool(cfg.participants);
  std::iota(pool.begin(), pool.end(), 1);
  const std::size_t subsets = (std::size_t{1} << cfg.participants) - (cfg.participants + 1);
  const auto k = rng.uniform(1, shape.max_secrets);
  for (std::uint64_t i = 0; i < k; ++i) {
    cfg.secrets.push_back(p.random(rng).value());
    const auto l = rng.uniform(1, std::min(shape.max_sets, subsets));
    cfg.structure.push_back(random_sets(rng, pool, l));
  }
  return cfg;
}

inline std::map<ParticipantIndex, PseudoShare> honest_pseudo_shares(const SchemeState& st,
                                                                    SetKey key) {
  std::map<ParticipantIndex, PseudoShare> out;
  for (ParticipantIndex j : st.bulletin.qualified_set(key)) {
    out[j] = participant_pseudo_share(st.shares.at(j), j, key.secret, key.set, st.bulletin);
  }
  return out;
}

inline FieldElement honest_reconstruct(const SchemeState& st, SetKey key) {
  return combiner_reconstruct(key.secret, key.set, honest_pseudo_shares(st, key), st.bulletin);
}

inline std::vector<SetKey> active_sets(const Bulletin& b) {
  std::vector<SetKey> out;
  for (const auto& [i, access] : b.structure) {
    if (!access.active) continue;
    for (const auto& [q, set] : access.sets) out.push_back({i, q});
  }
  return out;
}

/// Applies one randomly chosen renewal. Returns the delta, or nothing when
/// the drawn operation was rejected (the state is then unchanged).
inline std::optional<BulletinDelta> random_renewal(SchemeState& st, RandomSource& rng) {
  const Bulletin& b = st.bulletin;
  std::vector<ParticipantIndex> pool;
  for (const auto& [j, rec] : b.participants) {
    if (rec.active) pool.push_back(j);
  }
  std::vector<SecretIndex> live;
  for (const auto& [i, access] : b.structure) {
    if (access.active) live.push_back(i);
  }
  auto pick = [&](const auto& v) { return v[rng.uniform(0, v.size() - 1)]; };
  try {
    switch (rng.uniform(0, 6)) {
      case 0:
        if (pool.size() < 2) return std::nullopt;
        return add_secret(st, b.params.prime.random(rng).value(),
                          random_sets(rng, pool, rng.uniform(1, 2)), rng);
      case 1:
        if (live.empty()) return std::nullopt;
        return deactivate_secret(st, pick(live), std::nullopt, rng);
      case 2:
        if (live.size() < 2) return std::nullopt;
        return remove_secret(st, pick(live));
      case 3:
        return add_participant(st, std::nullopt, rng).delta;
      case 4: {
        if (pool.size() < 3) return std::nullopt;
        std::map<SecretIndex, BigInt> repl;
        for (SecretIndex i : live) repl[i] = random_replacement(st, i, rng);
        return deactivate_participant(st, pick(pool), repl, rng);
      }
      case 5:
        if (live.empty() || pool.size() < 2) return std::nullopt;
        return add_qualified_set(st, pick(live), random_subset(rng, pool), rng);
      default: {
        if (live.empty()) return std::nullopt;
        const SecretIndex i = pick(live);
        std::vector<SetIndex> qs;
        for (const auto& [q, set] : b.structure.at(i).sets) qs.push_back(q);
        return deactivate_qualified_set(st, i, pick(qs), std::nullopt, rng);
      }
    }
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::capacity_exceeded:
      case Errc::orphaned_secret:
      case Errc::duplicate_set:
      case Errc::structure_invalid:
      case Errc::field_exhausted:
        return std::nullopt;
      default:
        throw;
    }
  }
}

}  // namespace mssgas::testing
