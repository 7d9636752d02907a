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
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mssgas {

enum class Errc {
  not_prime,
  too_small,
  value_out_of_range,
  degree_too_small,
  duplicate_abscissa,
  insufficient_points,
  index_overflow,
  unknown_hash_algorithm,
  hash_too_short,
  missing_generator,
  generator_unavailable,
  secret_out_of_range,
  structure_invalid,
  capacity_exceeded,
  not_a_member,
  unknown_triple,
  unknown_set,
  unknown_secret_index,
  unknown_participant,
  incomplete_set,
  verification_failed,
  duplicate_share,
  duplicate_id,
  duplicate_set,
  field_exhausted,
  orphaned_secret,
  missing_replacement,
  scheme_mismatch,
  parse_error,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::not_prime: return "NotPrime";
    case Errc::too_small: return "TooSmall";
    case Errc::value_out_of_range: return "ValueOutOfRange";
    case Errc::degree_too_small: return "DegreeTooSmall";
    case Errc::duplicate_abscissa: return "DuplicateAbscissa";
    case Errc::insufficient_points: return "InsufficientPoints";
    case Errc::index_overflow: return "IndexOverflow";
    case Errc::unknown_hash_algorithm: return "UnknownHashAlgorithm";
    case Errc::hash_too_short: return "HashTooShort";
    case Errc::missing_generator: return "MissingGenerator";
    case Errc::generator_unavailable: return "GeneratorUnavailable";
    case Errc::secret_out_of_range: return "SecretOutOfRange";
    case Errc::structure_invalid: return "StructureInvalid";
    case Errc::capacity_exceeded: return "CapacityExceeded";
    case Errc::not_a_member: return "NotAMember";
    case Errc::unknown_triple: return "UnknownTriple";
    case Errc::unknown_set: return "UnknownSet";
    case Errc::unknown_secret_index: return "UnknownSecretIndex";
    case Errc::unknown_participant: return "UnknownParticipant";
    case Errc::incomplete_set: return "IncompleteSet";
    case Errc::verification_failed: return "VerificationFailed";
    case Errc::duplicate_share: return "DuplicateShare";
    case Errc::duplicate_id: return "DuplicateId";
    case Errc::duplicate_set: return "DuplicateSet";
    case Errc::field_exhausted: return "FieldExhausted";
    case Errc::orphaned_secret: return "OrphanedSecret";
    case Errc::missing_replacement: return "MissingReplacement";
    case Errc::scheme_mismatch: return "SchemeMismatch";
    case Errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the Errc codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Raised when one or more members of a qualified set are missing
/// (incomplete_set) or fail their commitment check (verification_failed).
/// participants() names the offending indices.
class MemberError : public Error {
 public:
  MemberError(Errc code, const std::string& message,
              std::vector<std::uint32_t> participants)
      : Error(code, message), participants_(std::move(participants)) {}

  const std::vector<std::uint32_t>& participants() const noexcept {
    return participants_;
  }

 private:
  std::vector<std::uint32_t> participants_;
};

}  // namespace mssgas
