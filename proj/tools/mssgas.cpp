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

// mssgas: dealer, participant and combiner roles over a directory that
// plays the public bulletin board.
//
// Exit codes: 0 success, 1 verification false, 2 validation error,
// 3 not a member, 4 dishonest participant, 5 incomplete set,
// 6 capacity exceeded, 7 orphaned secret.

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mssgas/mssgas.hpp"

namespace fs = std::filesystem;
using namespace mssgas;

namespace {

enum ExitCode : int {
  kOk = 0,
  kVerifyFalse = 1,
  kValidation = 2,
  kMembership = 3,
  kDishonest = 4,
  kIncomplete = 5,
  kCapacity = 6,
  kOrphan = 7,
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::not_a_member: return kMembership;
    case Errc::verification_failed: return kDishonest;
    case Errc::incomplete_set: return kIncomplete;
    case Errc::capacity_exceeded: return kCapacity;
    case Errc::orphaned_secret: return kOrphan;
    default: return kValidation;
  }
}

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Write-then-rename so readers never observe a partial document.
void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw IoError("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void append_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out || !(out << text)) throw IoError("cannot append to " + path.string());
}

// Exclusive advisory lock on the dealer state for the duration of a renewal.
class StateLock {
 public:
  explicit StateLock(const fs::path& path) : fd_(::open(path.c_str(), O_RDWR)) {
    if (fd_ < 0) throw IoError("cannot open " + path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
      ::close(fd_);
      throw IoError("cannot lock " + path.string());
    }
  }
  ~StateLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  StateLock(const StateLock&) = delete;
  StateLock& operator=(const StateLock&) = delete;

 private:
  int fd_;
};

struct Board {
  fs::path dir;

  fs::path bulletin() const { return dir / "bulletin.json"; }
  fs::path journal() const { return dir / "journal.jsonl"; }
  fs::path share(ParticipantIndex j) const {
    return dir / "shares" / ("P" + std::to_string(j) + ".share");
  }
  fs::path default_state() const { return dir / "dealer.state"; }

  Bulletin load_bulletin() const { return io::parse_bulletin(read_file(bulletin())); }
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void warn_seeded() {
  std::cerr << "warning: --seed makes all randomness reproducible; "
               "for testing only, never for real secrets\n";
}

// Each renewal step under a seed draws from its own stream keyed by the
// version it produces.
RandomSource renewal_rng(const std::optional<std::uint64_t>& flag_seed, const SchemeState& st) {
  const std::optional<std::uint64_t> base = flag_seed ? flag_seed : st.seed;
  if (!base) return RandomSource::system();
  return RandomSource::seeded(splitmix64(*base ^ splitmix64(st.bulletin.version + 1)));
}

void write_share(const Board& board, const SchemeParameters& params, ParticipantIndex j,
                 const FieldElement& x) {
  io::ShareFile file{j, x.value(), io::scheme_identifier(params)};
  write_file(board.share(j), io::emit_canonical(io::to_json(file)));
}

std::vector<ParticipantIndex> parse_members(const std::string& text) {
  std::vector<ParticipantIndex> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const BigInt v = parse_integer(item);
    if (v < 1 || v > std::numeric_limits<ParticipantIndex>::max()) {
      throw Error(Errc::parse_error, "bad participant index '" + item + "'");
    }
    out.push_back(static_cast<ParticipantIndex>(v));
  }
  return out;
}

void print_delta(const BulletinDelta& d) {
  std::cout << renewal_name(d.kind) << ": bulletin version " << d.version << "\n";
  for (SecretIndex i : d.touched_secrets()) std::cout << "  touched secret " << i << "\n";
}

// ---------------------------------------------------------------------------

struct CommonOptions {
  std::string bulletin_dir;
  std::optional<std::uint64_t> seed;
};

int run_setup(const std::string& config_path, const CommonOptions& common,
              const std::string& state_path, const std::string& mode) {
  Board board{common.bulletin_dir};
  if (common.seed) warn_seeded();
  RandomSource rng = common.seed ? RandomSource::seeded(*common.seed) : RandomSource::system();
  DealerConfig cfg = io::config_from_json(io::parse_document(read_file(config_path)), rng);
  if (!mode.empty()) cfg.mode = parse_commit_mode(mode);
  SetupResult result = dealer_setup(cfg, rng);
  result.state.seed = common.seed;

  const Bulletin& b = result.state.bulletin;
  const fs::path state_file = state_path.empty() ? board.default_state() : fs::path(state_path);
  write_file(board.bulletin(), io::emit_bulletin(b));
  write_file(board.journal(), io::journal_line(setup_delta(b), b.params));
  write_file(state_file, io::emit_canonical(io::to_json(result.state)));
  for (const auto& [j, x] : result.shares) write_share(board, b.params, j, x);
  std::cout << "dealt " << result.state.secrets.size() << " secrets to " << result.shares.size()
            << " participants; scheme " << io::scheme_identifier(b.params) << "\n";
  return kOk;
}

int run_pseudo_share(const std::string& share_path, const CommonOptions& common, SecretIndex i,
                     SetIndex q) {
  Board board{common.bulletin_dir};
  const Bulletin b = board.load_bulletin();
  const io::ShareFile file = io::share_from_json(io::parse_document(read_file(share_path)));
  const std::string scheme = io::scheme_identifier(b.params);
  if (file.scheme != scheme) {
    throw Error(Errc::scheme_mismatch, "share file belongs to a different scheme");
  }
  const FieldElement x = b.params.prime.element(file.share);
  const PseudoShare ps = participant_pseudo_share(x, file.participant, i, q, b);
  std::cout << io::emit_canonical(io::to_json(ps, scheme));
  return kOk;
}

int run_reconstruct(const CommonOptions& common, SecretIndex i, SetIndex q,
                    const std::vector<std::string>& documents) {
  Board board{common.bulletin_dir};
  const Bulletin b = board.load_bulletin();
  std::map<ParticipantIndex, PseudoShare> shares;
  for (const std::string& path : documents) {
    PseudoShare ps = io::pseudo_share_from_json(io::parse_document(read_file(path)), b.params);
    if (!shares.emplace(ps.participant, ps).second) {
      throw Error(Errc::structure_invalid,
                  "two pseudo-shares from participant " + std::to_string(ps.participant));
    }
  }

  const auto verdicts = combiner_verify_set(i, q, shares, b);
  std::vector<ParticipantIndex> failed;
  for (const auto& [j, ok] : verdicts) {
    std::cout << "participant " << j << ": " << (ok ? "verified" : "REJECTED") << "\n";
    if (!ok) failed.push_back(j);
  }
  if (!failed.empty()) {
    std::cerr << "dishonest participants:";
    for (auto j : failed) std::cerr << " " << j;
    std::cerr << "\n";
    return kDishonest;
  }

  const FieldElement secret = combiner_reconstruct(i, q, shares, b, {.verify = false});
  const bool matches = participant_verify_secret(secret, i, b);
  std::cout << "secret commitment: " << (matches ? "matched" : "MISMATCH") << "\n";
  std::cout << secret.value().str() << "\n";
  return matches ? kOk : kVerifyFalse;
}

int run_verify_secret(const CommonOptions& common, SecretIndex i, const std::string& claimed) {
  Board board{common.bulletin_dir};
  const Bulletin b = board.load_bulletin();
  const BigInt value = parse_integer(claimed);
  if (!b.secret_active(i) || !b.secret_commitments.contains(i)) {
    throw Error(Errc::unknown_secret_index, "no active secret " + std::to_string(i));
  }
  const bool ok = b.params.prime.contains(value) &&
                  participant_verify_secret(b.params.prime.element(value), i, b);
  std::cout << (ok ? "valid" : "invalid") << "\n";
  return ok ? kOk : kVerifyFalse;
}

struct RenewOptions {
  std::string state_path;
  std::string secret;
  std::vector<std::string> sets;
  std::string members;
  std::string replacement;
  std::vector<std::string> replacements;
  bool random_replacements = false;
  std::string share;
  SecretIndex secret_index = 0;
  SetIndex set_index = 0;
  ParticipantIndex participant = 0;
};

int run_renew(const std::string& sub, const CommonOptions& common, const RenewOptions& opt) {
  Board board{common.bulletin_dir};
  const fs::path state_file =
      opt.state_path.empty() ? board.default_state() : fs::path(opt.state_path);
  StateLock lock(state_file);
  SchemeState st = io::state_from_json(io::parse_document(read_file(state_file)));
  if (common.seed) warn_seeded();
  RandomSource rng = renewal_rng(common.seed, st);
  auto optional_value = [](const std::string& s) -> std::optional<BigInt> {
    if (s.empty()) return std::nullopt;
    return parse_integer(s);
  };

  BulletinDelta delta;
  std::optional<AddParticipantResult> added;
  if (sub == "add-secret") {
    std::vector<QualifiedSet> sets;
    for (const std::string& s : opt.sets) sets.push_back(parse_members(s));
    delta = add_secret(st, parse_integer(opt.secret), sets, rng);
  } else if (sub == "deactivate-secret") {
    delta = deactivate_secret(st, opt.secret_index, optional_value(opt.replacement), rng);
  } else if (sub == "remove-secret") {
    delta = remove_secret(st, opt.secret_index);
  } else if (sub == "add-participant") {
    added = add_participant(st, optional_value(opt.share), rng);
    delta = added->delta;
  } else if (sub == "deactivate-participant") {
    std::map<SecretIndex, BigInt> replacements;
    for (const std::string& r : opt.replacements) {
      const auto eq = r.find('=');
      if (eq == std::string::npos) {
        throw Error(Errc::parse_error, "replacement must look like <secret>=<value>");
      }
      replacements[static_cast<SecretIndex>(parse_integer(r.substr(0, eq)))] =
          parse_integer(r.substr(eq + 1));
    }
    if (opt.random_replacements) {
      for (const auto& [i, access] : st.bulletin.structure) {
        if (access.active && !replacements.contains(i)) {
          replacements[i] = random_replacement(st, i, rng);
        }
      }
    }
    delta = deactivate_participant(st, opt.participant, replacements, rng);
  } else if (sub == "add-set") {
    delta = add_qualified_set(st, opt.secret_index, parse_members(opt.members), rng);
  } else if (sub == "deactivate-set") {
    delta = deactivate_qualified_set(st, opt.secret_index, opt.set_index,
                                     optional_value(opt.replacement), rng);
  } else {
    throw Error(Errc::parse_error, "unknown renew subcommand '" + sub + "'");
  }

  write_file(state_file, io::emit_canonical(io::to_json(st)));
  write_file(board.bulletin(), io::emit_bulletin(st.bulletin));
  append_file(board.journal(), io::journal_line(delta));
  if (added) {
    write_share(board, st.bulletin.params, added->index, added->share);
    std::cout << "participant " << added->index << " added\n";
  }
  print_delta(delta);
  return kOk;
}

int run_audit(const CommonOptions& common, const std::string& state_path) {
  Board board{common.bulletin_dir};
  const Bulletin b = board.load_bulletin();
  int rc = kOk;
  std::ifstream journal(board.journal());
  if (!journal) throw IoError("cannot read " + board.journal().string());
  if (io::replay_journal(journal) == b) {
    std::cout << "journal replay: matches bulletin version " << b.version << "\n";
  } else {
    std::cout << "journal replay: DIFFERS from bulletin\n";
    rc = kVerifyFalse;
  }
  const fs::path state_file = state_path.empty() ? board.default_state() : fs::path(state_path);
  if (fs::exists(state_file)) {
    const SchemeState st = io::state_from_json(io::parse_document(read_file(state_file)));
    if (!(st.bulletin == b)) {
      std::cout << "dealer state: bulletin differs from published bulletin\n";
      rc = kVerifyFalse;
    }
    const auto findings = audit_findings(st);
    for (const auto& f : findings) {
      std::cout << "audit: " << f.table << " " << to_string(f.key) << " " << f.problem << "\n";
    }
    if (findings.empty()) std::cout << "audit: bulletin is the publication of the dealer state\n";
    else rc = kVerifyFalse;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifiable multi-use multi-secret sharing for general access structures"};
  app.require_subcommand(1);

  CommonOptions common;
  if (const char* env = std::getenv("MSSGAS_BULLETIN")) common.bulletin_dir = env;
  auto add_board = [&](CLI::App* cmd) {
    cmd->add_option("--bulletin", common.bulletin_dir,
                    "Bulletin directory (default: $MSSGAS_BULLETIN)");
  };
  auto add_seed = [&](CLI::App* cmd) {
    cmd->add_option("--seed", common.seed,
                    "INSECURE: deterministic randomness for tests and demos");
  };

  std::string config_path, state_path, mode;
  auto* setup = app.add_subcommand("setup", "Dealer: deal shares and publish the bulletin");
  setup->add_option("--config", config_path, "Dealer configuration (JSON)")->required();
  setup->add_option("--state", state_path, "Dealer state file (default: <bulletin>/dealer.state)");
  setup->add_option("--mode", mode, "Commitment mode")->check(CLI::IsMember({"hash", "dlog"}));
  add_board(setup);
  add_seed(setup);

  std::string share_path;
  SecretIndex secret_index = 0;
  SetIndex set_index = 0;
  auto* pseudo = app.add_subcommand("pseudo-share", "Participant: derive a pseudo-share");
  pseudo->add_option("--share", share_path, "Share file")->required();
  pseudo->add_option("--secret-index", secret_index)->required();
  pseudo->add_option("--set-index", set_index)->required();
  add_board(pseudo);

  std::vector<std::string> documents;
  auto* reconstruct =
      app.add_subcommand("reconstruct", "Combiner: verify pseudo-shares and reconstruct");
  reconstruct->add_option("--secret-index", secret_index)->required();
  reconstruct->add_option("--set-index", set_index)->required();
  reconstruct->add_option("documents", documents, "Pseudo-share documents")->required();
  add_board(reconstruct);

  std::string claimed;
  auto* verify = app.add_subcommand("verify-secret", "Participant: check a revealed secret");
  verify->add_option("--secret-index", secret_index)->required();
  verify->add_option("--secret", claimed, "Claimed secret (decimal or 0x-hex)")->required();
  add_board(verify);

  auto* audit = app.add_subcommand("audit", "Dealer: check bulletin, journal and state agree");
  audit->add_option("--state", state_path);
  add_board(audit);

  RenewOptions renew_opt;
  auto* renew = app.add_subcommand("renew", "Dealer: modify the access structure");
  renew->require_subcommand(1);
  // Board, seed and state options may also follow the operation name.
  renew->fallthrough();
  renew->add_option("--state", renew_opt.state_path,
                    "Dealer state file (default: <bulletin>/dealer.state)");
  add_board(renew);
  add_seed(renew);
  auto* r_add_secret = renew->add_subcommand("add-secret", "Add a secret");
  r_add_secret->add_option("--secret", renew_opt.secret)->required();
  r_add_secret->add_option("--set", renew_opt.sets, "Members, comma separated (repeatable)")
      ->required();
  auto* r_deact_secret = renew->add_subcommand("deactivate-secret", "Replace a secret");
  r_deact_secret->add_option("--secret-index", renew_opt.secret_index)->required();
  r_deact_secret->add_option("--replacement", renew_opt.replacement, "Default: random");
  auto* r_remove_secret = renew->add_subcommand("remove-secret", "Delete a secret");
  r_remove_secret->add_option("--secret-index", renew_opt.secret_index)->required();
  auto* r_add_part = renew->add_subcommand("add-participant", "Register a participant");
  r_add_part->add_option("--share", renew_opt.share, "Participant-chosen share");
  auto* r_deact_part = renew->add_subcommand("deactivate-participant", "Retire a participant");
  r_deact_part->add_option("--participant", renew_opt.participant)->required();
  r_deact_part->add_option("--replacement", renew_opt.replacements,
                           "<secret>=<value> (repeatable)");
  r_deact_part->add_flag("--random-replacements", renew_opt.random_replacements,
                         "Draw missing replacements at random");
  auto* r_add_set = renew->add_subcommand("add-set", "Add a qualified set");
  r_add_set->add_option("--secret-index", renew_opt.secret_index)->required();
  r_add_set->add_option("--members", renew_opt.members, "Comma separated")->required();
  auto* r_deact_set = renew->add_subcommand("deactivate-set", "Retire a qualified set");
  r_deact_set->add_option("--secret-index", renew_opt.secret_index)->required();
  r_deact_set->add_option("--set-index", renew_opt.set_index)->required();
  r_deact_set->add_option("--replacement", renew_opt.replacement, "Default: random");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }

  try {
    if (common.bulletin_dir.empty()) {
      throw Error(Errc::parse_error, "no bulletin directory (use --bulletin or MSSGAS_BULLETIN)");
    }
    if (*setup) return run_setup(config_path, common, state_path, mode);
    if (*pseudo) return run_pseudo_share(share_path, common, secret_index, set_index);
    if (*reconstruct) return run_reconstruct(common, secret_index, set_index, documents);
    if (*verify) return run_verify_secret(common, secret_index, claimed);
    if (*audit) return run_audit(common, state_path);
    if (*renew) {
      for (CLI::App* sub : renew->get_subcommands()) {
        if (*sub) return run_renew(sub->get_name(), common, renew_opt);
      }
    }
  } catch (const MemberError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kValidation;
}
