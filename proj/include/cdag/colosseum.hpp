#pragma once

#include "cdag/barrier.hpp"
#include "cdag/powin.hpp"
#include "cdag/ring.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace cdag {

enum class PlayerStatus { Idle, Seeking, AwaitingValidator, Qualified, Eliminated };
const char* to_string(PlayerStatus s);

struct TournamentState {
    std::uint64_t tournament_no = 0;
    std::uint32_t current_round = 1;
    std::vector<PoWin> my_powins;  // won certificates, in round order
    PlayerStatus status = PlayerStatus::Idle;

    /// Holds consecutive wins for rounds 1..alpha.
    bool qualified(std::uint32_t alpha) const;
};

/// digest(match_id ‖ node ‖ barrier certificate hash). Throws NotInSlot
/// without a certificate.
Digest make_game_proposal(const Digest& match_id, NodeId node, const std::optional<BarrierCertificate>& cert);

struct GameProposal {
    NodeId player = 0;
    Digest value;
    Digest cert_hash;
};

bool verify_proposal(const GameProposal& p, const Digest& match_id);

/// Ring successor of digest(match_id ‖ "validator").
NodeId validator_for(const Digest& match_id, const Ring& ring);

/// Everything the validator needs to issue a certificate.
struct MatchSpec {
    std::uint64_t tournament_no = 0;
    std::uint32_t round = 1;
    std::pair<NodeId, NodeId> players;           // any order
    std::pair<Digest, Digest> prev_powin_hashes;  // aligned with `players`
};

/// Larger proposal digest wins; equal digests go to the smaller id. Returns
/// nothing (void match) when a proposal fails verification or does not
/// belong to the match.
std::optional<PoWin> adjudicate(NodeId validator, const MatchSpec& match, const GameProposal& a,
                                const GameProposal& b);

/// K distinct keepers: ring successors of digest(player ‖ tournament ‖ i)
/// for i = 0, 1, ... skipping the player and repeats. Requires k ≤ N−1.
std::vector<NodeId> keepers_for(NodeId player, std::uint64_t tournament_no, std::size_t k, const Ring& ring);

/// Two distinct certificates for the same (player, tournament, round) that
/// the player did not win both of. Winning both is the honest outcome of a
/// validator timeout followed by a re-pair.
bool is_dual_powin_evidence(NodeId subject, const PoWin& a, const PoWin& b);

struct KeeperRecord {
    NodeId subject = 0;
    std::uint64_t tournament_no = 0;
    std::map<std::uint32_t, std::vector<PoWin>> stored_powins;  // round -> certificates seen
    std::vector<std::pair<Digest, bool>> votes_cast;             // (match id, negative)

    const PoWin* find(const Digest& auth_tag) const;
};

enum class Vote { Positive, Negative, Pending };

struct VerifyResult {
    Vote vote = Vote::Positive;
    std::optional<std::pair<PoWin, PoWin>> evidence;
};

/// Checks a certificate involving `record.subject` against what the keeper
/// has stored. Negative on a multi-play pair or when the previous-round
/// certificate shows a loss. A missing previous-round certificate is Pending
/// until `final_check`, then Negative. Positive results are stored.
VerifyResult keeper_verify(const PoWin& powin, KeeperRecord& record, bool final_check);

struct KeeperVoteRecord {
    NodeId voter = 0;
    NodeId subject = 0;
    std::uint64_t tournament_no = 0;
    Digest match_id;
    Digest tag;

    static Digest compute_tag(NodeId voter, NodeId subject, std::uint64_t t, const Digest& match_id);
    void seal() { tag = compute_tag(voter, subject, tournament_no, match_id); }
    bool authentic() const { return tag == compute_tag(voter, subject, tournament_no, match_id); }
};

struct FoulNotice {
    Digest match_id;
    NodeId subject = 0;
    std::uint64_t tournament_no = 0;
    std::uint32_t negative_votes = 0;
    std::uint32_t total_keepers = 0;
    std::vector<KeeperVoteRecord> votes;
    std::optional<std::pair<PoWin, PoWin>> evidence;

    /// Identifies the condemned match for duplicate suppression.
    Digest id() const;
};

/// negatives / total > 2/3, compared exactly.
bool exceeds_two_thirds(std::uint64_t negatives, std::uint64_t total);

/// A notice when the tally condemns the match or when dual-PoWin evidence is
/// supplied; nothing otherwise.
std::optional<FoulNotice> tally_fouls(const Digest& match_id, NodeId subject, std::uint64_t tournament_no,
                                      const std::vector<KeeperVoteRecord>& votes, std::uint32_t total_keepers,
                                      std::optional<std::pair<PoWin, PoWin>> evidence = std::nullopt);

/// Receiver-side check: valid dual-PoWin evidence, or more than two thirds
/// of the subject's keepers with distinct authentic votes.
bool verify_foul_notice(const FoulNotice& notice, const Ring& ring, std::size_t k);

/// Outcome of a match seen by one of its players.
enum class MatchOutcome { Unknown, Won, Lost };

enum class TimeoutAction { Proceed, Stop, Wait, Repair };

/// Decision for a player whose validator timed out. `original` is the first
/// match's result as known now (a late arrival may turn Unknown into Won or
/// Lost). Before any re-pair `replacement` is empty: a known result is
/// adopted, otherwise the player re-pairs. After a re-pair the player
/// proceeds only if no known result is a loss and the replacement was won.
TimeoutAction handle_validator_timeout(MatchOutcome original, std::optional<MatchOutcome> replacement);

// Byzantine behaviour masks.
enum class ValidatorMode : std::uint8_t {
    Honest = 0,
    Silent = 1,       // never replies
    PlayersOnly = 2,  // result to players, not keepers
    KeepersOnly = 3,  // result to keepers, not players
    OnePlayer = 4,    // result to one player only
    Delayed = 5,      // reply after the players' timeout
};

enum class KeeperMode : std::uint8_t {
    Honest = 0,
    NoVerify = 1,    // ignores certificates
    NoStore = 2,     // verifies but keeps nothing
    FalseAlert = 3,  // emits alerts without evidence
    VoteAgainst = 4, // negative votes on every match
};

struct AdversaryProfile {
    ValidatorMode validator = ValidatorMode::Honest;
    KeeperMode keeper = KeeperMode::Honest;
    bool multi_play = false;
    bool bypass_barrier = false;

    bool honest() const {
        return validator == ValidatorMode::Honest && keeper == KeeperMode::Honest && !multi_play && !bypass_barrier;
    }
};

}  // namespace cdag
