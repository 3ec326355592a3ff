#include "cdag/colosseum.hpp"

#include "cdag/errors.hpp"

#include <algorithm>

namespace cdag {

const char* to_string(PlayerStatus s) {
    switch (s) {
        case PlayerStatus::Idle: return "Idle";
        case PlayerStatus::Seeking: return "Seeking";
        case PlayerStatus::AwaitingValidator: return "AwaitingValidator";
        case PlayerStatus::Qualified: return "Qualified";
        case PlayerStatus::Eliminated: return "Eliminated";
    }
    return "?";
}

bool TournamentState::qualified(std::uint32_t alpha) const {
    if (my_powins.size() < alpha) return false;
    for (std::uint32_t r = 1; r <= alpha; ++r) {
        const auto& p = my_powins[r - 1];
        if (p.round != r || p.tournament_no != tournament_no) return false;
        if (r > 1 && p.prev_hash_of(p.winner) != my_powins[r - 2].auth_tag) return false;
    }
    return true;
}

Digest make_game_proposal(const Digest& match_id, NodeId node, const std::optional<BarrierCertificate>& cert) {
    if (!cert) throw Error(ErrorCode::NotInSlot, "no barrier certificate for this slot");
    return Hasher().add("proposal").add(match_id).add(node).add(cert->cert_hash).finish();
}

bool verify_proposal(const GameProposal& p, const Digest& match_id) {
    return p.value == Hasher().add("proposal").add(match_id).add(p.player).add(p.cert_hash).finish();
}

NodeId validator_for(const Digest& match_id, const Ring& ring) {
    return ring.lookup(Hasher().add(match_id).add("validator").finish());
}

std::optional<PoWin> adjudicate(NodeId validator, const MatchSpec& match, const GameProposal& a,
                                const GameProposal& b) {
    auto [p0, p1] = match.players;
    if (p0 == p1) return std::nullopt;
    const auto match_id = make_match_id(match.tournament_no, match.round, p0, p1);
    const bool aligned = a.player == p0 && b.player == p1;
    const bool swapped = a.player == p1 && b.player == p0;
    if (!aligned && !swapped) return std::nullopt;
    if (!verify_proposal(a, match_id) || !verify_proposal(b, match_id)) return std::nullopt;

    PoWin w;
    w.match_id = match_id;
    w.tournament_no = match.tournament_no;
    w.round = match.round;
    w.validator = validator;
    if (p0 < p1) {
        w.players = {p0, p1};
        w.prev_powin_hashes = match.prev_powin_hashes;
    } else {
        w.players = {p1, p0};
        w.prev_powin_hashes = {match.prev_powin_hashes.second, match.prev_powin_hashes.first};
    }
    if (a.value != b.value) {
        w.winner = a.value > b.value ? a.player : b.player;
    } else {
        w.winner = std::min(a.player, b.player);
    }
    w.seal();
    return w;
}

std::vector<NodeId> keepers_for(NodeId player, std::uint64_t tournament_no, std::size_t k, const Ring& ring) {
    if (k + 1 > ring.size()) throw Error(ErrorCode::InvalidParameter, "keeper count must be at most N-1");
    std::vector<NodeId> out;
    out.reserve(k);
    for (std::uint64_t i = 0; out.size() < k; ++i) {
        auto key = Hasher().add("keeper").add(player).add(tournament_no).add(i).finish();
        auto node = ring.lookup(key);
        // Walk clockwise past the player and nodes already chosen so the
        // sequence always terminates, even when k = N-1.
        while (node == player || std::find(out.begin(), out.end(), node) != out.end()) node = ring.successor(node);
        out.push_back(node);
    }
    return out;
}

bool is_dual_powin_evidence(NodeId subject, const PoWin& a, const PoWin& b) {
    if (!a.structurally_valid() || !b.structurally_valid()) return false;
    if (a.match_id == b.match_id) return false;
    if (!a.involves(subject) || !b.involves(subject)) return false;
    if (a.tournament_no != b.tournament_no || a.round != b.round) return false;
    return !(a.winner == subject && b.winner == subject);
}

const PoWin* KeeperRecord::find(const Digest& auth_tag) const {
    for (const auto& [round, list] : stored_powins) {
        for (const auto& p : list) {
            if (p.auth_tag == auth_tag) return &p;
        }
    }
    return nullptr;
}

VerifyResult keeper_verify(const PoWin& powin, KeeperRecord& record, bool final_check) {
    const NodeId s = record.subject;
    if (!powin.structurally_valid() || !powin.involves(s) || powin.tournament_no != record.tournament_no) {
        return {Vote::Negative, std::nullopt};
    }
    auto& same_round = record.stored_powins[powin.round];
    for (const auto& other : same_round) {
        if (other.auth_tag == powin.auth_tag) return {Vote::Positive, std::nullopt};
    }
    for (const auto& other : same_round) {
        if (is_dual_powin_evidence(s, other, powin)) {
            auto evidence = std::make_pair(other, powin);
            same_round.push_back(powin);
            return {Vote::Negative, std::move(evidence)};
        }
    }
    if (powin.round > 1) {
        const auto* prev = record.find(powin.prev_hash_of(s));
        if (prev) {
            if (prev->round + 1 != powin.round || prev->winner != s) return {Vote::Negative, std::nullopt};
        } else {
            auto it = record.stored_powins.find(powin.round - 1);
            bool lost_before = false;
            if (it != record.stored_powins.end()) {
                for (const auto& p : it->second) lost_before |= p.winner != s;
            }
            if (lost_before) return {Vote::Negative, std::nullopt};
            if (!final_check) return {Vote::Pending, std::nullopt};
            return {Vote::Negative, std::nullopt};
        }
    }
    same_round.push_back(powin);
    return {Vote::Positive, std::nullopt};
}

Digest KeeperVoteRecord::compute_tag(NodeId voter, NodeId subject, std::uint64_t t, const Digest& match_id) {
    return Hasher().add("vote").add(voter).add(subject).add(t).add(match_id).finish();
}

Digest FoulNotice::id() const {
    return Hasher().add("foul").add(subject).add(tournament_no).add(match_id).finish();
}

bool exceeds_two_thirds(std::uint64_t negatives, std::uint64_t total) {
    return total > 0 && 3 * negatives > 2 * total;
}

std::optional<FoulNotice> tally_fouls(const Digest& match_id, NodeId subject, std::uint64_t tournament_no,
                                      const std::vector<KeeperVoteRecord>& votes, std::uint32_t total_keepers,
                                      std::optional<std::pair<PoWin, PoWin>> evidence) {
    std::vector<KeeperVoteRecord> distinct;
    std::set<NodeId> voters;
    for (const auto& v : votes) {
        if (v.match_id == match_id && v.subject == subject && voters.insert(v.voter).second) distinct.push_back(v);
    }
    const bool has_evidence = evidence && is_dual_powin_evidence(subject, evidence->first, evidence->second);
    if (!has_evidence && !exceeds_two_thirds(distinct.size(), total_keepers)) return std::nullopt;
    FoulNotice n;
    n.match_id = match_id;
    n.subject = subject;
    n.tournament_no = tournament_no;
    n.negative_votes = static_cast<std::uint32_t>(distinct.size());
    n.total_keepers = total_keepers;
    n.votes = std::move(distinct);
    if (has_evidence) n.evidence = std::move(evidence);
    return n;
}

bool verify_foul_notice(const FoulNotice& notice, const Ring& ring, std::size_t k) {
    if (notice.evidence) {
        const auto& [a, b] = *notice.evidence;
        return a.tournament_no == notice.tournament_no && (a.match_id == notice.match_id || b.match_id == notice.match_id) &&
               is_dual_powin_evidence(notice.subject, a, b);
    }
    if (notice.total_keepers != k) return false;
    const auto keepers = keepers_for(notice.subject, notice.tournament_no, k, ring);
    std::set<NodeId> counted;
    for (const auto& v : notice.votes) {
        if (!v.authentic() || v.subject != notice.subject || v.tournament_no != notice.tournament_no ||
            v.match_id != notice.match_id) {
            continue;
        }
        if (std::find(keepers.begin(), keepers.end(), v.voter) == keepers.end()) continue;
        counted.insert(v.voter);
    }
    return exceeds_two_thirds(counted.size(), k);
}

TimeoutAction handle_validator_timeout(MatchOutcome original, std::optional<MatchOutcome> replacement) {
    if (!replacement) {
        switch (original) {
            case MatchOutcome::Won: return TimeoutAction::Proceed;
            case MatchOutcome::Lost: return TimeoutAction::Stop;
            case MatchOutcome::Unknown: return TimeoutAction::Repair;
        }
    }
    if (original == MatchOutcome::Lost || *replacement == MatchOutcome::Lost) return TimeoutAction::Stop;
    if (*replacement == MatchOutcome::Unknown) return TimeoutAction::Wait;
    return TimeoutAction::Proceed;
}

}  // namespace cdag
