#pragma once

#include "cdag/digest.hpp"

#include <cstdint>
#include <utility>

namespace cdag {

/// Proof-of-Win: the certificate a validator issues for one match.
///
/// `players` is stored in ascending id order and `prev_powin_hashes[i]` is the
/// previous-round certificate of `players[i]` (zero digest in round 1).
/// `auth_tag` is a digest over every other field; any edit breaks it.
struct PoWin {
    Digest match_id;
    std::uint64_t tournament_no = 0;
    std::uint32_t round = 0;
    std::pair<NodeId, NodeId> players{0, 0};
    NodeId winner = 0;
    NodeId validator = 0;
    std::pair<Digest, Digest> prev_powin_hashes;
    Digest auth_tag;

    Digest compute_auth_tag() const;
    void seal() { auth_tag = compute_auth_tag(); }

    /// Tag matches, winner is a player, players are ordered and distinct,
    /// and the match id is the one derived from (tournament, round, players).
    bool structurally_valid() const;

    bool involves(NodeId n) const { return players.first == n || players.second == n; }
    NodeId opponent_of(NodeId n) const { return players.first == n ? players.second : players.first; }
    const Digest& prev_hash_of(NodeId n) const {
        return players.first == n ? prev_powin_hashes.first : prev_powin_hashes.second;
    }

    bool operator==(const PoWin&) const = default;
};

Digest make_match_id(std::uint64_t tournament_no, std::uint32_t round, NodeId a, NodeId b);

}  // namespace cdag
