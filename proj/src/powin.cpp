#include "cdag/powin.hpp"

#include <algorithm>

namespace cdag {

Digest make_match_id(std::uint64_t tournament_no, std::uint32_t round, NodeId a, NodeId b) {
    return Hasher()
        .add("match")
        .add(tournament_no)
        .add(round)
        .add(std::min(a, b))
        .add(std::max(a, b))
        .finish();
}

Digest PoWin::compute_auth_tag() const {
    return Hasher()
        .add("powin")
        .add(match_id)
        .add(tournament_no)
        .add(round)
        .add(players.first)
        .add(players.second)
        .add(winner)
        .add(validator)
        .add(prev_powin_hashes.first)
        .add(prev_powin_hashes.second)
        .finish();
}

bool PoWin::structurally_valid() const {
    if (round < 1) return false;
    if (players.first >= players.second) return false;
    if (!involves(winner)) return false;
    if (match_id != make_match_id(tournament_no, round, players.first, players.second)) return false;
    return auth_tag == compute_auth_tag();
}

}  // namespace cdag
