#include "cdag/colosseum.hpp"
#include "cdag/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

using namespace cdag;

namespace {

BarrierCertificate cert_for(NodeId n, std::uint64_t t) {
    OracleState o;
    o.genesis_hash = Digest::from_uint(99);
    auto c = resync(n, o, 0.0);
    while (c.tournament_no < t) c = wait_certificate(n, c, o.tau, 0);
    return c;
}

GameProposal propose(const Digest& match_id, NodeId n, std::uint64_t t) {
    auto cert = cert_for(n, t);
    return GameProposal{n, make_game_proposal(match_id, n, cert), cert.cert_hash};
}

/// Plays one match honestly and returns the certificate.
PoWin play(std::uint64_t t, std::uint32_t round, NodeId a, NodeId b, Digest prev_a = {}, Digest prev_b = {},
           NodeId validator = 0) {
    auto id = make_match_id(t, round, a, b);
    MatchSpec spec{t, round, {a, b}, {prev_a, prev_b}};
    auto w = adjudicate(validator, spec, propose(id, a, t), propose(id, b, t));
    REQUIRE(w.has_value());
    return *w;
}

/// A round-1 match `subject` wins or loses, found by varying the opponent.
PoWin round1_with(NodeId subject, bool win, std::uint64_t t, NodeId skip = ~NodeId{0}) {
    for (NodeId opp = 100;; ++opp) {
        if (opp == skip) continue;
        auto w = play(t, 1, subject, opp);
        if ((w.winner == subject) == win) return w;
    }
}

}  // namespace

TEST_CASE("make_game_proposal") {
    auto id = make_match_id(3, 1, 4, 9);
    auto c4 = cert_for(4, 3);
    CHECK(make_game_proposal(id, 4, c4) == make_game_proposal(id, 4, c4));
    CHECK(make_game_proposal(id, 4, c4) != make_game_proposal(id, 9, c4));
    CHECK_THROWS_AS(make_game_proposal(id, 4, std::nullopt), Error);
    try {
        make_game_proposal(id, 4, std::nullopt);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInSlot);
    }
    // A different slot certificate changes the proposal.
    CHECK(make_game_proposal(id, 4, cert_for(4, 4)) != make_game_proposal(id, 4, c4));
}

TEST_CASE("adjudicate") {
    auto id = make_match_id(2, 1, 5, 8);
    auto a = propose(id, 5, 2);
    auto b = propose(id, 8, 2);
    MatchSpec spec{2, 1, {8, 5}, {Digest{}, Digest{}}};
    auto w = adjudicate(17, spec, b, a);
    REQUIRE(w);
    CHECK(w->winner == (a.value > b.value ? 5u : 8u));
    CHECK(w->players == std::pair<NodeId, NodeId>{5, 8});
    CHECK(w->validator == 17);
    CHECK(w->structurally_valid());

    SUBCASE("replay yields identical bits") {
        auto again = adjudicate(17, spec, a, b);
        REQUIRE(again);
        CHECK(*again == *w);
    }
    SUBCASE("malformed proposal voids the match") {
        auto bad = a;
        bad.value = Digest::from_uint(0x0B);
        CHECK_FALSE(adjudicate(17, spec, bad, b).has_value());
        auto stranger = propose(id, 6, 2);
        CHECK_FALSE(adjudicate(17, spec, stranger, b).has_value());
    }
    SUBCASE("larger digest wins: checked against a direct comparison") {
        for (NodeId x = 0; x < 50; ++x) {
            auto mid = make_match_id(7, 2, x, x + 50);
            auto px = propose(mid, x, 7), py = propose(mid, x + 50, 7);
            auto r = adjudicate(1, MatchSpec{7, 2, {x, x + 50}, {}}, px, py);
            REQUIRE(r);
            bool x_bigger = std::lexicographical_compare(py.value.bytes().begin(), py.value.bytes().end(),
                                                         px.value.bytes().begin(), px.value.bytes().end());
            CHECK(r->winner == (x_bigger ? x : x + 50));
        }
    }
    SUBCASE("prev hashes follow the player order") {
        auto s2 = MatchSpec{2, 2, {8, 5}, {Digest::from_uint(8), Digest::from_uint(5)}};
        auto id2 = make_match_id(2, 2, 5, 8);
        auto r = adjudicate(3, s2, propose(id2, 5, 2), propose(id2, 8, 2));
        REQUIRE(r);
        CHECK(r->prev_hash_of(5) == Digest::from_uint(5));
        CHECK(r->prev_hash_of(8) == Digest::from_uint(8));
    }
}

TEST_CASE("game fairness over 10^4 matches") {
    int lower_id_wins = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        NodeId a = static_cast<NodeId>(2 * i), b = a + 1;
        auto w = play(1 + i / 500, 1, a, b);
        lower_id_wins += w.winner == a;
    }
    const double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(lower_id_wins - n / 2.0) <= 5 * sigma);
}

TEST_CASE("validator_for") {
    auto ring = Ring::from_seed(32, 6);
    auto id = make_match_id(1, 1, 2, 3);
    CHECK(validator_for(id, ring) == validator_for(id, ring));
    CHECK(validator_for(make_match_id(1, 1, 3, 2), ring) == validator_for(id, ring));

    // Frequencies follow each node's arc of the ring.
    std::vector<double> arc(32);
    const auto& cw = ring.clockwise();
    for (std::size_t i = 0; i < cw.size(); ++i) {
        auto here = ring.position(cw[i]);
        auto before = ring.position(cw[(i + cw.size() - 1) % cw.size()]);
        arc[cw[i]] = static_cast<double>(here - before) / 18446744073709551616.0;  // wraps mod 2^64
    }
    std::vector<int> counts(32, 0);
    const int matches = 10000;
    for (int m = 0; m < matches; ++m) counts[validator_for(make_match_id(m, 1, 0, 1), ring)]++;
    for (NodeId v = 0; v < 32; ++v) {
        double expect = matches * arc[v];
        double sigma = std::sqrt(matches * arc[v] * (1 - arc[v]));
        CHECK(std::abs(counts[v] - expect) <= 5 * sigma + 1);
    }
}

TEST_CASE("keepers_for") {
    auto ring = Ring::from_seed(64, 2);
    auto k = keepers_for(10, 3, 16, ring);
    CHECK(k.size() == 16);
    CHECK(std::set<NodeId>(k.begin(), k.end()).size() == 16);
    CHECK(std::find(k.begin(), k.end(), 10) == k.end());
    CHECK(keepers_for(10, 3, 16, ring) == k);
    CHECK(keepers_for(10, 4, 16, ring) != k);

    auto small = Ring::from_seed(8, 1);
    auto all = keepers_for(3, 1, 7, small);
    std::set<NodeId> s(all.begin(), all.end());
    CHECK(s.size() == 7);
    CHECK_FALSE(s.contains(3));
    CHECK_THROWS_AS(keepers_for(3, 1, 8, small), Error);
}

TEST_CASE("keeper_verify") {
    const NodeId s = 4;
    KeeperRecord rec{s, 1, {}, {}};

    auto win1 = round1_with(s, true, 1);
    CHECK(keeper_verify(win1, rec, false).vote == Vote::Positive);
    CHECK(keeper_verify(win1, rec, false).vote == Vote::Positive);  // same certificate again

    SUBCASE("second certificate for the same round after a loss is multi-play") {
        auto loss = round1_with(s, false, 1, win1.opponent_of(s));
        auto r = keeper_verify(loss, rec, false);
        CHECK(r.vote == Vote::Negative);
        REQUIRE(r.evidence);
        CHECK(is_dual_powin_evidence(s, r.evidence->first, r.evidence->second));
    }
    SUBCASE("two wins for the same round are the honest re-pair outcome") {
        auto other = round1_with(s, true, 1, win1.opponent_of(s));
        CHECK(keeper_verify(other, rec, false).vote == Vote::Positive);
    }
    SUBCASE("round 2 chained from a stored win") {
        auto r2 = play(1, 2, s, 50, win1.auth_tag, Digest::from_uint(1));
        CHECK(keeper_verify(r2, rec, false).vote == Vote::Positive);
    }
    SUBCASE("round 2 chained from an unknown certificate waits, then goes negative") {
        auto r2 = play(1, 2, s, 50, Digest::from_uint(12345), Digest::from_uint(1));
        CHECK(keeper_verify(r2, rec, false).vote == Vote::Pending);
        CHECK(keeper_verify(r2, rec, true).vote == Vote::Negative);
    }
    SUBCASE("round 2 after a stored loss") {
        KeeperRecord lost{s, 1, {}, {}};
        auto loss = round1_with(s, false, 1);
        keeper_verify(loss, lost, false);
        auto r2 = play(1, 2, s, 50, loss.auth_tag, Digest::from_uint(1));
        CHECK(keeper_verify(r2, lost, false).vote == Vote::Negative);
    }
    SUBCASE("tampered certificate") {
        auto bad = win1;
        bad.winner = win1.opponent_of(s);
        CHECK(keeper_verify(bad, rec, true).vote == Vote::Negative);
    }
}

TEST_CASE("foul threshold") {
    auto ring = Ring::from_seed(64, 3);
    const NodeId subject = 7;
    const std::uint64_t t = 2;
    auto keepers = keepers_for(subject, t, 16, ring);
    auto mid = make_match_id(t, 1, subject, 9);
    auto votes_from = [&](std::size_t count) {
        std::vector<KeeperVoteRecord> v;
        for (std::size_t i = 0; i < count; ++i) {
            KeeperVoteRecord r{keepers[i], subject, t, mid, {}};
            r.seal();
            v.push_back(r);
        }
        return v;
    };
    // Direct fraction comparison as the reference.
    for (std::uint64_t neg = 0; neg <= 16; ++neg) {
        CHECK(exceeds_two_thirds(neg, 16) == (static_cast<double>(neg) / 16.0 > 2.0 / 3.0));
    }
    CHECK_FALSE(tally_fouls(mid, subject, t, votes_from(0), 16).has_value());
    CHECK_FALSE(tally_fouls(mid, subject, t, votes_from(10), 16).has_value());
    auto foul = tally_fouls(mid, subject, t, votes_from(11), 16);
    REQUIRE(foul);
    CHECK(foul->negative_votes == 11);
    CHECK(verify_foul_notice(*foul, ring, 16));
    CHECK(tally_fouls(mid, subject, t, votes_from(16), 16).has_value());

    SUBCASE("duplicate voters count once") {
        auto v = votes_from(10);
        v.push_back(v.front());
        CHECK_FALSE(tally_fouls(mid, subject, t, v, 16).has_value());
    }
    SUBCASE("votes from non-keepers or with bad tags do not count") {
        auto n = *foul;
        std::set<NodeId> ks(keepers.begin(), keepers.end());
        NodeId outsider = 0;
        while (ks.contains(outsider) || outsider == subject) ++outsider;
        n.votes.resize(10);
        KeeperVoteRecord fake{outsider, subject, t, mid, {}};
        fake.seal();
        n.votes.push_back(fake);
        CHECK_FALSE(verify_foul_notice(n, ring, 16));
        auto forged = *foul;
        forged.votes[0].tag = Digest::from_uint(1);
        CHECK_FALSE(verify_foul_notice(forged, ring, 16));
    }
    SUBCASE("dual-PoWin evidence is a foul regardless of votes") {
        auto win = round1_with(subject, true, t);
        auto loss = round1_with(subject, false, t, win.opponent_of(subject));
        for (std::size_t count : {0u, 5u, 10u}) {
            auto n = tally_fouls(win.match_id, subject, t, votes_from(count), 16, std::make_pair(win, loss));
            REQUIRE(n);
            CHECK(verify_foul_notice(*n, ring, 16));
        }
    }
    SUBCASE("an alert without evidence or votes is rejected") {
        FoulNotice empty;
        empty.match_id = mid;
        empty.subject = subject;
        empty.tournament_no = t;
        empty.total_keepers = 16;
        empty.negative_votes = 16;  // claimed, not proven
        CHECK_FALSE(verify_foul_notice(empty, ring, 16));
    }
}

TEST_CASE("isolated negative votes stay below the threshold") {
    // With fewer than a third of a keeper set malicious, at most 5 of 16 vote.
    for (std::uint64_t m = 0; m <= 5; ++m) CHECK_FALSE(exceeds_two_thirds(m, 16));
    // 20% malicious nodes at N=64: no keeper set holds 11 of them.
    auto ring = Ring::from_seed(64, 9);
    std::mt19937_64 rng(9);
    std::set<NodeId> bad;
    while (bad.size() < 13) bad.insert(static_cast<NodeId>(rng() % 64));
    int condemned = 0;
    for (std::uint64_t t = 1; t <= 30; ++t) {
        for (NodeId p = 0; p < 64; ++p) {
            auto ks = keepers_for(p, t, 16, ring);
            auto m = std::count_if(ks.begin(), ks.end(), [&](NodeId k) { return bad.contains(k); });
            condemned += exceeds_two_thirds(static_cast<std::uint64_t>(m), 16);
        }
    }
    CHECK(condemned == 0);
}

TEST_CASE("handle_validator_timeout") {
    using O = MatchOutcome;
    using A = TimeoutAction;
    CHECK(handle_validator_timeout(O::Unknown, std::nullopt) == A::Repair);
    CHECK(handle_validator_timeout(O::Won, std::nullopt) == A::Proceed);
    CHECK(handle_validator_timeout(O::Lost, std::nullopt) == A::Stop);
    CHECK(handle_validator_timeout(O::Won, O::Won) == A::Proceed);
    CHECK(handle_validator_timeout(O::Won, O::Lost) == A::Stop);
    CHECK(handle_validator_timeout(O::Lost, O::Won) == A::Stop);
    CHECK(handle_validator_timeout(O::Lost, O::Unknown) == A::Stop);
    CHECK(handle_validator_timeout(O::Unknown, O::Won) == A::Proceed);
    CHECK(handle_validator_timeout(O::Unknown, O::Unknown) == A::Wait);
}

TEST_CASE("TournamentState::qualified") {
    TournamentState st;
    st.tournament_no = 1;
    const NodeId me = 3;
    auto w1 = round1_with(me, true, 1);
    st.my_powins.push_back(w1);
    CHECK(st.qualified(1));
    CHECK_FALSE(st.qualified(2));
    // Round 2 won by me, chained from w1.
    for (NodeId opp = 200;; ++opp) {
        auto w2 = play(1, 2, me, opp, w1.auth_tag, Digest::from_uint(opp));
        if (w2.winner != me) continue;
        st.my_powins.push_back(w2);
        break;
    }
    CHECK(st.qualified(2));
    st.my_powins[1].prev_powin_hashes = {Digest::from_uint(1), Digest::from_uint(2)};
    CHECK_FALSE(st.qualified(2));
}
