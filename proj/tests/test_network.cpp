#include "cdag/errors.hpp"
#include "cdag/network.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

using namespace cdag;

namespace {

Message probe(NodeId origin, std::uint64_t tag) {
    return make_message(MsgKind::PairProbe, origin, 1, Digest::from_uint(tag), PairProbeMsg{});
}

Message body_of_size(NodeId origin, std::uint64_t bytes, std::uint64_t tag) {
    auto m = make_message(MsgKind::BlockBody, origin, 1, Digest::from_uint(tag), BlockBodyMsg{});
    m.bytes = bytes;
    return m;
}

}  // namespace

TEST_CASE("scheduler fires in (time, seq) order") {
    Scheduler s;
    std::vector<int> order;
    s.at(2.0, [&] { order.push_back(3); });
    s.at(1.0, [&] { order.push_back(1); });
    s.at(1.0, [&] {
        order.push_back(2);
        s.after(0.5, [&] { order.push_back(25); });
    });
    s.run_until(10);
    CHECK(order == std::vector<int>{1, 2, 25, 3});
    CHECK(s.now() == 10.0);
    CHECK_THROWS_AS(s.at(5.0, [] {}), Error);
}

TEST_CASE("ring lookup") {
    Ring ring({100, 10, 50, 1000});
    CHECK(ring.lookup(std::uint64_t{50}) == 2);  // exact position
    CHECK(ring.lookup(std::uint64_t{51}) == 0);
    CHECK(ring.lookup(std::uint64_t{0}) == 1);
    CHECK(ring.lookup(std::uint64_t{1001}) == 1);  // wraps to smallest
    CHECK(ring.successor(3) == 1);
    CHECK(ring.successor(1) == 2);
    CHECK_THROWS_AS(Ring({5, 5}), Error);

    // Successors form one cycle over all nodes.
    auto big = Ring::from_seed(64, 3);
    std::set<NodeId> visited;
    NodeId cur = 0;
    for (int i = 0; i < 64; ++i) {
        visited.insert(cur);
        cur = big.successor(cur);
    }
    CHECK(cur == 0);
    CHECK(visited.size() == 64);
}

TEST_CASE("ring lookup load is uniform over positions") {
    // Evenly spaced positions make every node own the same arc.
    const std::size_t n = 16;
    std::vector<std::uint64_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) pos[i] = (std::uint64_t{1} << 60) * i;
    Ring ring(pos);
    std::vector<int> load(n, 0);
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) load[ring.lookup(Hasher().add(std::uint64_t(i)).finish())]++;
    const double mean = double(draws) / n;
    const double sigma = std::sqrt(draws * (1.0 / n) * (1 - 1.0 / n));
    for (int c : load) CHECK(std::abs(c - mean) <= 5 * sigma);
}

TEST_CASE("routing tables") {
    auto ring = Ring::from_seed(64, 1);
    std::mt19937_64 rng(1);
    auto tables = make_routing_tables(ring, rng);
    for (NodeId n = 0; n < 64; ++n) {
        CHECK(tables[n].size() == 6);
        std::set<NodeId> s(tables[n].begin(), tables[n].end());
        CHECK(s.size() == 6);
        CHECK_FALSE(s.contains(n));
    }
    CHECK(ceil_log2(64) == 6);
    CHECK(ceil_log2(65) == 7);
    CHECK(ceil_log2(2) == 1);
    CHECK(ceil_log2(1) == 1);
}

TEST_CASE("transfer_time") {
    Scheduler s;
    auto ring = Ring::from_seed(4, 2);
    Network net(s, ring, LinkParams{25e6, 0.02, 0.1}, 9);
    const double lat = net.latency(0, 1);
    CHECK(lat >= 0.02);
    CHECK(lat <= 0.1);
    CHECK(net.latency(1, 0) == lat);
    CHECK(net.transfer_time(0, 1, 0) == doctest::Approx(lat));
    CHECK(net.transfer_time(0, 1, 1'000'000) == doctest::Approx(0.32 + lat));

    // Two simultaneous 1 MB sends from one node: the second queues behind the first.
    std::map<std::uint64_t, double> arrival;
    net.set_handler([&](NodeId, const Message& m) {
        arrival[m.id.mod(1000)] = s.now();
        return false;
    });
    net.send(0, 1, body_of_size(0, 1'000'000, 1));
    net.send(0, 2, body_of_size(0, 1'000'000, 2));
    s.run_until(5);
    CHECK(arrival[1] == doctest::Approx(0.32 + net.latency(0, 1)));
    CHECK(arrival[2] == doctest::Approx(0.64 + net.latency(0, 2)));
    CHECK(arrival[2] >= 0.64);
}

TEST_CASE("gossip") {
    SUBCASE("N=2 degenerates to the successor") {
        Scheduler s;
        auto ring = Ring::from_seed(2, 1);
        Network net(s, ring, {}, 1);
        auto t = net.gossip_targets(0);
        CHECK(t == std::vector<NodeId>{1});
    }
    SUBCASE("fan-out of three and duplicate suppression") {
        Scheduler s;
        auto ring = Ring::from_seed(64, 4);
        Network net(s, ring, {}, 4);
        for (NodeId n = 0; n < 64; ++n) {
            auto t = net.gossip_targets(n);
            CHECK(t.size() <= 3);
            CHECK(t.size() >= 2);
            CHECK(std::find(t.begin(), t.end(), ring.successor(n)) != t.end());
            CHECK(std::find(t.begin(), t.end(), n) == t.end());
        }
        std::map<NodeId, int> handled;
        net.set_handler([&](NodeId to, const Message&) {
            handled[to]++;
            return true;
        });
        net.gossip(5, probe(5, 42));
        s.run_until(60);
        CHECK(handled.size() == 63);  // everyone but the origin
        for (const auto& [n, c] : handled) CHECK(c == 1);
        CHECK(net.stats().duplicates > 0);
    }
    SUBCASE("a 1 MB block reaches >95% of 64 nodes within 20 s at 25 Mbps") {
        Scheduler s;
        auto ring = Ring::from_seed(64, 8);
        Network net(s, ring, LinkParams{25e6, 0.02, 0.1}, 8);
        int got = 0;
        net.set_handler([&](NodeId, const Message&) {
            if (s.now() <= 20.0) ++got;
            return true;
        });
        net.gossip(0, body_of_size(0, 1'000'000, 7));
        s.run_until(100);
        CHECK(got >= 0.95 * 63);
    }
}

TEST_CASE("network determinism") {
    auto run = [](std::uint64_t seed) {
        Scheduler s;
        auto ring = Ring::from_seed(32, seed);
        Network net(s, ring, {}, seed);
        net.set_handler([](NodeId, const Message&) { return true; });
        for (std::uint64_t i = 0; i < 5; ++i) net.gossip(static_cast<NodeId>(i * 3), probe(0, 100 + i));
        s.run_until(30);
        return net.trace_digest();
    };
    CHECK(run(1) == run(1));
    CHECK(run(1) != run(2));
}
