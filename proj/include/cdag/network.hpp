#pragma once

#include "cdag/barrier.hpp"
#include "cdag/messages.hpp"
#include "cdag/ring.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <ostream>
#include <queue>
#include <random>
#include <unordered_set>
#include <vector>

namespace cdag {

/// Discrete-event queue ordered by (fire time, insertion sequence).
class Scheduler {
public:
    using Action = std::function<void()>;

    /// Throws InvalidParameter for a time in the past.
    void at(SimTime t, Action a);
    void after(SimTime delay, Action a) { at(now_ + delay, std::move(a)); }

    /// Fires every event with time ≤ end, then advances the clock to end.
    void run_until(SimTime end);
    bool step();

    SimTime now() const { return now_; }
    std::uint64_t executed() const { return executed_; }
    std::size_t pending() const { return queue_.size(); }

private:
    struct Event {
        SimTime time;
        std::uint64_t seq;
        Action action;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            return a.time != b.time ? a.time > b.time : a.seq > b.seq;
        }
    };
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    SimTime now_ = 0;
    std::uint64_t seq_ = 0;
    std::uint64_t executed_ = 0;
};

struct LinkParams {
    double bandwidth_bps = 25e6;
    double latency_min_s = 0.020;
    double latency_max_s = 0.100;
};

struct TrafficStats {
    std::array<std::uint64_t, kMsgKindCount> messages{};
    std::array<std::uint64_t, kMsgKindCount> bytes{};
    std::uint64_t duplicates = 0;
};

/// Point-to-point delivery over per-node FIFO egress queues plus per-pair
/// propagation latency, and fan-out-3 gossip with duplicate suppression.
class Network {
public:
    /// Returns true when a gossip message should be relayed onward.
    using Handler = std::function<bool(NodeId to, const Message&)>;

    Network(Scheduler& sched, const Ring& ring, LinkParams link, std::uint64_t seed);

    void set_handler(Handler h) { handler_ = std::move(h); }
    void set_trace(std::ostream* out) { trace_ = out; }

    /// Symmetric per-pair latency, uniform in [min, max], from a hash of the pair.
    SimTime latency(NodeId a, NodeId b) const;
    SimTime serialization(std::uint64_t bytes) const;
    /// Time for `bytes` to reach `to` if sent now, counting `from`'s queue.
    SimTime transfer_time(NodeId from, NodeId to, std::uint64_t bytes) const;

    /// Queues `msg` on `from`'s egress link; returns the delivery time.
    SimTime send(NodeId from, NodeId to, Message msg);

    /// Originates or relays a gossip message from `from`: marks it seen there
    /// and sends to the gossip targets.
    void gossip(NodeId from, Message msg);
    std::vector<NodeId> gossip_targets(NodeId from);

    bool has_seen(NodeId node, const Digest& id) const { return seen_[node].contains(id); }

    const Ring& ring() const { return ring_; }
    const std::vector<NodeId>& routing_table(NodeId n) const { return tables_[n]; }
    const TrafficStats& stats() const { return stats_; }
    SimTime egress_free_at(NodeId n) const { return busy_until_[n]; }
    /// Running digest over every delivery (time, receiver, kind, id).
    const Digest& trace_digest() const { return trace_digest_; }
    std::mt19937_64& rng() { return rng_; }

private:
    void deliver(NodeId to, const Message& msg);

    Scheduler& sched_;
    const Ring& ring_;
    LinkParams link_;
    std::uint64_t seed_;
    std::mt19937_64 rng_;
    std::vector<std::vector<NodeId>> tables_;
    std::vector<SimTime> busy_until_;
    std::vector<std::unordered_set<Digest>> seen_;
    Handler handler_;
    std::ostream* trace_ = nullptr;
    TrafficStats stats_;
    Digest trace_digest_;
};

}  // namespace cdag
