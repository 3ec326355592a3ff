#include "cdag/network.hpp"

#include "cdag/errors.hpp"

#include <algorithm>
#include <iomanip>

namespace cdag {

void Scheduler::at(SimTime t, Action a) {
    if (t < now_) throw Error(ErrorCode::InvalidParameter, "event scheduled in the past");
    queue_.push(Event{t, seq_++, std::move(a)});
}

bool Scheduler::step() {
    if (queue_.empty()) return false;
    // The action may schedule more events, so move it out before popping.
    auto ev = std::move(const_cast<Event&>(queue_.top()));
    queue_.pop();
    now_ = ev.time;
    ++executed_;
    ev.action();
    return true;
}

void Scheduler::run_until(SimTime end) {
    while (!queue_.empty() && queue_.top().time <= end) step();
    now_ = std::max(now_, end);
}

const char* to_string(MsgKind k) {
    switch (k) {
        case MsgKind::TxGossip: return "TxGossip";
        case MsgKind::HeaderAnnounce: return "HeaderAnnounce";
        case MsgKind::BodyRequest: return "BodyRequest";
        case MsgKind::BlockBody: return "BlockBody";
        case MsgKind::PoWinMsg: return "PoWin";
        case MsgKind::KeeperVote: return "KeeperVote";
        case MsgKind::FoulAlert: return "FoulAlert";
        case MsgKind::BarrierSync: return "BarrierSync";
        case MsgKind::PairProbe: return "PairProbe";
        case MsgKind::PairReply: return "PairReply";
        case MsgKind::PairCancel: return "PairCancel";
        case MsgKind::GameProposal: return "GameProposal";
        case MsgKind::ResultQuery: return "ResultQuery";
        case MsgKind::ResultAnswer: return "ResultAnswer";
    }
    return "?";
}

std::uint64_t fixed_size(MsgKind k) {
    switch (k) {
        case MsgKind::PairProbe:
        case MsgKind::PairReply:
        case MsgKind::KeeperVote: return 200;
        case MsgKind::GameProposal: return 300;
        case MsgKind::PoWinMsg:
        case MsgKind::ResultAnswer: return 400;
        case MsgKind::FoulAlert: return 600;
        case MsgKind::HeaderAnnounce: return 500;
        case MsgKind::BarrierSync: return 150;
        case MsgKind::BodyRequest:
        case MsgKind::PairCancel:
        case MsgKind::ResultQuery: return 100;
        case MsgKind::TxGossip:
        case MsgKind::BlockBody: return 0;
    }
    return 0;
}

Message make_message(MsgKind kind, NodeId origin, std::uint64_t tournament_no, const Digest& id, Payload body) {
    Message m;
    m.kind = kind;
    m.origin = origin;
    m.sender = origin;
    m.tournament_no = tournament_no;
    m.id = id;
    m.bytes = fixed_size(kind);
    if (kind == MsgKind::BlockBody) {
        const auto& b = std::get<BlockBodyMsg>(body);
        m.bytes = (b.block ? b.block->byte_size() : 0) + (b.cblock ? b.cblock->byte_size() : 0);
    }
    m.body = std::make_shared<const Payload>(std::move(body));
    return m;
}

Network::Network(Scheduler& sched, const Ring& ring, LinkParams link, std::uint64_t seed)
    : sched_(sched),
      ring_(ring),
      link_(link),
      seed_(seed),
      rng_(seed ^ 0x6e6574776f726bULL),
      busy_until_(ring.size(), 0.0),
      seen_(ring.size()) {
    if (link_.bandwidth_bps <= 0) throw Error(ErrorCode::InvalidParameter, "bandwidth must be positive");
    if (link_.latency_min_s < 0 || link_.latency_max_s < link_.latency_min_s) {
        throw Error(ErrorCode::InvalidParameter, "latency range must satisfy 0 <= min <= max");
    }
    tables_ = make_routing_tables(ring_, rng_);
}

SimTime Network::latency(NodeId a, NodeId b) const {
    if (a == b) return 0;
    auto lo = std::min(a, b), hi = std::max(a, b);
    auto h = Hasher().add("latency").add(seed_).add(lo).add(hi).finish().prefix64();
    double u = static_cast<double>(h >> 11) * 0x1.0p-53;
    return link_.latency_min_s + u * (link_.latency_max_s - link_.latency_min_s);
}

SimTime Network::serialization(std::uint64_t bytes) const {
    return static_cast<double>(bytes) * 8.0 / link_.bandwidth_bps;
}

SimTime Network::transfer_time(NodeId from, NodeId to, std::uint64_t bytes) const {
    if (from == to) return 0;
    SimTime start = std::max(sched_.now(), busy_until_[from]);
    return start + serialization(bytes) + latency(from, to) - sched_.now();
}

SimTime Network::send(NodeId from, NodeId to, Message msg) {
    const auto k = static_cast<std::size_t>(msg.kind);
    stats_.messages[k]++;
    stats_.bytes[k] += msg.bytes;
    msg.sender = from;
    SimTime when = sched_.now();
    if (from != to) {
        SimTime start = std::max(sched_.now(), busy_until_[from]);
        busy_until_[from] = start + serialization(msg.bytes);
        when = busy_until_[from] + latency(from, to);
    }
    sched_.at(when, [this, to, m = std::move(msg)]() { deliver(to, m); });
    return when;
}

std::vector<NodeId> Network::gossip_targets(NodeId from) {
    std::vector<NodeId> out;
    const auto& table = tables_[from];
    if (table.size() <= 2) {
        out = table;
    } else {
        auto i = static_cast<std::size_t>(rng_() % table.size());
        auto j = static_cast<std::size_t>(rng_() % (table.size() - 1));
        if (j >= i) ++j;
        out = {table[i], table[j]};
    }
    out.push_back(ring_.successor(from));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    out.erase(std::remove(out.begin(), out.end(), from), out.end());
    return out;
}

void Network::gossip(NodeId from, Message msg) {
    msg.gossip = true;
    seen_[from].insert(msg.id);
    for (NodeId to : gossip_targets(from)) send(from, to, msg);
}

void Network::deliver(NodeId to, const Message& msg) {
    if (msg.gossip) {
        if (!seen_[to].insert(msg.id).second) {
            stats_.duplicates++;
            return;
        }
    }
    trace_digest_ = Hasher()
                        .add(trace_digest_)
                        .add(sched_.now())
                        .add(to)
                        .add(static_cast<std::uint32_t>(msg.kind))
                        .add(msg.id)
                        .finish();
    if (trace_) {
        *trace_ << std::fixed << std::setprecision(6) << sched_.now() << ' ' << to << ' ' << to_string(msg.kind)
                << ' ' << msg.id.short_hex() << '\n';
    }
    bool relay = handler_ ? handler_(to, msg) : true;
    if (msg.gossip && relay) {
        Message fwd = msg;
        fwd.hops++;
        gossip(to, std::move(fwd));
    }
}

}  // namespace cdag
