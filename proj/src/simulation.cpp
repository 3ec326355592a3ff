#include "cdag/simulation.hpp"

#include "cdag/bucketing.hpp"
#include "cdag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <set>

namespace cdag {

namespace {

constexpr double kQueryWaitFrac = 0.05;
constexpr double kKeeperRecheckFrac = 0.25;
constexpr double kOracleRtt = 0.1;
constexpr std::size_t kMaxHints = 3;
constexpr double kPendingMaxAgeSlots = 3;

struct Match {
    Digest id;
    NodeId opponent = 0;
    NodeId validator = 0;
    MatchSpec spec;
    bool resolved = false;
};

struct Player {
    std::uint64_t t = 0;
    std::uint32_t round = 1;
    PlayerStatus status = PlayerStatus::Idle;
    std::vector<PoWin> wins;
    SimTime round_started = 0;
    std::uint64_t epoch = 0;  // bumped on every round or tournament change

    std::deque<NodeId> order;
    std::set<NodeId> probed;  // distinct peers charged to the budget
    std::set<NodeId> referred;  // learned from hints; probing them is free
    std::optional<NodeId> outstanding;
    std::uint64_t probe_seq = 0;
    std::set<NodeId> excluded;
    std::optional<Match> match;

    // Validator timeout bookkeeping for the current round.
    std::optional<Digest> timed_out;
    MatchOutcome original = MatchOutcome::Unknown;
    bool repaired = false;
    bool querying = false;
    std::set<Digest> abandoned;  // timed-out matches of this tournament
    std::uint32_t retries = 0;   // multi-play attempts this round

    std::optional<PoWin> last_win() const {
        if (wins.empty()) return std::nullopt;
        return wins.back();
    }
};

struct KeeperState {
    KeeperRecord record;
    std::unordered_set<Digest> seen;
    std::set<Digest> voted;
    std::set<Digest> alerted;
    std::map<Digest, std::vector<KeeperVoteRecord>> tallies;
    std::set<Digest> condemned;
};

struct NodeState {
    NodeId id = 0;
    AdversaryProfile adv;
    double offset = 0;
    double drift = 0;
    std::mt19937_64 rng;
    std::unique_ptr<LedgerStore> store;

    BarrierCertificate cert;
    std::uint64_t slot_epoch = 0;
    ResyncTrigger trigger;
    bool polling = false;
    std::uint64_t resyncs = 0;

    Player player;
    std::map<std::pair<std::uint64_t, std::uint32_t>, std::deque<std::pair<NodeId, SimTime>>> lobby;

    std::unordered_map<Digest, std::vector<GameProposalMsg>> validating;
    std::unordered_set<Digest> adjudicated;
    std::map<std::pair<NodeId, std::uint64_t>, KeeperState> keeping;

    std::unordered_map<Digest, std::vector<NodeId>> waiters;
    std::unordered_set<Digest> requested;
    std::map<std::uint64_t, std::set<std::uint32_t>> announced;
    std::map<std::uint64_t, std::vector<BlockPtr>> by_tournament;

    std::unordered_set<Digest> fouls_applied;
    std::map<std::pair<NodeId, std::uint64_t>, std::uint32_t> foul_counts;

    std::vector<BlockHash> confirmed;
    std::size_t consistent_prefix = 0;
    std::uint64_t reversals = 0;
    bool dirty = false;

    std::uint64_t tournament() const { return cert.tournament_no; }
};

/// Global transaction supply. Transactions are drawn from here by every
/// proposer; with tx_rate = 0 buckets are topped up on demand.
class TxSupply {
public:
    TxSupply(const SimConfig& cfg, std::uint64_t seed)
        : pool_(cfg.buckets), cfg_(cfg), rng_(seed) {}

    TxPool& pool() { return pool_; }

    void generate(std::size_t count) {
        std::bernoulli_distribution twin(cfg_.double_spend_rate);
        for (std::size_t i = 0; i < count; ++i) {
            auto tx = std::make_shared<const Transaction>(
                Transaction::make({next_ref_++}, "t" + std::to_string(nonce_++), cfg_.tx_bytes));
            pool_.add(tx);
            by_input_[tx->inputs.front()].push_back(tx->hash);
            ++generated_;
            if (cfg_.double_spend_rate > 0 && twin(rng_)) {
                auto dup = std::make_shared<const Transaction>(
                    Transaction::make(tx->inputs, "d" + std::to_string(nonce_++), cfg_.tx_bytes));
                pool_.add(dup);
                by_input_[tx->inputs.front()].push_back(dup->hash);
                ++twins_;
            }
        }
    }

    std::vector<TxPtr> fill(std::uint32_t bucket, std::uint64_t max_bytes, const TxSkip& skip) {
        const bool saturated = cfg_.tx_rate <= 0;
        for (int attempt = 0;; ++attempt) {
            auto txs = fill_block(bucket, pool_, max_bytes, skip);
            std::uint64_t used = 0;
            for (const auto& t : txs) used += t->byte_size;
            if (!saturated || max_bytes - used < cfg_.tx_bytes || attempt >= 8) return txs;
            auto deficit = (max_bytes - used) / cfg_.tx_bytes + 1;
            generate(static_cast<std::size_t>(deficit) * cfg_.buckets);
        }
    }

    /// Drops a confirmed block's transactions and every pooled twin of them.
    void settle(const Block& block) {
        std::vector<TxHash> doomed;
        for (const auto& tx : block.txs()) {
            doomed.push_back(tx->hash);
            for (auto ref : tx->inputs) {
                auto it = by_input_.find(ref);
                if (it == by_input_.end()) continue;
                doomed.insert(doomed.end(), it->second.begin(), it->second.end());
                by_input_.erase(it);
            }
        }
        pool_.remove_all(doomed);
    }

    std::uint64_t generated() const { return generated_; }
    std::uint64_t twins() const { return twins_; }

private:
    TxPool pool_;
    const SimConfig& cfg_;
    std::mt19937_64 rng_;
    SpendRef next_ref_ = 1;
    std::uint64_t nonce_ = 0;
    std::uint64_t generated_ = 0;
    std::uint64_t twins_ = 0;
    std::unordered_map<SpendRef, std::vector<TxHash>> by_input_;
};

class Engine {
public:
    Engine(const SimConfig& cfg, std::ostream* trace);
    SimResult run();

private:
    // plumbing
    void send(NodeId from, NodeId to, MsgKind kind, std::uint64_t t, Payload body);
    bool on_message(NodeId to, const Message& m);
    bool accept_tournament(NodeState& n, std::uint64_t t);
    std::vector<NodeId> sample(NodeState& n, const std::vector<NodeId>& from, std::size_t count, NodeId skip_a,
                               NodeId skip_b);
    const std::vector<NodeId>& keepers_of(NodeId subject, std::uint64_t t);
    bool is_keeper(NodeId node, NodeId subject, std::uint64_t t);
    KeeperState& keeping_for(NodeState& n, NodeId subject, std::uint64_t t);

    // barrier
    void start_slot(NodeState& n, const BarrierCertificate& cert);
    void poll_oracle(NodeState& n);

    // colosseum: player side
    void begin_round(NodeState& n, bool fresh);
    void send_next_probe(NodeState& n);
    void on_probe(NodeState& n, const Message& m);
    void on_reply(NodeState& n, const Message& m);
    void on_cancel(NodeState& n, const Message& m);
    bool prev_ok(NodeId player, std::uint64_t t, std::uint32_t round, const std::optional<PoWin>& prev) const;
    void form_match(NodeState& n, NodeId opponent, const std::optional<PoWin>& opponent_prev);
    void on_validator_timeout(NodeState& n, const Digest& match_id, std::uint64_t epoch);
    void player_result(NodeState& n, const PoWin& w);
    void resolve_match(NodeState& n, const PoWin& w);
    void advance(NodeState& n, const PoWin& w);
    void lose(NodeState& n, const PoWin& w);
    void eliminate(NodeState& n);
    void share_with_keepers(NodeState& n, const PoWin& w);

    // colosseum: validator and keeper side
    void on_proposal(NodeState& n, const Message& m);
    void distribute(NodeState& v, const PoWin& w);
    void keeper_receive(NodeState& n, NodeId subject, const PoWin& w, NodeId from);
    void keeper_recheck(NodeState& n, NodeId subject, const PoWin& w);
    void cast_negative(NodeState& n, NodeId subject, const PoWin& w,
                       std::optional<std::pair<PoWin, PoWin>> evidence);
    void on_vote(NodeState& n, const KeeperVoteRecord& v);
    void false_alert(NodeState& n, NodeId subject, const PoWin& w);
    void broadcast_foul(NodeState& n, const FoulNotice& notice);
    bool on_foul(NodeState& n, const FoulNotice& notice);
    void on_result_query(NodeState& n, const Message& m);

    // ledger
    void propose(NodeState& n);
    bool on_header(NodeState& n, const Message& m);
    void on_body_request(NodeState& n, const Message& m);
    void on_body(NodeState& n, const Message& m);
    void ingest_block(NodeState& n, const BlockPtr& b, NodeId from);
    void ingest_cblock(NodeState& n, const CBlockPtr& c, NodeId from);
    void request(NodeState& n, const Digest& h, NodeId from);
    void handle_offer(NodeState& n, const OfferResult& r);
    void serve(NodeState& n, const Digest& h);
    void send_body(NodeState& n, const Digest& h, NodeId to);
    void mark_dirty(NodeState& n);
    void check_confirmations(NodeState& n);

    const SimConfig& cfg_;
    SimTime tau_;
    std::uint64_t delta_;
    std::uint32_t budget_;
    Scheduler sched_;
    Ring ring_;
    Network net_;
    OracleState oracle_;
    std::shared_ptr<SpendIndex> index_;
    TxSupply supply_;
    std::vector<NodeState> nodes_;
    NodeId reference_ = 0;
    std::uint64_t msg_seq_ = 0;
    std::map<std::pair<NodeId, std::uint64_t>, std::vector<NodeId>> keeper_cache_;
    SimResult result_;
};

std::uint64_t mix(std::uint64_t seed, const char* what, std::uint64_t i = 0) {
    return Hasher().add(what).add(seed).add(i).finish().prefix64();
}

Engine::Engine(const SimConfig& cfg, std::ostream* trace)
    : cfg_(cfg),
      tau_(cfg.tau_s),
      delta_(compute_delta(cfg.n, cfg.alpha)),
      budget_(cfg.probe_budget ? cfg.probe_budget : 2 * ceil_log2(cfg.n)),
      ring_(Ring::from_seed(cfg.n, cfg.seed)),
      net_(sched_, ring_, LinkParams{cfg.bandwidth_bps, cfg.latency_min_ms / 1000, cfg.latency_max_ms / 1000},
           mix(cfg.seed, "net")),
      index_(std::make_shared<SpendIndex>()),
      supply_(cfg, mix(cfg.seed, "tx")) {
    net_.set_trace(trace);
    net_.set_handler([this](NodeId to, const Message& m) { return on_message(to, m); });

    const double skew = cfg.skew_ms / 1000;
    oracle_.genesis_time = skew;
    oracle_.tau = tau_;
    oracle_.genesis_hash = Hasher().add("oracle").add(cfg.seed).finish();

    std::mt19937_64 rng(mix(cfg.seed, "setup"));
    std::set<NodeId> bad(cfg.malicious.begin(), cfg.malicious.end());
    auto extra = static_cast<std::size_t>(std::llround(cfg.malicious_frac * cfg.n));
    std::vector<NodeId> ids(cfg.n);
    for (NodeId i = 0; i < cfg.n; ++i) ids[i] = i;
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::size_t i = 0; bad.size() < std::min<std::size_t>(cfg.n - 1, cfg.malicious.size() + extra) && i < ids.size(); ++i) {
        bad.insert(ids[i]);
    }

    std::uniform_real_distribution<double> off(-skew, skew);
    std::uniform_real_distribution<double> drift(-cfg.drift_ppm * 1e-6, cfg.drift_ppm * 1e-6);
    LedgerParams lp{cfg.alpha, cfg.buckets, cfg.block_bytes};
    nodes_.resize(cfg.n);
    std::size_t adv_index = 0;
    for (NodeId i = 0; i < cfg.n; ++i) {
        auto& n = nodes_[i];
        n.id = i;
        n.rng.seed(mix(cfg.seed, "node", i));
        n.offset = skew > 0 ? off(rng) : 0.0;
        n.drift = cfg.drift_ppm > 0 ? drift(rng) : 0.0;
        n.store = std::make_unique<LedgerStore>(lp, index_);
        if (bad.contains(i)) {
            auto& a = n.adv;
            const auto& mode = cfg.adversary;
            if (mode == "mixed") {
                a.validator = static_cast<ValidatorMode>(1 + adv_index % 5);
                a.keeper = static_cast<KeeperMode>(1 + adv_index % 4);
                a.multi_play = adv_index % 3 == 0;
            } else if (mode == "negligent") {
                a.validator = ValidatorMode::Silent;
                a.keeper = KeeperMode::VoteAgainst;
            } else if (mode == "multiplay") {
                a.multi_play = true;
            } else if (mode == "bypass") {
                a.bypass_barrier = true;
            } else if (mode.rfind("validator:", 0) == 0) {
                a.validator = static_cast<ValidatorMode>(mode.back() - '0');
            } else if (mode.rfind("keeper:", 0) == 0) {
                a.keeper = static_cast<KeeperMode>(mode.back() - '0');
            }
            ++adv_index;
        }
    }
    reference_ = 0;
    while (reference_ + 1 < cfg.n && !nodes_[reference_].adv.honest()) ++reference_;
}

// ---------------------------------------------------------------------------
// plumbing

void Engine::send(NodeId from, NodeId to, MsgKind kind, std::uint64_t t, Payload body) {
    auto m = make_message(kind, from, t, Digest::from_uint(++msg_seq_), std::move(body));
    net_.send(from, to, std::move(m));
}

std::vector<NodeId> Engine::sample(NodeState& n, const std::vector<NodeId>& from, std::size_t count, NodeId skip_a,
                                   NodeId skip_b) {
    std::vector<NodeId> pool;
    pool.reserve(from.size());
    for (auto x : from) {
        if (x != skip_a && x != skip_b) pool.push_back(x);
    }
    std::shuffle(pool.begin(), pool.end(), n.rng);
    if (pool.size() > count) pool.resize(count);
    return pool;
}

const std::vector<NodeId>& Engine::keepers_of(NodeId subject, std::uint64_t t) {
    auto key = std::make_pair(subject, t);
    auto it = keeper_cache_.find(key);
    if (it == keeper_cache_.end()) it = keeper_cache_.emplace(key, keepers_for(subject, t, cfg_.k, ring_)).first;
    return it->second;
}

bool Engine::is_keeper(NodeId node, NodeId subject, std::uint64_t t) {
    const auto& ks = keepers_of(subject, t);
    return std::find(ks.begin(), ks.end(), node) != ks.end();
}

KeeperState& Engine::keeping_for(NodeState& n, NodeId subject, std::uint64_t t) {
    auto [it, fresh] = n.keeping.try_emplace({subject, t});
    if (fresh) {
        it->second.record.subject = subject;
        it->second.record.tournament_no = t;
    }
    return it->second;
}

bool Engine::accept_tournament(NodeState& n, std::uint64_t t) {
    const auto mine = n.tournament();
    if (t > mine && cfg_.resync && n.trigger.observe(mine, t)) poll_oracle(n);
    if (!within_tolerance(mine, t)) {
        result_.counters["refused_far_tournament"]++;
        return false;
    }
    return true;
}

bool Engine::on_message(NodeId to, const Message& m) {
    auto& n = nodes_[to];
    switch (m.kind) {
        case MsgKind::PairProbe: on_probe(n, m); return false;
        case MsgKind::PairReply: on_reply(n, m); return false;
        case MsgKind::PairCancel: on_cancel(n, m); return false;
        case MsgKind::GameProposal: on_proposal(n, m); return false;
        case MsgKind::PoWinMsg: {
            const auto& p = m.as<PoWinPayload>();
            if (!accept_tournament(n, m.tournament_no) || !p.powin.structurally_valid()) return false;
            if (p.route == PoWinRoute::ToPlayer) {
                player_result(n, p.powin);
            } else {
                keeper_receive(n, p.subject, p.powin, m.sender);
            }
            return false;
        }
        case MsgKind::KeeperVote:
            if (accept_tournament(n, m.tournament_no)) on_vote(n, m.as<KeeperVotePayload>().vote);
            return false;
        case MsgKind::FoulAlert: return on_foul(n, m.as<FoulAlertPayload>().notice);
        case MsgKind::ResultQuery: on_result_query(n, m); return false;
        case MsgKind::ResultAnswer: {
            const auto& a = m.as<ResultAnswerMsg>();
            if (a.powin && a.powin->structurally_valid()) player_result(n, *a.powin);
            return false;
        }
        case MsgKind::HeaderAnnounce: return on_header(n, m);
        case MsgKind::BodyRequest: on_body_request(n, m); return false;
        case MsgKind::BlockBody: on_body(n, m); return false;
        case MsgKind::TxGossip:
        case MsgKind::BarrierSync: return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// barrier

void Engine::start_slot(NodeState& n, const BarrierCertificate& cert) {
    n.cert = cert;
    const auto epoch = ++n.slot_epoch;
    const auto t = cert.tournament_no;

    auto& p = n.player;
    p = Player{};
    p.t = t;
    p.epoch = (t << 20);
    if (t <= cfg_.duration_slots) {
        p.status = PlayerStatus::Seeking;
        begin_round(n, true);
    }

    // Housekeeping for state that can no longer matter.
    n.store->evict_pending(sched_.now(), kPendingMaxAgeSlots * tau_);
    for (auto it = n.keeping.begin(); it != n.keeping.end();) {
        it = it->first.second + 3 < t ? n.keeping.erase(it) : std::next(it);
    }
    if (n.validating.size() > 4096) n.validating.clear();
    while (!n.lobby.empty() && n.lobby.begin()->first.first + 1 < t) n.lobby.erase(n.lobby.begin());
    while (!n.announced.empty() && n.announced.begin()->first + 2 < t) n.announced.erase(n.announced.begin());

    const double wait = n.adv.bypass_barrier ? tau_ / 4 : tau_;
    auto next = wait_certificate(n.id, cert, wait, n.drift * tau_);
    sched_.at(std::max(sched_.now(), next.issued_at), [this, &n, next, epoch] {
        if (n.slot_epoch == epoch) start_slot(n, next);
    });
}

void Engine::poll_oracle(NodeState& n) {
    if (n.polling) return;
    n.polling = true;
    result_.counters["oracle_polls"]++;
    sched_.after(kOracleRtt, [this, &n] {
        n.polling = false;
        if (oracle_.current_tournament(sched_.now()) <= n.tournament()) return;
        n.resyncs++;
        result_.counters["resyncs"]++;
        auto c = resync(n.id, oracle_, sched_.now(), n.offset);
        c.issued_at = sched_.now();
        start_slot(n, c);
    });
}

// ---------------------------------------------------------------------------
// colosseum: player side

void Engine::begin_round(NodeState& n, bool fresh) {
    auto& p = n.player;
    if (fresh) p.round_started = sched_.now();
    ++p.epoch;
    p.order.clear();
    for (NodeId i = 0; i < cfg_.n; ++i) {
        if (i != n.id && !p.excluded.contains(i)) p.order.push_back(i);
    }
    std::shuffle(p.order.begin(), p.order.end(), n.rng);
    p.probed.clear();
    p.referred.clear();
    p.outstanding.reset();
    const auto epoch = p.epoch;
    // Slot-relative schedule, but never less than one pairing window.
    const double per_round = (cfg_.pairing_frac + cfg_.validator_wait_frac) * tau_;
    const double deadline = std::max(sched_.now() + cfg_.pairing_frac * tau_,
                                     n.cert.issued_at + (p.round - 1) * per_round + cfg_.pairing_frac * tau_);
    sched_.at(deadline, [this, &n, epoch] {
        auto& q = n.player;
        if (q.epoch != epoch || q.status != PlayerStatus::Seeking || q.match) return;
        result_.counters["unpaired"]++;
        if (q.t >= 1 && q.t <= cfg_.duration_slots) {
            auto& v = result_.unpaired[q.round];
            if (v.size() < cfg_.duration_slots) v.resize(cfg_.duration_slots, 0);
            v[q.t - 1]++;
        }
        eliminate(n);
    });
    send_next_probe(n);
}

void Engine::send_next_probe(NodeState& n) {
    auto& p = n.player;
    if (p.status != PlayerStatus::Seeking || p.match || p.outstanding) return;
    while (!p.order.empty() && p.excluded.contains(p.order.front())) p.order.pop_front();
    if (p.order.empty()) return;
    NodeId target = p.order.front();
    if (!p.probed.contains(target) && !p.referred.contains(target)) {
        if (p.probed.size() >= budget_) {
            // Out of blind probes: only referrals are still worth a message.
            auto hinted = std::find_if(p.order.begin(), p.order.end(), [&](NodeId x) { return p.referred.contains(x); });
            if (hinted == p.order.end()) return;  // stay reachable until the deadline
            target = *hinted;
            p.order.erase(hinted);
            p.order.push_front(target);
        } else {
            p.probed.insert(target);
        }
    }
    p.order.pop_front();
    p.outstanding = target;
    const auto seq = ++p.probe_seq;
    send(n.id, target, MsgKind::PairProbe, p.t, PairProbeMsg{p.round, p.last_win(), n.cert});
    const double spacing = cfg_.pairing_frac * tau_ / (budget_ + 1);
    sched_.after(spacing, [this, &n, seq] {
        auto& q = n.player;
        if (q.probe_seq != seq || !q.outstanding) return;
        q.outstanding.reset();
        send_next_probe(n);
    });
}

bool Engine::prev_ok(NodeId player, std::uint64_t t, std::uint32_t round, const std::optional<PoWin>& prev) const {
    if (round == 1) return !prev.has_value();
    return prev && prev->structurally_valid() && prev->winner == player && prev->round + 1 == round &&
           prev->tournament_no == t;
}

void Engine::on_probe(NodeState& n, const Message& m) {
    const auto& pr = m.as<PairProbeMsg>();
    const NodeId from = m.origin;
    if (!accept_tournament(n, m.tournament_no)) return;
    auto& p = n.player;
    auto& seen = n.lobby[{m.tournament_no, pr.round}];
    std::vector<NodeId> hints;
    for (auto it = seen.rbegin(); it != seen.rend() && hints.size() < kMaxHints; ++it) {
        if (it->first != from && sched_.now() - it->second < cfg_.pairing_frac * tau_) hints.push_back(it->first);
    }
    std::erase_if(seen, [&](const auto& e) { return e.first == from; });
    seen.emplace_back(from, sched_.now());
    if (seen.size() > 2 * kMaxHints) seen.pop_front();
    auto refuse = [&](PairRefusal why) {
        if (why == PairRefusal::Excluded) hints.clear();
        send(n.id, from, MsgKind::PairReply, m.tournament_no,
             PairReplyMsg{pr.round, false, why, std::nullopt, p.round, hints});
    };
    if (m.tournament_no != n.tournament()) return refuse(PairRefusal::WrongTournament);
    if (p.status == PlayerStatus::AwaitingValidator || (p.status == PlayerStatus::Seeking && p.match)) {
        return refuse(pr.round == p.round ? PairRefusal::Busy : PairRefusal::WrongRound);
    }
    if (p.status != PlayerStatus::Seeking) return refuse(PairRefusal::NotPlaying);
    if (pr.round != p.round) return refuse(PairRefusal::WrongRound);
    if (p.excluded.contains(from)) return refuse(PairRefusal::Excluded);
    const auto& c = pr.cert;
    if (c.tournament_no != m.tournament_no || c.node != from ||
        c.cert_hash != certificate_hash(c.prev_cert_hash, c.tournament_no, from) ||
        !prev_ok(from, p.t, p.round, pr.prev)) {
        return refuse(PairRefusal::NotPlaying);
    }
    send(n.id, from, MsgKind::PairReply, m.tournament_no, PairReplyMsg{pr.round, true, PairRefusal::None, p.last_win(), p.round, {}});
    form_match(n, from, pr.prev);
}

void Engine::on_reply(NodeState& n, const Message& m) {
    const auto& r = m.as<PairReplyMsg>();
    const NodeId from = m.origin;
    auto& p = n.player;
    auto cancel = [&] {
        send(n.id, from, MsgKind::PairCancel, m.tournament_no,
             PairCancelMsg{make_match_id(m.tournament_no, r.round, n.id, from)});
        result_.counters["cancels"]++;
        if (r.round == p.round && m.tournament_no == p.t) p.excluded.insert(from);
    };
    if (r.round != p.round || m.tournament_no != p.t) {
        if (r.accept) cancel();
        return;
    }
    const bool current = p.outstanding && *p.outstanding == from;
    if (current) p.outstanding.reset();
    if (r.accept && p.match && p.match->opponent == from) return;  // probed each other; already paired
    if (r.accept) {
        // A late accept still counts while this node is free.
        if (p.status == PlayerStatus::Seeking && !p.match && !p.excluded.contains(from) &&
            prev_ok(from, p.t, p.round, r.prev)) {
            p.outstanding.reset();
            form_match(n, from, r.prev);
        } else {
            cancel();
        }
        return;
    }
    if (!current) return;
    const bool behind = r.reason == PairRefusal::WrongRound && r.responder_round < p.round;
    if (behind) p.probed.erase(from);  // may still reach this round; not charged
    if (r.reason == PairRefusal::Busy || behind) p.order.push_back(from);
    for (auto it = r.hints.rbegin(); it != r.hints.rend(); ++it) {
        if (*it != n.id && !p.excluded.contains(*it) && !p.probed.contains(*it) && p.referred.insert(*it).second) {
            p.order.push_front(*it);
        }
    }
    send_next_probe(n);
}

void Engine::on_cancel(NodeState& n, const Message& m) {
    auto& p = n.player;
    const auto& c = m.as<PairCancelMsg>();
    if (!p.match || p.match->resolved || p.match->id != c.match_id || p.match->opponent != m.origin) return;
    p.match.reset();
    p.status = PlayerStatus::Seeking;
    p.excluded.insert(m.origin);
    send_next_probe(n);
}

void Engine::form_match(NodeState& n, NodeId opponent, const std::optional<PoWin>& opponent_prev) {
    auto& p = n.player;
    Match mt;
    mt.opponent = opponent;
    mt.id = make_match_id(p.t, p.round, n.id, opponent);
    mt.validator = validator_for(mt.id, ring_);
    auto mine = p.last_win();
    mt.spec = MatchSpec{p.t, p.round, {n.id, opponent},
                        {mine ? mine->auth_tag : Digest{}, opponent_prev ? opponent_prev->auth_tag : Digest{}}};
    p.match = mt;
    p.status = PlayerStatus::AwaitingValidator;
    GameProposal gp{n.id, make_game_proposal(mt.id, n.id, n.cert), n.cert.cert_hash};
    send(n.id, mt.validator, MsgKind::GameProposal, p.t, GameProposalMsg{mt.spec, gp});
    const auto epoch = p.epoch;
    const auto id = mt.id;
    sched_.after(cfg_.validator_wait_frac * tau_, [this, &n, id, epoch] { on_validator_timeout(n, id, epoch); });
}

void Engine::on_validator_timeout(NodeState& n, const Digest& match_id, std::uint64_t epoch) {
    auto& p = n.player;
    if (p.epoch != epoch || !p.match || p.match->id != match_id || p.match->resolved) return;
    result_.counters["validator_timeouts"]++;
    p.timed_out = match_id;
    p.original = MatchOutcome::Unknown;
    p.abandoned.insert(match_id);
    p.querying = true;
    const NodeId opp = p.match->opponent;
    const auto t = p.t;
    auto ask = [&](NodeId subject) {
        for (NodeId k : sample(n, keepers_of(subject, t), 3, n.id, opp)) {
            send(n.id, k, MsgKind::ResultQuery, t, ResultQueryMsg{match_id, subject});
        }
    };
    ask(n.id);
    ask(opp);
    sched_.after(kQueryWaitFrac * tau_, [this, &n, match_id, epoch] {
        auto& q = n.player;
        if (q.epoch != epoch || !q.querying || !q.match || q.match->id != match_id || q.match->resolved) return;
        q.querying = false;
        if (handle_validator_timeout(q.original, std::nullopt) != TimeoutAction::Repair) return;
        result_.counters["repairs"]++;
        q.repaired = true;
        q.excluded.insert(q.match->opponent);
        q.match.reset();
        q.status = PlayerStatus::Seeking;
        begin_round(n, false);
    });
}

void Engine::player_result(NodeState& n, const PoWin& w) {
    auto& p = n.player;
    if (w.tournament_no != p.t || !w.involves(n.id)) return;
    if (p.match && p.match->id == w.match_id && !p.match->resolved) {
        resolve_match(n, w);
        return;
    }
    if (!p.abandoned.contains(w.match_id)) return;
    // A timed-out match surfaced late.
    p.abandoned.erase(w.match_id);
    if (n.adv.honest()) share_with_keepers(n, w);
    const bool won = w.winner == n.id;
    if (p.timed_out && *p.timed_out == w.match_id && p.status != PlayerStatus::Qualified) {
        p.original = won ? MatchOutcome::Won : MatchOutcome::Lost;
        if (handle_validator_timeout(p.original, MatchOutcome::Unknown) == TimeoutAction::Stop) eliminate(n);
        return;
    }
    if (!won && p.status != PlayerStatus::Qualified) eliminate(n);
}

void Engine::share_with_keepers(NodeState& n, const PoWin& w) {
    const auto fan = (cfg_.k + 3) / 4;
    for (NodeId k : sample(n, keepers_of(n.id, w.tournament_no), fan, n.id, n.id)) {
        send(n.id, k, MsgKind::PoWinMsg, w.tournament_no, PoWinPayload{w, PoWinRoute::ToKeeper, n.id});
    }
}

void Engine::resolve_match(NodeState& n, const PoWin& w) {
    auto& p = n.player;
    p.match->resolved = true;
    p.querying = false;
    if (n.adv.honest()) {
        result_.round_time_sum += sched_.now() - p.round_started;
        result_.rounds_timed++;
    }
    const bool won = w.winner == n.id;
    if (won || n.adv.honest()) share_with_keepers(n, w);
    if (p.repaired) {
        auto act = handle_validator_timeout(p.original, won ? MatchOutcome::Won : MatchOutcome::Lost);
        if (act == TimeoutAction::Proceed) {
            advance(n, w);
        } else {
            eliminate(n);
        }
        return;
    }
    if (won) {
        advance(n, w);
    } else {
        lose(n, w);
    }
}

void Engine::advance(NodeState& n, const PoWin& w) {
    auto& p = n.player;
    p.wins.push_back(w);
    p.match.reset();
    p.timed_out.reset();
    p.original = MatchOutcome::Unknown;
    p.repaired = false;
    p.retries = 0;
    p.excluded.clear();
    if (p.round >= cfg_.alpha) {
        p.status = PlayerStatus::Qualified;
        ++p.epoch;
        if (p.t >= 1 && p.t <= cfg_.duration_slots) result_.qualifiers[p.t - 1]++;
        propose(n);
        return;
    }
    p.round++;
    p.status = PlayerStatus::Seeking;
    begin_round(n, true);
}

void Engine::lose(NodeState& n, const PoWin& w) {
    auto& p = n.player;
    if (n.adv.multi_play && p.retries < 1) {
        // Plays the same round again instead of stopping.
        result_.counters["multiplay_retries"]++;
        p.retries++;
        p.excluded.insert(w.opponent_of(n.id));
        p.match.reset();
        p.status = PlayerStatus::Seeking;
        begin_round(n, false);
        return;
    }
    eliminate(n);
}

void Engine::eliminate(NodeState& n) {
    auto& p = n.player;
    p.status = PlayerStatus::Eliminated;
    p.match.reset();
    p.outstanding.reset();
    ++p.epoch;
}

// ---------------------------------------------------------------------------
// colosseum: validator and keeper side

void Engine::on_proposal(NodeState& v, const Message& m) {
    const auto& gp = m.as<GameProposalMsg>();
    if (!accept_tournament(v, m.tournament_no)) return;
    const auto& spec = gp.match;
    const auto id = make_match_id(spec.tournament_no, spec.round, spec.players.first, spec.players.second);
    if (validator_for(id, ring_) != v.id || v.adjudicated.contains(id)) return;
    if (gp.proposal.player != spec.players.first) return;
    auto& list = v.validating[id];
    for (const auto& other : list) {
        if (other.proposal.player == gp.proposal.player) return;
    }
    list.push_back(gp);
    if (list.size() < 2) return;
    const auto a = list[0], b = list[1];
    v.validating.erase(id);
    v.adjudicated.insert(id);
    const bool consistent = a.match.tournament_no == b.match.tournament_no && a.match.round == b.match.round &&
                            a.match.players.first == b.match.players.second &&
                            a.match.players.second == b.match.players.first &&
                            a.match.prev_powin_hashes.first == b.match.prev_powin_hashes.second &&
                            a.match.prev_powin_hashes.second == b.match.prev_powin_hashes.first;
    std::optional<PoWin> w;
    if (consistent) w = adjudicate(v.id, a.match, a.proposal, b.proposal);
    if (!w) {
        result_.counters["void_matches"]++;
        return;
    }
    distribute(v, *w);
}

void Engine::distribute(NodeState& v, const PoWin& w) {
    const auto mode = v.adv.validator;
    if (mode == ValidatorMode::Silent) {
        result_.counters["validator_silent"]++;
        return;
    }
    const bool to_keepers = mode != ValidatorMode::PlayersOnly;
    const bool to_first = mode != ValidatorMode::KeepersOnly;
    const bool to_second = mode != ValidatorMode::KeepersOnly && mode != ValidatorMode::OnePlayer;
    const auto fan = (cfg_.k + 3) / 4;
    const NodeId vid = v.id;
    std::vector<std::pair<NodeId, PoWinPayload>> out;
    if (to_first) out.push_back({w.players.first, PoWinPayload{w, PoWinRoute::ToPlayer, w.players.first}});
    if (to_second) out.push_back({w.players.second, PoWinPayload{w, PoWinRoute::ToPlayer, w.players.second}});
    if (to_keepers) {
        for (NodeId player : {w.players.first, w.players.second}) {
            for (NodeId k : sample(v, keepers_of(player, w.tournament_no), fan, player, player)) {
                out.push_back({k, PoWinPayload{w, PoWinRoute::ToKeeper, player}});
            }
        }
    }
    auto emit = [this, vid, out, t = w.tournament_no] {
        for (const auto& [to, payload] : out) send(vid, to, MsgKind::PoWinMsg, t, payload);
    };
    if (mode == ValidatorMode::Delayed) {
        result_.counters["validator_delayed"]++;
        sched_.after((cfg_.validator_wait_frac + kQueryWaitFrac + 0.05) * tau_, emit);
    } else {
        emit();
    }
}

void Engine::keeper_receive(NodeState& n, NodeId subject, const PoWin& w, NodeId from) {
    if (n.adv.keeper == KeeperMode::NoVerify) return;
    if (!w.involves(subject) || !is_keeper(n.id, subject, w.tournament_no)) return;
    auto& ks = keeping_for(n, subject, w.tournament_no);
    if (!ks.seen.insert(w.auth_tag).second) return;

    VerifyResult res;
    if (n.adv.keeper == KeeperMode::NoStore) {
        KeeperRecord scratch = ks.record;
        res = keeper_verify(w, scratch, false);
    } else {
        res = keeper_verify(w, ks.record, false);
    }
    const bool forward = res.vote != Vote::Negative || n.adv.keeper == KeeperMode::VoteAgainst;

    if (n.adv.keeper == KeeperMode::VoteAgainst) {
        cast_negative(n, subject, w, std::nullopt);
    } else if (res.vote == Vote::Negative) {
        cast_negative(n, subject, w, res.evidence);
    } else if (res.vote == Vote::Pending) {
        sched_.after(kKeeperRecheckFrac * tau_, [this, &n, subject, w] { keeper_recheck(n, subject, w); });
    }
    if (n.adv.keeper == KeeperMode::FalseAlert) false_alert(n, subject, w);

    if (forward) {
        for (NodeId k : sample(n, keepers_of(subject, w.tournament_no), std::max<std::size_t>(4, cfg_.k / 2), n.id, from)) {
            send(n.id, k, MsgKind::PoWinMsg, w.tournament_no, PoWinPayload{w, PoWinRoute::KeeperGossip, subject});
        }
    }
}

void Engine::keeper_recheck(NodeState& n, NodeId subject, const PoWin& w) {
    auto it = n.keeping.find({subject, w.tournament_no});
    if (it == n.keeping.end() || it->second.record.find(w.auth_tag)) return;
    auto res = keeper_verify(w, it->second.record, true);
    if (res.vote == Vote::Negative) {
        result_.counters["keeper_late_negative"]++;
        cast_negative(n, subject, w, res.evidence);
    }
}

void Engine::cast_negative(NodeState& n, NodeId subject, const PoWin& w,
                           std::optional<std::pair<PoWin, PoWin>> evidence) {
    auto& ks = keeping_for(n, subject, w.tournament_no);
    if (!ks.voted.insert(w.match_id).second) return;
    result_.counters["negative_votes"]++;
    KeeperVoteRecord vote{n.id, subject, w.tournament_no, w.match_id, {}};
    vote.seal();
    if (evidence) {
        if (auto notice = tally_fouls(w.match_id, subject, w.tournament_no, {vote}, cfg_.k, evidence)) {
            ks.condemned.insert(w.match_id);
            broadcast_foul(n, *notice);
        }
    }
    on_vote(n, vote);
    for (NodeId k : keepers_of(subject, w.tournament_no)) {
        if (k != n.id) send(n.id, k, MsgKind::KeeperVote, w.tournament_no, KeeperVotePayload{vote});
    }
}

void Engine::on_vote(NodeState& n, const KeeperVoteRecord& v) {
    if (!v.authentic() || !is_keeper(n.id, v.subject, v.tournament_no) ||
        !is_keeper(v.voter, v.subject, v.tournament_no)) {
        return;
    }
    auto& ks = keeping_for(n, v.subject, v.tournament_no);
    auto& tally = ks.tallies[v.match_id];
    for (const auto& existing : tally) {
        if (existing.voter == v.voter) return;
    }
    tally.push_back(v);
    if (ks.condemned.contains(v.match_id)) return;
    if (auto notice = tally_fouls(v.match_id, v.subject, v.tournament_no, tally, cfg_.k)) {
        ks.condemned.insert(v.match_id);
        broadcast_foul(n, *notice);
    }
}

void Engine::false_alert(NodeState& n, NodeId subject, const PoWin& w) {
    auto& ks = keeping_for(n, subject, w.tournament_no);
    if (!ks.alerted.insert(w.match_id).second) return;
    result_.counters["false_alerts_sent"]++;
    FoulNotice fake;
    fake.match_id = w.match_id;
    fake.subject = subject;
    fake.tournament_no = w.tournament_no;
    fake.total_keepers = cfg_.k;
    fake.negative_votes = cfg_.k;  // claimed without proof
    KeeperVoteRecord own{n.id, subject, w.tournament_no, w.match_id, {}};
    own.seal();
    fake.votes = {own};
    auto msg = make_message(MsgKind::FoulAlert, n.id, w.tournament_no, Hasher().add(fake.id()).add(n.id).finish(),
                            FoulAlertPayload{fake});
    net_.gossip(n.id, std::move(msg));
}

void Engine::broadcast_foul(NodeState& n, const FoulNotice& notice) {
    result_.counters[notice.evidence ? "foul_notices_evidence" : "foul_notices_votes"]++;
    on_foul(n, notice);
    auto msg = make_message(MsgKind::FoulAlert, n.id, notice.tournament_no,
                            Hasher().add(notice.id()).add(n.id).finish(), FoulAlertPayload{notice});
    net_.gossip(n.id, std::move(msg));
}

bool Engine::on_foul(NodeState& n, const FoulNotice& notice) {
    if (!verify_foul_notice(notice, ring_, cfg_.k)) {
        result_.counters["alerts_rejected"]++;
        return false;
    }
    if (!n.fouls_applied.insert(notice.id()).second) return false;
    auto key = std::make_pair(notice.subject, notice.tournament_no);
    n.foul_counts[key]++;
    for (const auto& b : n.store->blocks_by(notice.subject, notice.tournament_no)) n.store->add_foul(b);
    if (n.id == reference_) {
        result_.fouls.push_back({notice.subject, notice.tournament_no, notice.evidence.has_value(), sched_.now()});
    }
    mark_dirty(n);
    return true;
}

void Engine::on_result_query(NodeState& n, const Message& m) {
    const auto& q = m.as<ResultQueryMsg>();
    auto it = n.keeping.find({q.subject, m.tournament_no});
    if (it == n.keeping.end()) return;
    for (const auto& [round, list] : it->second.record.stored_powins) {
        for (const auto& w : list) {
            if (w.match_id == q.match_id) {
                send(n.id, m.origin, MsgKind::ResultAnswer, m.tournament_no, ResultAnswerMsg{q.match_id, w});
                return;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// ledger

void Engine::propose(NodeState& n) {
    const auto t = n.player.t;
    auto& store = *n.store;

    auto cands_it = n.by_tournament.find(t - 1);
    if (t > 1 && cands_it != n.by_tournament.end() && !cands_it->second.empty()) {
        try {
            auto c = std::make_shared<const CBlock>(build_cblock(t - 1, cands_it->second, store));
            if (!store.has_cblock(c->hash)) handle_offer(n, store.offer_cblock(c, sched_.now()));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptySlot) throw;
        }
    }
    std::vector<CBlockHash> tips;
    for (const auto& h : store.tips()) {
        if (store.cblock(h)->tournament_no < t) tips.push_back(h);
    }
    CBlockHash parent = store.genesis();
    if (!tips.empty()) parent = select_heaviest_cblock(tips, store);

    const auto ancestry = store.ancestry(parent);
    TxSkip skip = [&](const Transaction& tx) { return store.spent_in(ancestry, tx); };
    const std::uint64_t room = cfg_.block_bytes - kBlockHeaderBytes;
    auto& pool = supply_.pool();
    if (pool.empty()) supply_.generate(cfg_.tx_rate > 0 ? 0 : cfg_.buckets);

    std::set<std::uint32_t> avoid = n.announced[t];
    std::vector<TxPtr> txs;
    std::uint32_t bucket = 0;
    for (std::uint32_t attempt = 0; attempt < cfg_.buckets && !pool.empty(); ++attempt) {
        bucket = select_bucket(n.rng, pool, avoid);
        txs = supply_.fill(bucket, room, skip);
        if (!txs.empty()) break;
        avoid.insert(bucket);
    }
    if (txs.empty()) {
        result_.counters["empty_proposals"]++;
        return;
    }
    Block::Fields f;
    f.prev_cblock = parent;
    f.bucket_id = bucket;
    f.tournament_no = t;
    f.proposer = n.id;
    f.powin = n.player.wins.back();
    f.txs = std::move(txs);
    auto block = make_block(std::move(f));
    auto r = store.offer_block(block, sched_.now());
    if (r.status != OfferStatus::Accepted) {
        result_.counters["own_block_rejected"]++;
        return;
    }
    handle_offer(n, r);
    result_.proposed.push_back({block, sched_.now()});
    n.announced[t].insert(bucket);
    auto msg = make_message(MsgKind::HeaderAnnounce, n.id, t, block->hash(),
                            HeaderAnnounceMsg{block->hash(), parent, bucket, n.id});
    net_.gossip(n.id, std::move(msg));
}

bool Engine::on_header(NodeState& n, const Message& m) {
    if (!accept_tournament(n, m.tournament_no)) return false;
    const auto& h = m.as<HeaderAnnounceMsg>();
    n.announced[m.tournament_no].insert(h.bucket);
    if (!n.store->has_block(h.block)) request(n, h.block, m.sender);
    return true;
}

void Engine::request(NodeState& n, const Digest& h, NodeId from) {
    if (!n.requested.insert(h).second) return;
    send(n.id, from, MsgKind::BodyRequest, n.tournament(), BodyRequestMsg{h, false});
}

void Engine::on_body_request(NodeState& n, const Message& m) {
    const auto& h = m.as<BodyRequestMsg>().hash;
    if (n.store->has_block(h) || n.store->has_cblock(h)) {
        send_body(n, h, m.origin);
    } else {
        n.waiters[h].push_back(m.origin);
    }
}

void Engine::send_body(NodeState& n, const Digest& h, NodeId to) {
    const auto& store = *n.store;
    BlockBodyMsg body;
    if (store.has_block(h)) {
        body.block = store.block(h);
        if (body.block->prev_cblock() != store.genesis()) body.cblock = store.cblock(body.block->prev_cblock());
    } else {
        body.cblock = store.cblock(h);
    }
    const auto t = body.block ? body.block->tournament_no() : body.cblock->tournament_no;
    send(n.id, to, MsgKind::BlockBody, t, std::move(body));
}

void Engine::serve(NodeState& n, const Digest& h) {
    auto it = n.waiters.find(h);
    if (it == n.waiters.end()) return;
    auto who = std::move(it->second);
    n.waiters.erase(it);
    for (NodeId to : who) send_body(n, h, to);
}

void Engine::on_body(NodeState& n, const Message& m) {
    const auto& b = m.as<BlockBodyMsg>();
    if (b.cblock) ingest_cblock(n, b.cblock, m.sender);
    if (b.block) ingest_block(n, b.block, m.sender);
}

void Engine::ingest_cblock(NodeState& n, const CBlockPtr& c, NodeId from) {
    auto& store = *n.store;
    if (store.has_cblock(c->hash)) return;
    auto r = store.offer_cblock(c, sched_.now());
    handle_offer(n, r);
    if (r.status != OfferStatus::Parked) return;
    if (!store.has_cblock(c->prev_cblock)) request(n, c->prev_cblock, from);
    for (const auto& h : c->included) {
        if (!store.has_block(h)) request(n, h, from);
    }
}

void Engine::ingest_block(NodeState& n, const BlockPtr& b, NodeId from) {
    auto& store = *n.store;
    if (store.has_block(b->hash())) return;
    auto r = store.offer_block(b, sched_.now());
    handle_offer(n, r);
    if (r.status == OfferStatus::Parked && !store.has_cblock(b->prev_cblock())) request(n, b->prev_cblock(), from);
    if (r.status == OfferStatus::Rejected) result_.counters["blocks_rejected"]++;
}

void Engine::handle_offer(NodeState& n, const OfferResult& r) {
    auto& store = *n.store;
    for (const auto& h : r.accepted_blocks) {
        auto b = store.block(h);
        n.by_tournament[b->tournament_no()].push_back(b);
        auto fc = n.foul_counts.find({b->proposer(), b->tournament_no()});
        if (fc != n.foul_counts.end()) store.add_foul(h, fc->second);
        serve(n, h);
    }
    for (const auto& h : r.accepted_cblocks) serve(n, h);
    if (!r.accepted_cblocks.empty()) mark_dirty(n);
}

void Engine::mark_dirty(NodeState& n) {
    if (n.dirty) return;
    n.dirty = true;
    sched_.after(0, [this, &n] { check_confirmations(n); });
}

void Engine::check_confirmations(NodeState& n) {
    n.dirty = false;
    auto& store = *n.store;
    auto tip = select_heaviest_cblock(store.tips(), store);
    auto order = total_order(tip, store);
    const auto m = n.confirmed.size();
    if (order.size() < m || !std::equal(n.confirmed.begin(), n.confirmed.end(), order.begin())) {
        // The heaviest chain no longer extends what was already confirmed.
        n.reversals++;
        result_.counters["reversal_checks"]++;
        return;
    }
    for (std::size_t i = m; i < order.size(); ++i) {
        auto fc = full_confirmations(order[i], tip, store, delta_);
        if (!confirmation_rule(fc, cfg_.f)) break;
        n.confirmed.push_back(order[i]);
        if (n.id == reference_) {
            result_.confirmed_at[order[i]] = sched_.now();
            supply_.settle(*store.block(order[i]));
        }
    }
}

// ---------------------------------------------------------------------------

SimResult Engine::run() {
    result_.config = cfg_;
    result_.reference = reference_;
    result_.qualifiers.assign(cfg_.duration_slots, 0);
    result_.start_time = oracle_.genesis_time;
    result_.end_time = oracle_.slot_start(cfg_.duration_slots + 1);

    // Arrivals in one-second batches; the function outlives every scheduled copy.
    std::function<void()> tick;
    if (cfg_.tx_rate > 0) {
        auto carry = std::make_shared<double>(0.0);
        tick = [this, carry, &tick] {
            *carry += cfg_.tx_rate;
            auto whole = static_cast<std::size_t>(*carry);
            *carry -= static_cast<double>(whole);
            supply_.generate(whole);
            if (sched_.now() + 1 < result_.end_time) sched_.after(1.0, tick);
        };
        sched_.at(0, tick);
    }
    for (auto& n : nodes_) {
        auto c = resync(n.id, oracle_, oracle_.genesis_time, n.offset);
        sched_.at(c.issued_at, [this, &n, c] {
            if (n.slot_epoch == 0) start_slot(n, c);
        });
    }
    sched_.run_until(result_.end_time);
    for (auto& n : nodes_) {
        if (n.dirty) check_confirmations(n);
    }

    const auto& ref = nodes_[reference_];
    result_.final_tip = select_heaviest_cblock(ref.store->tips(), *ref.store);
    for (auto& n : nodes_) {
        NodeOutcome o;
        o.id = n.id;
        o.honest = n.adv.honest();
        o.profile = n.adv;
        o.confirmed = n.confirmed;
        o.reversals = n.reversals;
        o.resyncs = n.resyncs;
        result_.nodes.push_back(std::move(o));
    }
    result_.reference_store = std::shared_ptr<const LedgerStore>(std::move(nodes_[reference_].store));
    result_.traffic = net_.stats();
    result_.trace_digest = net_.trace_digest();
    result_.events = sched_.executed();
    result_.counters["tx_generated"] = supply_.generated();
    result_.counters["tx_twins"] = supply_.twins();
    return std::move(result_);
}

}  // namespace

SimResult run_simulation(const SimConfig& config, std::ostream* trace) {
    config.validate();
    Engine e(config, trace);
    return e.run();
}

}  // namespace cdag
