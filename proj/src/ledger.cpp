#include "cdag/ledger.hpp"

#include "cdag/bucketing.hpp"
#include "cdag/errors.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <set>

namespace cdag {

// ---------------------------------------------------------------------------
// CBlock

CBlockHash CBlock::compute_hash(std::uint64_t tournament_no, const CBlockHash& prev,
                                const std::vector<BlockHash>& included) {
    Hasher h;
    h.add("cblock").add(tournament_no).add(prev).add(static_cast<std::uint64_t>(included.size()));
    for (const auto& b : included) h.add(b);
    return h.finish();
}

CBlock CBlock::make(std::uint64_t tournament_no, const CBlockHash& prev, std::vector<BlockHash> included) {
    std::sort(included.begin(), included.end());
    included.erase(std::unique(included.begin(), included.end()), included.end());
    CBlock c;
    c.tournament_no = tournament_no;
    c.prev_cblock = prev;
    c.included = std::move(included);
    c.hash = compute_hash(c.tournament_no, c.prev_cblock, c.included);
    return c;
}

CBlock CBlock::genesis() {
    CBlock g;
    g.hash = Hasher().add("cdag-genesis").finish();
    return g;
}

bool CBlock::includes(const BlockHash& h) const { return std::binary_search(included.begin(), included.end(), h); }

// ---------------------------------------------------------------------------
// SpendIndex

void SpendIndex::register_block(const Block& block) {
    if (!registered_.insert(block.hash()).second) return;
    for (auto ref : block.sorted_inputs()) by_ref_[ref].push_back(block.hash());
}

const std::vector<BlockHash>* SpendIndex::spenders(SpendRef ref) const {
    auto it = by_ref_.find(ref);
    return it == by_ref_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------------------------
// Violations

const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::UnknownParent: return "UnknownParent";
        case ViolationKind::BucketMismatch: return "BucketMismatch";
        case ViolationKind::InternalConflict: return "InternalConflict";
        case ViolationKind::AncestorDoubleSpend: return "AncestorDoubleSpend";
        case ViolationKind::BadPoWin: return "BadPoWin";
        case ViolationKind::Oversize: return "Oversize";
        case ViolationKind::StaleTournament: return "StaleTournament";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// LedgerStore

namespace {
const std::vector<CBlockHash> kNoHashes;
}

LedgerStore::LedgerStore(LedgerParams params, std::shared_ptr<SpendIndex> index)
    : params_(params), index_(index ? std::move(index) : std::make_shared<SpendIndex>()) {
    auto g = std::make_shared<const CBlock>(CBlock::genesis());
    genesis_ = g->hash;
    cblocks_.emplace(genesis_, g);
    depth_.emplace(genesis_, 0);
}

BlockPtr LedgerStore::block(const BlockHash& h) const {
    auto it = blocks_.find(h);
    if (it == blocks_.end()) throw Error(ErrorCode::NotFound, "unknown block " + h.short_hex());
    return it->second;
}

CBlockPtr LedgerStore::cblock(const CBlockHash& h) const {
    auto it = cblocks_.find(h);
    if (it == cblocks_.end()) throw Error(ErrorCode::NotFound, "unknown C-Block " + h.short_hex());
    return it->second;
}

std::uint32_t LedgerStore::foul_count(const BlockHash& h) const {
    auto it = fouls_.find(h);
    return it == fouls_.end() ? 0 : it->second;
}

void LedgerStore::add_foul(const BlockHash& h, std::uint32_t count) {
    fouls_[h] += count;
    weight_cache_.clear();
}

std::vector<CBlockHash> LedgerStore::tips() const {
    std::vector<CBlockHash> out;
    for (const auto& [h, c] : cblocks_) {
        auto it = children_.find(h);
        if (it == children_.end() || it->second.empty()) out.push_back(h);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t LedgerStore::depth(const CBlockHash& h) const {
    auto it = depth_.find(h);
    if (it == depth_.end()) throw Error(ErrorCode::NotFound, "unknown C-Block " + h.short_hex());
    return it->second;
}

const std::vector<CBlockHash>& LedgerStore::children(const CBlockHash& h) const {
    auto it = children_.find(h);
    return it == children_.end() ? kNoHashes : it->second;
}

const std::vector<CBlockHash>& LedgerStore::including_cblocks(const BlockHash& h) const {
    auto it = including_.find(h);
    return it == including_.end() ? kNoHashes : it->second;
}

bool LedgerStore::is_ancestor(const CBlockHash& ancestor, const CBlockHash& descendant) const {
    auto da = depth(ancestor);
    auto dd = depth(descendant);
    if (da > dd) return false;
    CBlockHash cur = descendant;
    for (auto d = dd; d > da; --d) cur = cblocks_.at(cur)->prev_cblock;
    return cur == ancestor;
}

Ancestry LedgerStore::ancestry(const CBlockHash& tip) const {
    Ancestry out;
    CBlockHash cur = tip;
    while (true) {
        auto it = cblocks_.find(cur);
        if (it == cblocks_.end()) throw Error(ErrorCode::CorruptStore, "dangling ancestry at " + cur.short_hex());
        out.insert(cur);
        if (cur == genesis_) break;
        cur = it->second->prev_cblock;
    }
    return out;
}

bool LedgerStore::spent_in(const Ancestry& ancestry, const Transaction& tx, const BlockHash* ignore) const {
    for (auto ref : tx.inputs) {
        const auto* spenders = index_->spenders(ref);
        if (spenders == nullptr) continue;
        for (const auto& b : *spenders) {
            if (ignore != nullptr && b == *ignore) continue;
            auto it = including_.find(b);
            if (it == including_.end()) continue;
            for (const auto& c : it->second) {
                if (ancestry.contains(c)) return true;
            }
        }
    }
    return false;
}

std::int64_t LedgerStore::cached_chain_weight(const CBlockHash& tip) const {
    if (auto it = weight_cache_.find(tip); it != weight_cache_.end()) return it->second;
    // Iterative walk back to the nearest cached ancestor.
    std::vector<CBlockHash> path;
    CBlockHash cur = tip;
    std::int64_t base = 0;
    while (true) {
        if (auto it = weight_cache_.find(cur); it != weight_cache_.end()) {
            base = it->second;
            break;
        }
        if (cur == genesis_) {
            weight_cache_[genesis_] = 0;
            base = 0;
            break;
        }
        auto c = cblocks_.find(cur);
        if (c == cblocks_.end()) throw Error(ErrorCode::CorruptStore, "dangling ancestry at " + cur.short_hex());
        path.push_back(cur);
        cur = c->second->prev_cblock;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        const auto& c = cblocks_.at(*it);
        for (const auto& b : c->included) {
            auto f = foul_count(b);
            base += f >= params_.alpha ? 0 : static_cast<std::int64_t>(params_.alpha - f);
        }
        weight_cache_[*it] = base;
    }
    return base;
}

std::vector<BlockHash> LedgerStore::blocks_by(NodeId proposer, std::uint64_t tournament_no) const {
    auto it = by_proposer_.find({proposer, tournament_no});
    return it == by_proposer_.end() ? std::vector<BlockHash>{} : it->second;
}

std::size_t LedgerStore::pending_count() const { return parked_ids_.size(); }

void LedgerStore::park(const Digest& missing, Parked item) {
    const Digest id = item.block ? item.block->hash() : item.cblock->hash;
    if (!parked_ids_.insert(id).second) return;
    pending_[missing].push_back(std::move(item));
}

std::size_t LedgerStore::evict_pending(double now, double max_age) {
    std::size_t dropped = 0;
    for (auto it = pending_.begin(); it != pending_.end();) {
        auto& items = it->second;
        auto keep = std::stable_partition(items.begin(), items.end(),
                                          [&](const Parked& p) { return now - p.since <= max_age; });
        for (auto p = keep; p != items.end(); ++p) {
            parked_ids_.erase(p->block ? p->block->hash() : p->cblock->hash);
            ++dropped;
        }
        items.erase(keep, items.end());
        it = items.empty() ? pending_.erase(it) : std::next(it);
    }
    return dropped;
}

void LedgerStore::admit_block(const BlockPtr& b) {
    index_->register_block(*b);
    by_proposer_[{b->proposer(), b->tournament_no()}].push_back(b->hash());
    blocks_.emplace(b->hash(), b);
}

void LedgerStore::admit_cblock(const CBlockPtr& c) {
    depth_.emplace(c->hash, depth_.at(c->prev_cblock) + 1);
    children_[c->prev_cblock].push_back(c->hash);
    for (const auto& b : c->included) including_[b].push_back(c->hash);
    cblocks_.emplace(c->hash, c);
}

void LedgerStore::release(const Digest& arrived, double now, OfferResult& out) {
    auto it = pending_.find(arrived);
    if (it == pending_.end()) return;
    auto items = std::move(it->second);
    pending_.erase(it);
    for (auto& p : items) {
        parked_ids_.erase(p.block ? p.block->hash() : p.cblock->hash);
        auto r = p.block ? try_block(p.block, p.since) : try_cblock(p.cblock, p.since);
        out.accepted_blocks.insert(out.accepted_blocks.end(), r.accepted_blocks.begin(), r.accepted_blocks.end());
        out.accepted_cblocks.insert(out.accepted_cblocks.end(), r.accepted_cblocks.begin(),
                                    r.accepted_cblocks.end());
    }
    (void)now;
}

OfferResult LedgerStore::try_block(BlockPtr block, double now) {
    OfferResult r;
    const auto h = block->hash();
    if (blocks_.contains(h) || rejected_.contains(h)) return r;
    if (!cblocks_.contains(block->prev_cblock())) {
        r.status = OfferStatus::Parked;
        r.missing = block->prev_cblock();
        park(block->prev_cblock(), Parked{block, nullptr, now});
        return r;
    }
    r.violations = validate_block(*block, *this, params_);
    if (!r.violations.empty()) {
        rejected_.insert(h);
        r.status = OfferStatus::Rejected;
        return r;
    }
    admit_block(block);
    r.status = OfferStatus::Accepted;
    r.accepted_blocks.push_back(h);
    release(h, now, r);
    return r;
}

OfferResult LedgerStore::try_cblock(CBlockPtr cblock, double now) {
    OfferResult r;
    const auto h = cblock->hash;
    if (cblocks_.contains(h) || rejected_.contains(h)) return r;
    std::optional<Digest> missing;
    if (!cblocks_.contains(cblock->prev_cblock)) {
        missing = cblock->prev_cblock;
    } else {
        for (const auto& b : cblock->included) {
            if (!blocks_.contains(b)) {
                missing = b;
                break;
            }
        }
    }
    if (missing) {
        r.status = OfferStatus::Parked;
        r.missing = missing;
        park(*missing, Parked{nullptr, cblock, now});
        return r;
    }
    r.violations = validate_cblock(*cblock, *this);
    if (!r.violations.empty()) {
        rejected_.insert(h);
        r.status = OfferStatus::Rejected;
        return r;
    }
    admit_cblock(cblock);
    r.status = OfferStatus::Accepted;
    r.accepted_cblocks.push_back(h);
    release(h, now, r);
    return r;
}

OfferResult LedgerStore::offer_block(BlockPtr block, double now) {
    if (blocks_.contains(block->hash()) || parked_ids_.contains(block->hash())) return {};
    return try_block(std::move(block), now);
}

OfferResult LedgerStore::offer_cblock(CBlockPtr cblock, double now) {
    if (cblocks_.contains(cblock->hash) || parked_ids_.contains(cblock->hash)) return {};
    return try_cblock(std::move(cblock), now);
}

// ---------------------------------------------------------------------------
// Free operations

std::uint64_t compute_delta(std::uint64_t n, std::uint32_t alpha) {
    if (n < 1) throw Error(ErrorCode::InvalidParameter, "node count must be at least 1");
    if (alpha < 1) throw Error(ErrorCode::InvalidParameter, "alpha must be at least 1");
    if (alpha >= 64 || (std::uint64_t{1} << alpha) > n) {
        throw Error(ErrorCode::InvalidParameter, "alpha too large for node count: 2^alpha must not exceed n");
    }
    return n >> alpha;
}

std::int64_t block_weight(const BlockHash& block, const LedgerStore& store, std::uint32_t alpha) {
    if (!store.has_block(block)) throw Error(ErrorCode::NotFound, "unknown block " + block.short_hex());
    auto f = store.foul_count(block);
    return f >= alpha ? 0 : static_cast<std::int64_t>(alpha - f);
}

std::int64_t chain_weight(const CBlockHash& tip, const LedgerStore& store) {
    if (!store.has_cblock(tip)) throw Error(ErrorCode::CorruptStore, "dangling ancestry at " + tip.short_hex());
    return store.cached_chain_weight(tip);
}

CBlockHash select_heaviest_cblock(const std::vector<CBlockHash>& tips, const LedgerStore& store) {
    if (tips.empty()) throw Error(ErrorCode::InvalidParameter, "no tips to choose from");
    CBlockHash best = tips.front();
    auto best_w = chain_weight(best, store);
    for (std::size_t i = 1; i < tips.size(); ++i) {
        auto w = chain_weight(tips[i], store);
        if (w > best_w || (w == best_w && tips[i] < best)) {
            best = tips[i];
            best_w = w;
        }
    }
    return best;
}

namespace {

std::int64_t weight_of(const BlockHash& h, const LedgerStore& store) {
    auto alpha = store.params().alpha;
    auto f = store.foul_count(h);
    return f >= alpha ? 0 : static_cast<std::int64_t>(alpha - f);
}

bool blocks_clash(const Block& a, const Block& b) {
    return a.bucket_id() == b.bucket_id() || conflicts(a, b) != ConflictKind::None;
}

struct Choice {
    std::int64_t weight = -1;
    std::vector<std::size_t> members;  // indices into the group
    std::vector<NodeId> proposers;     // sorted
    std::vector<BlockHash> hashes;     // sorted
};

bool better(const Choice& a, const Choice& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
    if (a.proposers != b.proposers) return a.proposers < b.proposers;
    return a.hashes < b.hashes;
}

/// Exact maximum-weight independent set of one conflict component by branch
/// and bound. Components past `kExactLimit` vertices fall back to a greedy
/// heaviest-first pass.
class IndependentSetSolver {
public:
    static constexpr std::size_t kExactLimit = 40;

    IndependentSetSolver(const std::vector<BlockPtr>& group, const std::vector<std::int64_t>& weights,
                         const std::vector<std::vector<bool>>& clash)
        : group_(group), weights_(weights), clash_(clash) {}

    Choice solve(std::vector<std::size_t> vertices) {
        std::sort(vertices.begin(), vertices.end(), [&](std::size_t a, std::size_t b) {
            if (weights_[a] != weights_[b]) return weights_[a] > weights_[b];
            if (group_[a]->proposer() != group_[b]->proposer()) return group_[a]->proposer() < group_[b]->proposer();
            return group_[a]->hash() < group_[b]->hash();
        });
        order_ = vertices;
        best_ = Choice{};
        if (order_.size() > kExactLimit) {
            std::vector<std::size_t> chosen;
            for (auto v : order_) {
                if (std::none_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return clash_[v][c]; })) {
                    chosen.push_back(v);
                }
            }
            consider(chosen);
            return best_;
        }
        suffix_.assign(order_.size() + 1, 0);
        for (std::size_t i = order_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + weights_[order_[i]];
        std::vector<std::size_t> chosen;
        recurse(0, 0, chosen);
        return best_;
    }

private:
    void consider(const std::vector<std::size_t>& chosen) {
        Choice c;
        c.weight = 0;
        c.members = chosen;
        for (auto v : chosen) {
            c.weight += weights_[v];
            c.proposers.push_back(group_[v]->proposer());
            c.hashes.push_back(group_[v]->hash());
        }
        std::sort(c.members.begin(), c.members.end());
        std::sort(c.proposers.begin(), c.proposers.end());
        std::sort(c.hashes.begin(), c.hashes.end());
        if (best_.weight < 0 || better(c, best_)) best_ = std::move(c);
    }

    void recurse(std::size_t i, std::int64_t weight, std::vector<std::size_t>& chosen) {
        if (best_.weight >= 0 && weight + suffix_[i] < best_.weight) return;
        if (i == order_.size()) {
            consider(chosen);
            return;
        }
        auto v = order_[i];
        bool free = std::none_of(chosen.begin(), chosen.end(), [&](std::size_t c) { return clash_[v][c]; });
        if (free) {
            chosen.push_back(v);
            recurse(i + 1, weight + weights_[v], chosen);
            chosen.pop_back();
        }
        recurse(i + 1, weight, chosen);
    }

    const std::vector<BlockPtr>& group_;
    const std::vector<std::int64_t>& weights_;
    const std::vector<std::vector<bool>>& clash_;
    std::vector<std::size_t> order_;
    std::vector<std::int64_t> suffix_;
    Choice best_;
};

/// Best subset of one same-parent group: exact per connected component.
std::vector<BlockPtr> best_subset(const std::vector<BlockPtr>& group, const LedgerStore& store) {
    const auto n = group.size();
    std::vector<std::int64_t> weights(n);
    for (std::size_t i = 0; i < n; ++i) weights[i] = weight_of(group[i]->hash(), store);
    std::vector<std::vector<bool>> clash(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            clash[i][j] = clash[j][i] = blocks_clash(*group[i], *group[j]);
        }
    }
    std::vector<int> component(n, -1);
    int components = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (component[s] >= 0) continue;
        std::vector<std::size_t> stack{s};
        component[s] = components;
        while (!stack.empty()) {
            auto v = stack.back();
            stack.pop_back();
            for (std::size_t u = 0; u < n; ++u) {
                if (clash[v][u] && component[u] < 0) {
                    component[u] = components;
                    stack.push_back(u);
                }
            }
        }
        ++components;
    }
    IndependentSetSolver solver(group, weights, clash);
    std::vector<BlockPtr> out;
    for (int c = 0; c < components; ++c) {
        std::vector<std::size_t> vertices;
        for (std::size_t v = 0; v < n; ++v) {
            if (component[v] == c) vertices.push_back(v);
        }
        auto choice = solver.solve(vertices);
        for (auto v : choice.members) out.push_back(group[v]);
    }
    return out;
}

}  // namespace

CBlock build_cblock(std::uint64_t tournament_no, const std::vector<BlockPtr>& candidates, const LedgerStore& store) {
    std::map<CBlockHash, std::vector<BlockPtr>> groups;
    std::set<BlockHash> seen;
    for (const auto& b : candidates) {
        if (!b || !seen.insert(b->hash()).second) continue;
        if (!store.has_cblock(b->prev_cblock())) continue;
        groups[b->prev_cblock()].push_back(b);
    }
    std::optional<CBlock> best;
    std::int64_t best_weight = 0;
    for (auto& [prev, group] : groups) {
        auto chosen = best_subset(group, store);
        if (chosen.empty()) continue;
        std::int64_t w = chain_weight(prev, store);
        std::vector<BlockHash> hashes;
        for (const auto& b : chosen) {
            w += weight_of(b->hash(), store);
            hashes.push_back(b->hash());
        }
        auto c = CBlock::make(tournament_no, prev, std::move(hashes));
        if (!best || w > best_weight || (w == best_weight && c.hash < best->hash)) {
            best = std::move(c);
            best_weight = w;
        }
    }
    if (!best) throw Error(ErrorCode::EmptySlot, "no usable candidate block for tournament " + std::to_string(tournament_no));
    return *best;
}

std::vector<Violation> validate_block(const Block& block, const LedgerStore& store, const LedgerParams& params) {
    std::vector<Violation> out;
    const bool parent_known = store.has_cblock(block.prev_cblock());
    if (!parent_known) {
        out.push_back({ViolationKind::UnknownParent, "previous C-Block " + block.prev_cblock().short_hex() + " unknown"});
    }
    if (block.bucket_id() >= params.bucket_count) {
        out.push_back({ViolationKind::BucketMismatch, "bucket id out of range"});
    } else if (!block.txs_in_bucket(params.bucket_count)) {
        out.push_back({ViolationKind::BucketMismatch, "a transaction hashes outside the block's bucket"});
    }
    if (block.has_internal_conflict()) {
        out.push_back({ViolationKind::InternalConflict, "two transactions share a spend reference"});
    }
    if (parent_known) {
        auto anc = store.ancestry(block.prev_cblock());
        for (const auto& tx : block.txs()) {
            if (store.spent_in(anc, *tx, &block.hash())) {
                out.push_back({ViolationKind::AncestorDoubleSpend, "tx " + tx->hash.short_hex() + " already spent"});
                break;
            }
        }
        if (block.tournament_no() <= store.cblock(block.prev_cblock())->tournament_no) {
            out.push_back({ViolationKind::StaleTournament, "block tournament not after its parent's"});
        }
    }
    const auto& p = block.powin();
    if (!p.structurally_valid() || p.round != params.alpha || p.winner != block.proposer() ||
        p.tournament_no != block.tournament_no()) {
        out.push_back({ViolationKind::BadPoWin, "PoWin does not prove a round-alpha win by the proposer"});
    }
    if (block.byte_size() > params.max_block_bytes) {
        out.push_back({ViolationKind::Oversize, std::to_string(block.byte_size()) + " bytes over limit"});
    }
    return out;
}

std::vector<Violation> validate_cblock(const CBlock& c, const LedgerStore& store) {
    std::vector<Violation> out;
    if (c.hash != CBlock::compute_hash(c.tournament_no, c.prev_cblock, c.included)) {
        out.push_back({ViolationKind::BadPoWin, "C-Block hash does not match content"});
    }
    if (c.included.empty() || !std::is_sorted(c.included.begin(), c.included.end()) ||
        std::adjacent_find(c.included.begin(), c.included.end()) != c.included.end()) {
        out.push_back({ViolationKind::InternalConflict, "included list empty or not strictly sorted"});
        return out;
    }
    if (!store.has_cblock(c.prev_cblock)) {
        out.push_back({ViolationKind::UnknownParent, "previous C-Block unknown"});
        return out;
    }
    if (c.tournament_no <= store.cblock(c.prev_cblock)->tournament_no) {
        out.push_back({ViolationKind::StaleTournament, "C-Block tournament not after its parent's"});
    }
    std::vector<BlockPtr> blocks;
    for (const auto& h : c.included) {
        if (!store.has_block(h)) {
            out.push_back({ViolationKind::UnknownParent, "included block " + h.short_hex() + " unknown"});
            return out;
        }
        blocks.push_back(store.block(h));
    }
    for (const auto& b : blocks) {
        if (b->prev_cblock() != c.prev_cblock) {
            out.push_back({ViolationKind::UnknownParent, "included block extends a different C-Block"});
        }
        if (b->tournament_no() != c.tournament_no) {
            out.push_back({ViolationKind::StaleTournament, "included block from another tournament"});
        }
    }
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        for (std::size_t j = i + 1; j < blocks.size(); ++j) {
            if (blocks[i]->bucket_id() == blocks[j]->bucket_id()) {
                out.push_back({ViolationKind::BucketMismatch, "two included blocks share a bucket"});
            } else if (shares_input(*blocks[i], *blocks[j])) {
                // Distinct buckets of stored blocks cannot share a tx hash.
                out.push_back({ViolationKind::AncestorDoubleSpend, "included blocks conflict"});
            }
        }
    }
    return out;
}

namespace {

std::vector<CBlockPtr> path_from_genesis(const CBlockHash& tip, const LedgerStore& store) {
    std::vector<CBlockPtr> path;
    CBlockHash cur = tip;
    while (true) {
        if (!store.has_cblock(cur)) throw Error(ErrorCode::CorruptStore, "dangling ancestry at " + cur.short_hex());
        auto c = store.cblock(cur);
        if (cur == store.genesis()) break;
        path.push_back(c);
        cur = c->prev_cblock;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

std::vector<BlockHash> total_order(const CBlockHash& tip, const LedgerStore& store) {
    std::vector<BlockHash> out;
    for (const auto& c : path_from_genesis(tip, store)) out.insert(out.end(), c->included.begin(), c->included.end());
    return out;
}

FullConfirmations full_confirmations(const BlockHash& block, const CBlockHash& tip, const LedgerStore& store,
                                     std::uint64_t delta) {
    if (delta == 0) throw Error(ErrorCode::InvalidParameter, "delta must be positive");
    if (!store.has_cblock(tip)) throw Error(ErrorCode::NotFound, "unknown tip " + tip.short_hex());
    FullConfirmations fc;
    CBlockHash cur = tip;
    while (cur != store.genesis()) {
        auto c = store.cblock(cur);
        if (c->includes(block)) {
            fc.count = fc.blocks_ahead / delta;
            fc.tournaments_spanned = store.cblock(tip)->tournament_no - c->tournament_no;
            return fc;
        }
        fc.blocks_ahead += c->included.size();
        if (!store.has_cblock(c->prev_cblock)) throw Error(ErrorCode::CorruptStore, "dangling ancestry");
        cur = c->prev_cblock;
    }
    throw Error(ErrorCode::NotInChain, "block " + block.short_hex() + " not in ancestry of tip");
}

bool confirmation_rule(const FullConfirmations& fc, std::uint64_t f_min) {
    // Taking x = count is optimal: larger x fails count >= x, smaller x only
    // tightens spanned < 2x.
    return fc.count >= f_min && fc.count >= 1 && fc.tournaments_spanned < 2 * fc.count;
}

bool is_confirmed(const BlockHash& block, const CBlockHash& tip, const LedgerStore& store, std::uint64_t delta,
                  std::uint64_t f_min) {
    return confirmation_rule(full_confirmations(block, tip, store, delta), f_min);
}

}  // namespace cdag
