#include "cdag/bucketing.hpp"

#include "cdag/errors.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace cdag {

namespace {

template <typename T>
bool sorted_overlap(const std::vector<T>& a, const std::vector<T>& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i == *j) return true;
        if (*i < *j) {
            ++i;
        } else {
            ++j;
        }
    }
    return false;
}

}  // namespace

std::uint32_t bucket_of(const TxHash& tx_hash, std::uint32_t b) {
    if (b == 0) throw Error(ErrorCode::InvalidParameter, "bucket count must be at least 1");
    return static_cast<std::uint32_t>(tx_hash.mod(b));
}

TxPool::TxPool(std::uint32_t bucket_count) {
    if (bucket_count == 0) throw Error(ErrorCode::InvalidParameter, "bucket count must be at least 1");
    buckets_.resize(bucket_count);
}

bool TxPool::add(TxPtr tx) {
    auto id = bucket_of(tx->hash, bucket_count());
    if (!index_.emplace(tx->hash, id).second) return false;
    buckets_[id].push_back(std::move(tx));
    return true;
}

bool TxPool::remove(const TxHash& hash) {
    auto it = index_.find(hash);
    if (it == index_.end()) return false;
    auto& q = buckets_[it->second];
    q.erase(std::find_if(q.begin(), q.end(), [&](const TxPtr& tx) { return tx->hash == hash; }));
    index_.erase(it);
    return true;
}

std::size_t TxPool::remove_all(const std::vector<TxHash>& hashes) {
    std::unordered_set<TxHash> doomed;
    std::set<std::uint32_t> touched;
    for (const auto& h : hashes) {
        auto it = index_.find(h);
        if (it == index_.end()) continue;
        touched.insert(it->second);
        doomed.insert(h);
        index_.erase(it);
    }
    for (auto b : touched) {
        std::erase_if(buckets_[b], [&](const TxPtr& tx) { return doomed.contains(tx->hash); });
    }
    return doomed.size();
}

std::vector<std::uint32_t> TxPool::non_empty_buckets() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t i = 0; i < buckets_.size(); ++i) {
        if (!buckets_[i].empty()) out.push_back(i);
    }
    return out;
}

std::uint32_t TxPool::bucket_id_of(const TxHash& hash) const {
    auto it = index_.find(hash);
    if (it == index_.end()) throw Error(ErrorCode::NotFound, "transaction not pooled: " + hash.short_hex());
    return it->second;
}

std::uint32_t select_bucket(Rng& rng, const TxPool& pool, const std::set<std::uint32_t>& announced) {
    auto non_empty = pool.non_empty_buckets();
    if (non_empty.empty()) throw Error(ErrorCode::NoTransactions, "transaction pool is empty");
    std::vector<std::uint32_t> eligible;
    for (auto b : non_empty) {
        if (!announced.contains(b)) eligible.push_back(b);
    }
    const auto& from = eligible.empty() ? non_empty : eligible;
    std::uniform_int_distribution<std::size_t> pick(0, from.size() - 1);
    return from[pick(rng)];
}

std::vector<TxPtr> fill_block(std::uint32_t bucket, const TxPool& pool, std::uint64_t max_bytes,
                              const TxSkip& skip, std::size_t start) {
    const auto& queue = pool.bucket(bucket);
    std::vector<TxPtr> out;
    std::unordered_set<SpendRef> spent;
    std::uint64_t used = 0;
    for (std::size_t i = start; i < queue.size(); ++i) {
        const auto& tx = queue[i];
        if (std::any_of(tx->inputs.begin(), tx->inputs.end(), [&](SpendRef r) { return spent.contains(r); })) {
            continue;
        }
        if (skip && skip(*tx)) continue;
        if (used + tx->byte_size > max_bytes) break;
        used += tx->byte_size;
        spent.insert(tx->inputs.begin(), tx->inputs.end());
        out.push_back(tx);
    }
    return out;
}

const char* to_string(ConflictKind kind) {
    switch (kind) {
        case ConflictKind::None: return "None";
        case ConflictKind::Intersecting: return "Intersecting";
        case ConflictKind::DoubleSpend: return "DoubleSpend";
    }
    return "?";
}

ConflictKind conflicts(const Block& a, const Block& b) {
    if (&a == &b || a.hash() == b.hash()) {
        return a.txs().empty() ? ConflictKind::None : ConflictKind::Intersecting;
    }
    if (sorted_overlap(a.sorted_tx_hashes(), b.sorted_tx_hashes())) return ConflictKind::Intersecting;
    if (sorted_overlap(a.sorted_inputs(), b.sorted_inputs())) return ConflictKind::DoubleSpend;
    return ConflictKind::None;
}

bool shares_input(const Block& a, const Block& b) { return sorted_overlap(a.sorted_inputs(), b.sorted_inputs()); }

std::size_t remove_confirmed(TxPool& pool, const Block& block) {
    const auto& spent = block.sorted_inputs();
    std::vector<TxHash> doomed;
    for (std::uint32_t b = 0; b < pool.bucket_count(); ++b) {
        for (const auto& tx : pool.bucket(b)) {
            bool hit = std::binary_search(block.sorted_tx_hashes().begin(), block.sorted_tx_hashes().end(), tx->hash);
            if (!hit) {
                hit = std::any_of(tx->inputs.begin(), tx->inputs.end(),
                                  [&](SpendRef r) { return std::binary_search(spent.begin(), spent.end(), r); });
            }
            if (hit) doomed.push_back(tx->hash);
        }
    }
    return pool.remove_all(doomed);
}

}  // namespace cdag
