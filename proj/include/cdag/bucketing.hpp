#pragma once

#include "cdag/block.hpp"
#include "cdag/digest.hpp"

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <set>
#include <unordered_map>
#include <vector>

namespace cdag {

using Rng = std::mt19937_64;

/// bucket id = (transaction hash as big-endian unsigned integer) mod b.
std::uint32_t bucket_of(const TxHash& tx_hash, std::uint32_t b);

/// Unconfirmed transactions split into B disjoint, arrival-ordered queues.
/// A transaction always lives in queue bucket_of(hash, B) and nowhere else.
class TxPool {
public:
    explicit TxPool(std::uint32_t bucket_count);

    std::uint32_t bucket_count() const { return static_cast<std::uint32_t>(buckets_.size()); }

    /// Appends to the tail of the transaction's bucket. Returns false for a
    /// transaction already pooled.
    bool add(TxPtr tx);
    bool remove(const TxHash& hash);
    /// Batch removal, one pass per touched bucket. Returns how many were pooled.
    std::size_t remove_all(const std::vector<TxHash>& hashes);
    bool contains(const TxHash& hash) const { return index_.contains(hash); }

    const std::deque<TxPtr>& bucket(std::uint32_t id) const { return buckets_.at(id); }
    std::size_t size() const { return index_.size(); }
    bool empty() const { return index_.empty(); }
    std::vector<std::uint32_t> non_empty_buckets() const;

    /// Bucket id recorded for a pooled transaction.
    std::uint32_t bucket_id_of(const TxHash& hash) const;

private:
    std::vector<std::deque<TxPtr>> buckets_;
    std::unordered_map<TxHash, std::uint32_t> index_;
};

/// Uniform choice among non-empty buckets not yet announced by another
/// proposer; when every non-empty bucket is announced, any non-empty bucket.
/// Throws NoTransactions for an empty pool.
std::uint32_t select_bucket(Rng& rng, const TxPool& pool, const std::set<std::uint32_t>& announced);

/// Predicate telling fill_block to pass over a transaction (for example one
/// already settled in the proposer's chain).
using TxSkip = std::function<bool(const Transaction&)>;

/// FIFO prefix of one bucket that fits in `max_bytes`. Transactions that
/// double-spend an earlier pick, or that `skip` rejects, are passed over; the
/// scan stops at the first transaction that would overflow the budget.
/// `start` lets a caller resume past a prefix it knows is settled.
std::vector<TxPtr> fill_block(std::uint32_t bucket, const TxPool& pool, std::uint64_t max_bytes,
                              const TxSkip& skip = {}, std::size_t start = 0);

enum class ConflictKind { None, Intersecting, DoubleSpend };

const char* to_string(ConflictKind kind);

/// Intersecting when the blocks share a transaction, else DoubleSpend when
/// they share a spend reference, else None.
ConflictKind conflicts(const Block& a, const Block& b);

/// The blocks share a spend reference. Cheaper than conflicts() when the tx
/// sets are already known to be disjoint.
bool shares_input(const Block& a, const Block& b);

/// Drops the block's transactions and every pooled transaction that
/// double-spends one of them. Returns the number removed.
std::size_t remove_confirmed(TxPool& pool, const Block& block);

}  // namespace cdag
