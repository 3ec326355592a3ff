#pragma once

#include "cdag/digest.hpp"
#include "cdag/powin.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cdag {

/// Opaque reference to the funds a transaction spends. Two transactions that
/// share a spend reference double-spend each other.
using SpendRef = std::uint64_t;

struct Transaction {
    TxHash hash;
    std::vector<SpendRef> inputs;  // sorted, unique
    std::uint32_t byte_size = 0;
    std::string payload;

    static Transaction make(std::vector<SpendRef> inputs, std::string payload, std::uint32_t byte_size);
    static TxHash compute_hash(const std::vector<SpendRef>& inputs, const std::string& payload);

    /// True when the two transactions share at least one spend reference.
    bool double_spends(const Transaction& other) const;
};

using TxPtr = std::shared_ptr<const Transaction>;

/// Fixed per-block overhead in bytes (header fields plus the attached PoWin).
inline constexpr std::uint64_t kBlockHeaderBytes = 480;

/// A proposer's batch of transactions drawn from one bucket.
///
/// Blocks are immutable once built and are shared between simulated nodes by
/// pointer. Sorted tx-hash and spend-reference vectors are cached at build time
/// for linear-time conflict checks.
class Block {
public:
    struct Fields {
        CBlockHash prev_cblock;
        std::uint32_t bucket_id = 0;
        std::uint64_t tournament_no = 0;
        NodeId proposer = 0;
        PoWin powin;
        std::vector<TxPtr> txs;
    };

    explicit Block(Fields fields);

    const BlockHash& hash() const { return hash_; }
    const CBlockHash& prev_cblock() const { return f_.prev_cblock; }
    std::uint32_t bucket_id() const { return f_.bucket_id; }
    std::uint64_t tournament_no() const { return f_.tournament_no; }
    NodeId proposer() const { return f_.proposer; }
    const PoWin& powin() const { return f_.powin; }
    const std::vector<TxPtr>& txs() const { return f_.txs; }
    std::uint64_t byte_size() const { return byte_size_; }

    const std::vector<TxHash>& sorted_tx_hashes() const { return sorted_hashes_; }
    const std::vector<SpendRef>& sorted_inputs() const { return sorted_inputs_; }

    /// Some spend reference is used by two different transactions of this block.
    bool has_internal_conflict() const { return internal_conflict_; }

    /// Every transaction hashes into bucket_id() under `bucket_count` buckets.
    /// Memoized for the last bucket count asked.
    bool txs_in_bucket(std::uint32_t bucket_count) const;

private:
    Fields f_;
    BlockHash hash_;
    std::uint64_t byte_size_ = 0;
    std::vector<TxHash> sorted_hashes_;
    std::vector<SpendRef> sorted_inputs_;
    bool internal_conflict_ = false;
    mutable std::uint32_t bucket_checked_for_ = 0;
    mutable bool bucket_ok_ = false;
};

using BlockPtr = std::shared_ptr<const Block>;

inline BlockPtr make_block(Block::Fields fields) { return std::make_shared<const Block>(std::move(fields)); }

}  // namespace cdag
