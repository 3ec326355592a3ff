#pragma once

#include "cdag/block.hpp"
#include "cdag/digest.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace cdag {

/// Converging block: the hash-sorted set of non-conflicting blocks of one
/// tournament, all extending the same previous C-Block.
struct CBlock {
    CBlockHash hash;
    std::uint64_t tournament_no = 0;
    CBlockHash prev_cblock;
    std::vector<BlockHash> included;  // ascending

    /// Sorts and deduplicates `included` and derives the content hash.
    static CBlock make(std::uint64_t tournament_no, const CBlockHash& prev, std::vector<BlockHash> included);
    static CBlock genesis();
    static CBlockHash compute_hash(std::uint64_t tournament_no, const CBlockHash& prev,
                                   const std::vector<BlockHash>& included);

    bool is_genesis() const { return tournament_no == 0 && included.empty(); }
    bool includes(const BlockHash& h) const;
    std::uint64_t byte_size() const { return 96 + 32 * included.size(); }

    bool operator==(const CBlock&) const = default;
};

using CBlockPtr = std::shared_ptr<const CBlock>;

/// Maps each spend reference to the blocks whose transactions use it. The
/// contents are facts about immutable blocks, so one index may back many
/// LedgerStores; every query a store makes is filtered through that store's
/// own C-Block ancestry.
class SpendIndex {
public:
    void register_block(const Block& block);
    const std::vector<BlockHash>* spenders(SpendRef ref) const;
    std::size_t size() const { return by_ref_.size(); }

private:
    std::unordered_set<BlockHash> registered_;
    std::unordered_map<SpendRef, std::vector<BlockHash>> by_ref_;
};

struct LedgerParams {
    std::uint32_t alpha = 4;
    std::uint32_t bucket_count = 40;
    std::uint64_t max_block_bytes = 1'000'000;
};

enum class ViolationKind {
    UnknownParent,
    BucketMismatch,
    InternalConflict,
    AncestorDoubleSpend,
    BadPoWin,
    Oversize,
    StaleTournament,
};

const char* to_string(ViolationKind kind);

struct Violation {
    ViolationKind kind;
    std::string detail;
};

enum class OfferStatus { Accepted, Duplicate, Parked, Rejected };

struct OfferResult {
    OfferStatus status = OfferStatus::Duplicate;
    std::vector<Violation> violations;
    /// Everything accepted by this offer, including parked items it released.
    std::vector<BlockHash> accepted_blocks;
    std::vector<CBlockHash> accepted_cblocks;
    /// Dependency the item is waiting for when parked.
    std::optional<Digest> missing;
};

/// Set of C-Blocks on the path genesis -> tip (inclusive).
using Ancestry = std::unordered_set<CBlockHash>;

/// One node's view of the CDAG.
///
/// Out-of-order arrivals wait in a pending buffer until their dependencies
/// show up and are then validated and admitted, so the stored C-Blocks always
/// form a tree rooted at genesis.
class LedgerStore {
public:
    explicit LedgerStore(LedgerParams params, std::shared_ptr<SpendIndex> index = nullptr);

    const LedgerParams& params() const { return params_; }
    const CBlockHash& genesis() const { return genesis_; }

    bool has_block(const BlockHash& h) const { return blocks_.contains(h); }
    bool has_cblock(const CBlockHash& h) const { return cblocks_.contains(h); }
    BlockPtr block(const BlockHash& h) const;
    CBlockPtr cblock(const CBlockHash& h) const;
    std::size_t block_count() const { return blocks_.size(); }
    std::size_t cblock_count() const { return cblocks_.size(); }
    const std::unordered_map<BlockHash, BlockPtr>& blocks() const { return blocks_; }
    const std::unordered_map<CBlockHash, CBlockPtr>& cblocks() const { return cblocks_; }

    /// Validates and stores a block, or parks it when its parent is unknown.
    OfferResult offer_block(BlockPtr block, double now = 0.0);
    /// Validates and stores a C-Block, or parks it until its parent and all
    /// included blocks are present.
    OfferResult offer_cblock(CBlockPtr cblock, double now = 0.0);

    bool was_rejected(const Digest& h) const { return rejected_.contains(h); }
    std::size_t pending_count() const;
    /// Drops parked items older than max_age; returns how many.
    std::size_t evict_pending(double now, double max_age);

    std::uint32_t foul_count(const BlockHash& h) const;
    void add_foul(const BlockHash& h, std::uint32_t count = 1);

    /// C-Blocks with no stored child.
    std::vector<CBlockHash> tips() const;
    std::size_t depth(const CBlockHash& h) const;
    const std::vector<CBlockHash>& children(const CBlockHash& h) const;
    /// Stored C-Blocks that include the block.
    const std::vector<CBlockHash>& including_cblocks(const BlockHash& h) const;

    bool is_ancestor(const CBlockHash& ancestor, const CBlockHash& descendant) const;
    Ancestry ancestry(const CBlockHash& tip) const;

    /// Some stored block included on the path to `ancestry`'s tip spends one of
    /// the transaction's inputs. `ignore` excludes one block (the caller itself).
    bool spent_in(const Ancestry& ancestry, const Transaction& tx, const BlockHash* ignore = nullptr) const;

    /// Cached sum of block weights from genesis to `tip`.
    std::int64_t cached_chain_weight(const CBlockHash& tip) const;

    /// Blocks known for a proposer in a tournament.
    std::vector<BlockHash> blocks_by(NodeId proposer, std::uint64_t tournament_no) const;

private:
    struct Parked {
        BlockPtr block;
        CBlockPtr cblock;
        double since = 0.0;
    };

    std::vector<Violation> check_cblock(const CBlock& c) const;
    void admit_block(const BlockPtr& b);
    void admit_cblock(const CBlockPtr& c);
    void park(const Digest& missing, Parked item);
    void release(const Digest& arrived, double now, OfferResult& out);
    OfferResult try_block(BlockPtr block, double now);
    OfferResult try_cblock(CBlockPtr cblock, double now);

    LedgerParams params_;
    std::shared_ptr<SpendIndex> index_;
    CBlockHash genesis_;
    std::unordered_map<BlockHash, BlockPtr> blocks_;
    std::unordered_map<CBlockHash, CBlockPtr> cblocks_;
    std::unordered_map<CBlockHash, std::size_t> depth_;
    std::unordered_map<CBlockHash, std::vector<CBlockHash>> children_;
    std::unordered_map<BlockHash, std::vector<CBlockHash>> including_;
    std::unordered_map<BlockHash, std::uint32_t> fouls_;
    std::map<std::pair<NodeId, std::uint64_t>, std::vector<BlockHash>> by_proposer_;
    std::unordered_map<Digest, std::vector<Parked>> pending_;
    std::unordered_set<Digest> parked_ids_;
    std::unordered_set<Digest> rejected_;
    mutable std::unordered_map<CBlockHash, std::int64_t> weight_cache_;
};

/// delta = floor(n / 2^alpha): the most blocks one tournament can yield.
/// Requires alpha >= 1 and 2^alpha <= n.
std::uint64_t compute_delta(std::uint64_t n, std::uint32_t alpha);

/// max(0, alpha - fouls). Throws NotFound for a block not in the store.
std::int64_t block_weight(const BlockHash& block, const LedgerStore& store, std::uint32_t alpha);
std::int64_t chain_weight(const CBlockHash& tip, const LedgerStore& store);

/// Tip with the largest chain weight; equal weights go to the smaller hash.
CBlockHash select_heaviest_cblock(const std::vector<CBlockHash>& tips, const LedgerStore& store);

/// Heaviest valid C-Block obtainable from the candidates: per parent branch,
/// the maximum-weight subset with distinct buckets and no conflicts (equal
/// weight prefers more blocks, then smaller proposer ids), then the branch
/// whose resulting chain is heaviest. Throws EmptySlot without candidates.
CBlock build_cblock(std::uint64_t tournament_no, const std::vector<BlockPtr>& candidates, const LedgerStore& store);

std::vector<Violation> validate_block(const Block& block, const LedgerStore& store, const LedgerParams& params);

/// C-Block rule check against the store: parent and included blocks known,
/// distinct buckets, no conflicts, common parent, one tournament, sorted hash.
std::vector<Violation> validate_cblock(const CBlock& cblock, const LedgerStore& store);

std::vector<BlockHash> total_order(const CBlockHash& tip, const LedgerStore& store);

struct FullConfirmations {
    std::uint64_t count = 0;
    std::uint64_t tournaments_spanned = 0;
    std::uint64_t blocks_ahead = 0;
};

FullConfirmations full_confirmations(const BlockHash& block, const CBlockHash& tip, const LedgerStore& store,
                                     std::uint64_t delta);

/// Confirmed when x >= f_min full confirmations arrived in fewer than 2x tournaments.
bool is_confirmed(const BlockHash& block, const CBlockHash& tip, const LedgerStore& store, std::uint64_t delta,
                  std::uint64_t f_min);

/// Same rule applied to already computed counts.
bool confirmation_rule(const FullConfirmations& fc, std::uint64_t f_min);

}  // namespace cdag
