#pragma once

// Fixture builders shared by the unit and acceptance suites.

#include "cdag/block.hpp"
#include "cdag/bucketing.hpp"
#include "cdag/ledger.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace cdag::testing {

/// Transaction spending `inputs`, re-rolled until it lands in `bucket`.
inline TxPtr tx_in_bucket(std::vector<SpendRef> inputs, std::uint32_t bucket, std::uint32_t buckets,
                          std::uint32_t bytes = 350, std::uint64_t salt = 0) {
    for (std::uint64_t nonce = salt * 1'000'003;; ++nonce) {
        auto tx = Transaction::make(inputs, "n" + std::to_string(nonce), bytes);
        if (bucket_of(tx.hash, buckets) == bucket) return std::make_shared<const Transaction>(std::move(tx));
    }
}

inline TxPtr plain_tx(std::vector<SpendRef> inputs, std::uint32_t bytes = 350, std::string payload = "p") {
    return std::make_shared<const Transaction>(Transaction::make(std::move(inputs), std::move(payload), bytes));
}

/// Sealed round-`alpha` certificate won by `proposer`.
inline PoWin winning_powin(std::uint64_t tournament, std::uint32_t alpha, NodeId proposer) {
    PoWin p;
    NodeId opponent = proposer + 100000;
    p.tournament_no = tournament;
    p.round = alpha;
    p.players = {proposer, opponent};
    p.winner = proposer;
    p.validator = 7;
    p.match_id = make_match_id(tournament, alpha, proposer, opponent);
    p.seal();
    return p;
}

struct BlockSpec {
    CBlockHash prev;
    std::uint32_t bucket = 0;
    std::uint64_t tournament = 1;
    NodeId proposer = 0;
    std::vector<std::vector<SpendRef>> tx_inputs;  // one entry per transaction
};

/// Block whose transactions all hash into spec.bucket.
inline BlockPtr build_block(const BlockSpec& s, const LedgerParams& params, std::uint64_t salt = 0) {
    Block::Fields f;
    f.prev_cblock = s.prev;
    f.bucket_id = s.bucket;
    f.tournament_no = s.tournament;
    f.proposer = s.proposer;
    f.powin = winning_powin(s.tournament, params.alpha, s.proposer);
    for (const auto& in : s.tx_inputs) f.txs.push_back(tx_in_bucket(in, s.bucket, params.bucket_count, 350, salt));
    return make_block(std::move(f));
}

/// Adds a C-Block over already stored blocks and returns its hash.
inline CBlockHash add_cblock(LedgerStore& store, std::uint64_t tournament, const CBlockHash& prev,
                             std::vector<BlockHash> included) {
    auto c = std::make_shared<const CBlock>(CBlock::make(tournament, prev, std::move(included)));
    auto r = store.offer_cblock(c);
    if (r.status != OfferStatus::Accepted) throw std::runtime_error("fixture C-Block not accepted");
    return c->hash;
}

/// Appends a slot with `count` fresh non-conflicting blocks on `prev`, all
/// converged into one C-Block. Spend references start at `next_ref`.
inline CBlockHash add_slot(LedgerStore& store, const CBlockHash& prev, std::uint64_t tournament, std::size_t count,
                           SpendRef& next_ref, std::vector<BlockHash>* made = nullptr) {
    std::vector<BlockHash> hashes;
    for (std::size_t i = 0; i < count; ++i) {
        BlockSpec s{prev, static_cast<std::uint32_t>(i % store.params().bucket_count), tournament,
                    static_cast<NodeId>(i), {{next_ref++}, {next_ref++}}};
        auto b = build_block(s, store.params());
        if (store.offer_block(b).status != OfferStatus::Accepted) throw std::runtime_error("fixture block rejected");
        hashes.push_back(b->hash());
    }
    if (made) made->insert(made->end(), hashes.begin(), hashes.end());
    return add_cblock(store, tournament, prev, hashes);
}

}  // namespace cdag::testing
