#include "cdag/block.hpp"

#include "cdag/bucketing.hpp"

#include <algorithm>

namespace cdag {

TxHash Transaction::compute_hash(const std::vector<SpendRef>& inputs, const std::string& payload) {
    Hasher h;
    h.add("tx").add(static_cast<std::uint64_t>(inputs.size()));
    for (auto in : inputs) h.add(in);
    h.add(std::string_view(payload));
    return h.finish();
}

Transaction Transaction::make(std::vector<SpendRef> inputs, std::string payload, std::uint32_t byte_size) {
    std::sort(inputs.begin(), inputs.end());
    inputs.erase(std::unique(inputs.begin(), inputs.end()), inputs.end());
    Transaction tx;
    tx.hash = compute_hash(inputs, payload);
    tx.inputs = std::move(inputs);
    tx.byte_size = byte_size;
    tx.payload = std::move(payload);
    return tx;
}

bool Transaction::double_spends(const Transaction& other) const {
    auto a = inputs.begin();
    auto b = other.inputs.begin();
    while (a != inputs.end() && b != other.inputs.end()) {
        if (*a == *b) return true;
        if (*a < *b) {
            ++a;
        } else {
            ++b;
        }
    }
    return false;
}

Block::Block(Fields fields) : f_(std::move(fields)) {
    byte_size_ = kBlockHeaderBytes;
    sorted_hashes_.reserve(f_.txs.size());
    Hasher h;
    h.add("block")
        .add(f_.prev_cblock)
        .add(f_.bucket_id)
        .add(f_.tournament_no)
        .add(f_.proposer)
        .add(f_.powin.auth_tag)
        .add(static_cast<std::uint64_t>(f_.txs.size()));
    for (const auto& tx : f_.txs) {
        byte_size_ += tx->byte_size;
        h.add(tx->hash);
        sorted_hashes_.push_back(tx->hash);
        sorted_inputs_.insert(sorted_inputs_.end(), tx->inputs.begin(), tx->inputs.end());
    }
    hash_ = h.finish();
    std::sort(sorted_hashes_.begin(), sorted_hashes_.end());
    std::sort(sorted_inputs_.begin(), sorted_inputs_.end());
    internal_conflict_ = std::adjacent_find(sorted_inputs_.begin(), sorted_inputs_.end()) != sorted_inputs_.end();
    sorted_inputs_.erase(std::unique(sorted_inputs_.begin(), sorted_inputs_.end()), sorted_inputs_.end());
}

bool Block::txs_in_bucket(std::uint32_t bucket_count) const {
    if (bucket_checked_for_ != bucket_count) {
        bucket_ok_ = std::all_of(f_.txs.begin(), f_.txs.end(),
                                 [&](const TxPtr& tx) { return bucket_of(tx->hash, bucket_count) == f_.bucket_id; });
        bucket_checked_for_ = bucket_count;
    }
    return bucket_ok_;
}

}  // namespace cdag
