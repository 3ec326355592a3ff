#include "cdag/ring.hpp"

#include "cdag/errors.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace cdag {

Ring::Ring(std::vector<std::uint64_t> positions) : positions_(std::move(positions)) {
    if (positions_.empty()) throw Error(ErrorCode::InvalidParameter, "ring needs at least one node");
    order_.resize(positions_.size());
    std::iota(order_.begin(), order_.end(), NodeId{0});
    std::sort(order_.begin(), order_.end(), [&](NodeId a, NodeId b) {
        return positions_[a] != positions_[b] ? positions_[a] < positions_[b] : a < b;
    });
    for (std::size_t i = 1; i < order_.size(); ++i) {
        if (positions_[order_[i]] == positions_[order_[i - 1]]) {
            throw Error(ErrorCode::InvalidParameter, "duplicate ring position");
        }
    }
    rank_.resize(positions_.size());
    for (std::size_t i = 0; i < order_.size(); ++i) rank_[order_[i]] = i;
}

Ring Ring::from_seed(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint64_t> pos(n);
    for (std::size_t i = 0; i < n; ++i) {
        pos[i] = Hasher().add("ring").add(seed).add(static_cast<std::uint64_t>(i)).finish().prefix64();
    }
    return Ring(std::move(pos));
}

NodeId Ring::successor(NodeId n) const {
    return order_[(rank_.at(n) + 1) % order_.size()];
}

NodeId Ring::lookup(std::uint64_t key) const {
    auto it = std::lower_bound(order_.begin(), order_.end(), key,
                               [&](NodeId node, std::uint64_t k) { return positions_[node] < k; });
    return it == order_.end() ? order_.front() : *it;
}

std::uint32_t ceil_log2(std::size_t n) {
    std::uint32_t bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    return std::max<std::uint32_t>(bits, 1);
}

std::vector<std::vector<NodeId>> make_routing_tables(const Ring& ring, std::mt19937_64& rng) {
    const auto n = ring.size();
    const auto want = std::min<std::size_t>(ceil_log2(n), n - 1);
    std::vector<std::vector<NodeId>> tables(n);
    for (NodeId self = 0; self < n; ++self) {
        std::set<NodeId> picked;
        while (picked.size() < want) {
            auto peer = static_cast<NodeId>(rng() % n);
            if (peer != self) picked.insert(peer);
        }
        tables[self].assign(picked.begin(), picked.end());
    }
    return tables;
}

}  // namespace cdag
