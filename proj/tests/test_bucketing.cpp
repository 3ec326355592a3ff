#include "support.hpp"

#include "cdag/bucketing.hpp"
#include "cdag/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace cdag;
using namespace cdag::testing;

TEST_CASE("bucket_of is the big-endian hash modulo B") {
    CHECK(bucket_of(Digest::from_uint(123), 40) == 3);
    CHECK(bucket_of(Digest::from_uint(0), 40) == 0);
    CHECK_THROWS_AS(bucket_of(Digest::from_uint(1), 0), Error);
    // High bytes matter: 2^64 mod 40 = 16.
    std::array<std::uint8_t, 32> b{};
    b[23] = 1;
    CHECK(bucket_of(Digest(b), 40) == 16);
}

TEST_CASE("bucket_of spreads random hashes uniformly") {
    Rng rng(11);
    std::vector<int> counts(40, 0);
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        std::array<std::uint8_t, 32> raw{};
        for (auto& x : raw) x = static_cast<std::uint8_t>(rng());
        counts[bucket_of(Digest(raw), 40)]++;
    }
    const double mean = n / 40.0;
    const double sigma = std::sqrt(n * (1.0 / 40) * (39.0 / 40));
    double chi2 = 0;
    for (int c : counts) {
        CHECK(std::abs(c - mean) <= 5 * sigma);
        chi2 += (c - mean) * (c - mean) / mean;
    }
    // 39 degrees of freedom; 99.9th percentile is about 72.
    CHECK(chi2 < 72.1);
}

TEST_CASE("TxPool keeps buckets disjoint") {
    TxPool pool(8);
    Rng rng(3);
    std::vector<TxPtr> txs;
    for (SpendRef r = 0; r < 200; ++r) {
        auto tx = plain_tx({r}, 100, std::to_string(rng()));
        txs.push_back(tx);
        CHECK(pool.add(tx));
    }
    CHECK_FALSE(pool.add(txs[0]));
    for (int step = 0; step < 80; ++step) pool.remove(txs[rng() % txs.size()]->hash);
    std::map<TxHash, int> seen;
    for (std::uint32_t b = 0; b < 8; ++b) {
        for (const auto& tx : pool.bucket(b)) {
            CHECK(bucket_of(tx->hash, 8) == b);
            seen[tx->hash]++;
        }
    }
    CHECK(seen.size() == pool.size());
    for (const auto& [h, c] : seen) CHECK(c == 1);
}

TEST_CASE("select_bucket") {
    Rng rng(1);
    TxPool pool(5);
    CHECK_THROWS_AS(select_bucket(rng, pool, {}), Error);
    pool.add(tx_in_bucket({1}, 2, 5));
    CHECK(select_bucket(rng, pool, {}) == 2);
    CHECK(select_bucket(rng, pool, {2}) == 2);  // collision accepted

    TxPool p3(5);
    for (std::uint32_t b : {1u, 2u, 3u}) p3.add(tx_in_bucket({b}, b, 5));
    for (int i = 0; i < 100; ++i) {
        auto got = select_bucket(rng, p3, {2});
        CHECK((got == 1 || got == 3));
    }

    TxPool p5(5);
    for (std::uint32_t b = 0; b < 5; ++b) p5.add(tx_in_bucket({b + 10}, b, 5));
    std::vector<int> counts(5, 0);
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) counts[select_bucket(rng, p5, {})]++;
    const double sigma = std::sqrt(draws * 0.2 * 0.8);
    for (int c : counts) CHECK(std::abs(c - 2000) <= 5 * sigma);
}

TEST_CASE("fill_block") {
    TxPool pool(4);
    CHECK(fill_block(0, pool, 1'000'000).empty());

    for (SpendRef r = 1; r <= 3; ++r) pool.add(tx_in_bucket({r}, 1, 4, 400'000));
    auto got = fill_block(1, pool, 1'000'000);
    REQUIRE(got.size() == 2);
    CHECK(got[0] == pool.bucket(1)[0]);
    CHECK(got[1] == pool.bucket(1)[1]);

    TxPool ds(4);
    ds.add(tx_in_bucket({10}, 2, 4, 100));
    ds.add(tx_in_bucket({11}, 2, 4, 100));
    ds.add(tx_in_bucket({10, 12}, 2, 4, 100));  // double-spends the first
    ds.add(tx_in_bucket({13}, 2, 4, 100));
    auto filled = fill_block(2, ds, 1'000'000);
    CHECK(filled.size() == 3);
    for (std::size_t i = 0; i < filled.size(); ++i) {
        CHECK(bucket_of(filled[i]->hash, 4) == 2);
        for (std::size_t j = i + 1; j < filled.size(); ++j) CHECK_FALSE(filled[i]->double_spends(*filled[j]));
    }
    CHECK(filled[0] == ds.bucket(2)[0]);

    auto skipped = fill_block(2, ds, 1'000'000, [](const Transaction& tx) { return tx.inputs == std::vector<SpendRef>{10}; });
    CHECK(skipped.size() == 3);  // the shadow of the skipped tx becomes eligible
}

TEST_CASE("conflicts") {
    LedgerParams p{4, 40, 1'000'000};
    auto g = Digest::from_uint(1);
    auto a = build_block({g, 1, 1, 1, {{1}, {2}}}, p);
    auto b = build_block({g, 2, 1, 2, {{3}}}, p);
    auto c = build_block({g, 3, 1, 3, {{2, 9}}}, p);
    CHECK(conflicts(*a, *a) == ConflictKind::Intersecting);
    CHECK(conflicts(*a, *b) == ConflictKind::None);
    CHECK(conflicts(*a, *c) == ConflictKind::DoubleSpend);

    // Different buckets never intersect.
    for (std::uint32_t i = 0; i < 10; ++i) {
        auto x = build_block({g, i, 1, 1, {{100 + i}}}, p);
        auto y = build_block({g, i + 10, 1, 1, {{200 + i}}}, p);
        CHECK(conflicts(*x, *y) != ConflictKind::Intersecting);
    }
}

TEST_CASE("remove_confirmed") {
    LedgerParams p{4, 4, 1'000'000};
    TxPool pool(4);
    auto t1 = tx_in_bucket({1}, 0, 4);
    auto t2 = tx_in_bucket({2}, 0, 4);
    auto t3 = tx_in_bucket({3}, 0, 4);
    for (auto& t : {t1, t2, t3}) pool.add(t);
    Block::Fields f;
    f.bucket_id = 0;
    f.txs = {t1, t2, t3};
    Block blk(f);
    CHECK(remove_confirmed(pool, blk) == 3);
    CHECK(remove_confirmed(pool, blk) == 0);

    TxPool shadow(4);
    auto s = tx_in_bucket({7}, 1, 4);
    auto twin = tx_in_bucket({7}, 3, 4, 350, 9);
    auto other = tx_in_bucket({8}, 2, 4);
    shadow.add(s);
    shadow.add(twin);
    shadow.add(other);
    Block::Fields g;
    g.bucket_id = 1;
    g.txs = {s};
    CHECK(remove_confirmed(shadow, Block(g)) == 2);
    CHECK(shadow.contains(other->hash));
}
