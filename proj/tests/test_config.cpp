#include "cdag/config.hpp"
#include "cdag/errors.hpp"

#include <doctest.h>

#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>

using namespace cdag;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::Internal;
}

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("defaults are valid") {
    SimConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.n == 64);
    CHECK(c.alpha == 4);
    CHECK(c.k == 16);
    CHECK(c.tau_s == 20.0);
    CHECK(c.f == 3);
}

TEST_CASE("presets pair block size with slot length") {
    SimConfig c;
    c.apply_preset(2);
    CHECK(c.block_bytes == 750'000);
    CHECK(c.tau_s == 15.0);
    c.set("config", "3");
    CHECK(c.block_bytes == 500'000);
    CHECK(c.tau_s == 10.0);
    CHECK(c.config_id == 3);
    CHECK(code_of([&] { c.apply_preset(4); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("text round trip") {
    SimConfig c;
    c.n = 128;
    c.alpha = 3;
    c.tau_s = 12.5;
    c.malicious = {3, 9, 27};
    c.adversary = "keeper:4";
    c.resync = false;
    c.seed = 0xfeedULL;
    c.double_spend_rate = 0.05;
    auto back = SimConfig::from_text(c.to_text());
    CHECK(back == c);

    // A preset written first is refined by explicit keys after it.
    SimConfig p;
    p.apply_preset(2);
    p.tau_s = 17;
    CHECK(SimConfig::from_text(p.to_text()) == p);
}

TEST_CASE("text parsing") {
    auto c = SimConfig::from_text("# comment\n n = 32 \nalpha=2 # trailing\n\nmalicious = 1, 2\n");
    CHECK(c.n == 32);
    CHECK(c.alpha == 2);
    CHECK(c.malicious == std::vector<std::uint32_t>{1, 2});

    CHECK(code_of([] { SimConfig::from_text("n 32"); }) == ErrorCode::InvalidParameter);
    CHECK(message_of([] { SimConfig::from_text("nodes = 3"); }).find("nodes") != std::string::npos);
    CHECK(message_of([] { SimConfig::from_text("n = many"); }).find(": n:") != std::string::npos);
    CHECK(code_of([] { SimConfig::from_text("resync = maybe"); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("validation names the offending key") {
    auto bad_key = [](auto mutate) {
        SimConfig c;
        mutate(c);
        return message_of([&] { c.validate(); });
    };
    CHECK(bad_key([](SimConfig& c) { c.alpha = 6; }).find(": alpha") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.n = 16; }).find("alpha") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.k = 64; }).find(": k:") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.n = 2; }).find(": n:") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.tau_s = 0; }).find(": tau_s") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.double_spend_rate = 1.5; }).find(": double_spend_rate") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.malicious = {64}; }).find(": malicious") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.adversary = "validator:6"; }).find(": adversary") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.skew_ms = 10'000; }).find(": skew_ms") != std::string::npos);
    CHECK(bad_key([](SimConfig& c) { c.block_bytes = 100; }).find(": block_bytes") != std::string::npos);

    for (const char* ok : {"mixed", "negligent", "multiplay", "bypass", "validator:1", "validator:5", "keeper:1", "keeper:4"}) {
        SimConfig c;
        c.adversary = ok;
        CHECK_NOTHROW(c.validate());
    }
}

TEST_CASE("environment overrides") {
    ::setenv("CDAG_N", "48", 1);
    ::setenv("CDAG_TAU_S", "7.5", 1);
    ::setenv("CDAG_CONFIG", "3", 1);
    SimConfig c;
    c.apply_env();
    CHECK(c.n == 48);
    CHECK(c.tau_s == 7.5);  // applied after the preset
    CHECK(c.block_bytes == 500'000);
    ::unsetenv("CDAG_N");
    ::unsetenv("CDAG_TAU_S");
    ::unsetenv("CDAG_CONFIG");
}

TEST_CASE("file loading") {
    auto path = std::filesystem::temp_directory_path() / "cdag_test_config.txt";
    {
        std::ofstream out(path);
        out << "n = 20\nalpha = 2\nk = 8\n";
    }
    auto c = SimConfig::from_file(path.string());
    CHECK(c.n == 20);
    std::filesystem::remove(path);
    CHECK(code_of([&] { SimConfig::from_file(path.string()); }) == ErrorCode::Io);
}

TEST_CASE("every key is settable and listed") {
    auto keys = SimConfig::keys();
    CHECK(keys.size() == SimConfig().to_map().size());
    SimConfig c;
    for (const auto& k : keys) CHECK_NOTHROW(c.set(k, c.to_map().at(k)));
    CHECK(c == SimConfig());
}
