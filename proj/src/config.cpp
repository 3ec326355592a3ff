#include "cdag/config.hpp"

#include "cdag/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace cdag {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::InvalidParameter, key + ": " + why);
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
    T out{};
    auto s = trim(v);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) bad(key, "cannot parse '" + v + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    auto s = trim(v);
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    bad(key, "expected a boolean, got '" + v + "'");
}

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

template <class T>
std::string fmt_int(T v) {
    return std::to_string(v);
}

struct Field {
    std::function<void(SimConfig&, const std::string&)> set;
    std::function<std::string(const SimConfig&)> get;
};

#define CDAG_UINT(name)                                                                           \
    {#name, {[](SimConfig& c, const std::string& v) { c.name = parse_num<decltype(c.name)>(#name, v); }, \
             [](const SimConfig& c) { return fmt_int(c.name); }}}
#define CDAG_DOUBLE(name)                                                                \
    {#name, {[](SimConfig& c, const std::string& v) { c.name = parse_num<double>(#name, v); }, \
             [](const SimConfig& c) { return fmt(c.name); }}}

const std::map<std::string, Field>& fields() {
    static const std::map<std::string, Field> table = {
        CDAG_UINT(n),
        CDAG_UINT(alpha),
        CDAG_UINT(k),
        CDAG_DOUBLE(tau_s),
        CDAG_UINT(buckets),
        CDAG_UINT(f),
        CDAG_UINT(block_bytes),
        CDAG_UINT(tx_bytes),
        CDAG_DOUBLE(bandwidth_bps),
        CDAG_DOUBLE(latency_min_ms),
        CDAG_DOUBLE(latency_max_ms),
        CDAG_DOUBLE(tx_rate),
        CDAG_DOUBLE(double_spend_rate),
        CDAG_DOUBLE(malicious_frac),
        {"malicious",
         {[](SimConfig& c, const std::string& v) {
              c.malicious.clear();
              std::stringstream ss(v);
              std::string item;
              while (std::getline(ss, item, ',')) {
                  if (!trim(item).empty()) c.malicious.push_back(parse_num<std::uint32_t>("malicious", item));
              }
          },
          [](const SimConfig& c) {
              std::string out;
              for (std::size_t i = 0; i < c.malicious.size(); ++i) out += (i ? "," : "") + std::to_string(c.malicious[i]);
              return out;
          }}},
        {"adversary", {[](SimConfig& c, const std::string& v) { c.adversary = trim(v); },
                       [](const SimConfig& c) { return c.adversary; }}},
        CDAG_DOUBLE(skew_ms),
        CDAG_DOUBLE(drift_ppm),
        CDAG_UINT(duration_slots),
        CDAG_UINT(seed),
        CDAG_UINT(probe_budget),
        CDAG_DOUBLE(pairing_frac),
        CDAG_DOUBLE(validator_wait_frac),
        {"resync", {[](SimConfig& c, const std::string& v) { c.resync = parse_bool("resync", v); },
                    [](const SimConfig& c) { return std::string(c.resync ? "true" : "false"); }}},
        {"config", {[](SimConfig& c, const std::string& v) { c.apply_preset(parse_num<std::uint32_t>("config", v)); },
                    [](const SimConfig& c) { return fmt_int(c.config_id); }}},
    };
    return table;
}

#undef CDAG_UINT
#undef CDAG_DOUBLE

bool valid_adversary(const std::string& a) {
    if (a == "mixed" || a == "negligent" || a == "multiplay" || a == "bypass") return true;
    auto colon = a.find(':');
    if (colon == std::string::npos) return false;
    auto role = a.substr(0, colon);
    auto mode = a.substr(colon + 1);
    if (mode.size() != 1 || !std::isdigit(static_cast<unsigned char>(mode[0]))) return false;
    int m = mode[0] - '0';
    if (role == "validator") return m >= 1 && m <= 5;
    if (role == "keeper") return m >= 1 && m <= 4;
    return false;
}

}  // namespace

void SimConfig::apply_preset(std::uint32_t id) {
    switch (id) {
        case 0: break;
        case 1: block_bytes = 1'000'000; tau_s = 20; break;
        case 2: block_bytes = 750'000; tau_s = 15; break;
        case 3: block_bytes = 500'000; tau_s = 10; break;
        default: bad("config", "expected 0, 1, 2 or 3");
    }
    config_id = id;
}

void SimConfig::validate() const {
    if (n < 4) bad("n", "need at least 4 nodes");
    if (alpha < 1) bad("alpha", "must be at least 1");
    if ((std::uint64_t{1} << std::min<std::uint32_t>(alpha, 63)) >= n) bad("alpha", "must be below log2(n)");
    if (k < 1 || k >= n) bad("k", "must be in [1, n-1]");
    if (!(tau_s > 0)) bad("tau_s", "must be positive");
    if (buckets < 1) bad("buckets", "must be at least 1");
    if (f < 1) bad("f", "must be at least 1");
    if (tx_bytes < 1) bad("tx_bytes", "must be positive");
    if (block_bytes < 480 + tx_bytes) bad("block_bytes", "too small for one transaction");
    if (!(bandwidth_bps > 0)) bad("bandwidth_bps", "must be positive");
    if (latency_min_ms < 0 || latency_max_ms < latency_min_ms) bad("latency_max_ms", "need 0 <= min <= max");
    if (tx_rate < 0) bad("tx_rate", "must be non-negative");
    if (double_spend_rate < 0 || double_spend_rate > 1) bad("double_spend_rate", "must be in [0, 1]");
    if (malicious_frac < 0 || malicious_frac > 1) bad("malicious_frac", "must be in [0, 1]");
    for (auto id : malicious) {
        if (id >= n) bad("malicious", "node id " + std::to_string(id) + " out of range");
    }
    if (!valid_adversary(adversary)) bad("adversary", "unknown mode '" + adversary + "'");
    if (skew_ms < 0 || skew_ms >= tau_s * 500) bad("skew_ms", "must be in [0, tau/2)");
    if (duration_slots < 1) bad("duration_slots", "must be at least 1");
    if (!(pairing_frac > 0) || !(validator_wait_frac > 0) || pairing_frac + validator_wait_frac > 1) {
        bad("pairing_frac", "round deadlines must be positive and fit one slot");
    }
    if (config_id > 3) bad("config", "expected 0, 1, 2 or 3");
}

void SimConfig::set(const std::string& key, const std::string& value) {
    auto it = fields().find(trim(key));
    if (it == fields().end()) bad(key, "unknown key");
    it->second.set(*this, value);
}

std::map<std::string, std::string> SimConfig::to_map() const {
    std::map<std::string, std::string> out;
    for (const auto& [k, f] : fields()) out[k] = f.get(*this);
    return out;
}

std::string SimConfig::to_text() const {
    std::string out;
    // The preset is written first so explicit keys after it win on reload.
    out += "config = " + std::to_string(config_id) + "\n";
    for (const auto& [k, v] : to_map()) {
        if (k != "config") out += k + " = " + v + "\n";
    }
    return out;
}

SimConfig SimConfig::from_text(const std::string& text) {
    SimConfig c;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::InvalidParameter, "line " + std::to_string(lineno) + ": expected key = value");
        }
        c.set(line.substr(0, eq), line.substr(eq + 1));
    }
    return c;
}

SimConfig SimConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Io, "cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

void SimConfig::apply_env(const std::string& prefix) {
    // Preset first, so CDAG_TAU_S can refine CDAG_CONFIG.
    auto env_for = [&](const std::string& key) {
        std::string name = prefix + key;
        std::transform(name.begin(), name.end(), name.begin(), [](unsigned char ch) { return std::toupper(ch); });
        return std::getenv(name.c_str());
    };
    if (const char* v = env_for("config")) set("config", v);
    for (const auto& [key, f] : fields()) {
        if (key == "config") continue;
        if (const char* v = env_for(key)) set(key, v);
    }
}

std::vector<std::string> SimConfig::keys() {
    std::vector<std::string> out;
    for (const auto& [k, f] : fields()) out.push_back(k);
    return out;
}

}  // namespace cdag
