#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cmdhash/analyzer.hpp"
#include "cmdhash/command_set.hpp"
#include "cmdhash/hash.hpp"

namespace cmdhash {

struct MatcherBuildError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The chosen hash function cannot drive a byte-at-a-time recognizer because
// it reads the total string length, which a stream does not know up front.
struct LengthDependentSpec : MatcherBuildError {
    using MatcherBuildError::MatcherBuildError;
};

// Two commands of equal length hash to the same value without sharing an
// alias group, so the recognizer could never tell them apart.
struct IntrinsicSameLengthCollision : MatcherBuildError {
    std::vector<std::string> offenders;
    IntrinsicSameLengthCollision(const std::string& msg,
                                 std::vector<std::string> names)
        : MatcherBuildError(msg), offenders(std::move(names)) {}
};

// Everything the deployed recognizer stores about one command: the hash
// byte, the length, and optionally the bytes the extra checks compare
// against. 2-5 bytes per command instead of the full string.
struct CommandRecord {
    int id = -1;
    uint8_t hash = 0;
    uint32_t length = 0;
    std::optional<uint8_t> first;
    std::optional<uint8_t> last1;
    std::optional<std::array<uint8_t, 2>> last2;
    std::optional<int> alias_group;

    uint64_t storage_bytes() const {
        // last2's second byte doubles as the last-1 check byte
        uint64_t n = 2 + (first ? 1 : 0);
        if (last2)
            n += 2;
        else if (last1)
            n += 1;
        return n;
    }
};

struct MatchCriteria {
    bool first_char = false;
    bool last1 = false;
    bool last2 = false;
};

struct MatcherConfig {
    HashSpec spec;
    std::vector<CommandRecord> records;
    std::vector<std::string> texts; // indexed by record id
    MatchCriteria criteria;
    int offset = 128;
    bool auto_reset = true; // false: latch after a match until reset()
    std::vector<std::string> warnings;
};

struct MatcherState {
    uint8_t h = 0;
    uint64_t count = 0;
    std::optional<uint8_t> first_seen;
    std::optional<uint8_t> prev;  // most recent byte
    std::optional<uint8_t> prev2; // byte before that
    std::optional<int> latched;
};

struct MatchEvent {
    int id = -1;
    uint8_t hash = 0;
    uint64_t length = 0;
};

inline MatcherConfig build_matcher(const HashSpec& spec, const CommandSet& set,
                                   MatchCriteria criteria = {},
                                   bool auto_reset = true) {
    if (spec.requires_length)
        throw LengthDependentSpec("hash function '" + spec.name +
                                  "' reads the total length and cannot run on a "
                                  "byte stream");
    MatcherConfig cfg;
    cfg.spec = spec;
    cfg.criteria = criteria;
    cfg.offset = set.alphabet.offset;
    cfg.auto_reset = auto_reset;

    std::vector<uint8_t> hashes = hash_command_set(spec, set);
    for (size_t i = 0; i < set.commands.size(); ++i) {
        const Command& c = set.commands[i];
        CommandRecord r;
        r.id = int(i);
        r.hash = hashes[i];
        r.length = c.length();
        r.alias_group = c.alias_group;
        const auto& bytes = c.encoded.bytes;
        if (criteria.first_char) r.first = bytes.front();
        if (criteria.last1) r.last1 = bytes.back();
        if (criteria.last2 && bytes.size() >= 2) {
            r.last2 = std::array<uint8_t, 2>{bytes[bytes.size() - 2], bytes.back()};
            if (bytes.size() == 2)
                cfg.warnings.push_back("last-2 check stores the whole of '" +
                                       c.text + "'");
        }
        cfg.records.push_back(r);
        cfg.texts.push_back(c.text);
    }

    for (size_t i = 0; i < cfg.records.size(); ++i)
        for (size_t j = i + 1; j < cfg.records.size(); ++j) {
            const CommandRecord& a = cfg.records[i];
            const CommandRecord& b = cfg.records[j];
            if (a.hash != b.hash || a.length != b.length) continue;
            if (a.alias_group && a.alias_group == b.alias_group) continue;
            throw IntrinsicSameLengthCollision(
                "commands '" + cfg.texts[i] + "' and '" + cfg.texts[j] +
                    "' have the same length and hash to " + std::to_string(a.hash),
                {cfg.texts[i], cfg.texts[j]});
        }
    return cfg;
}

inline void reset(const MatcherConfig& cfg, MatcherState& st) {
    st = MatcherState{};
    st.h = cfg.spec.h_start;
}

inline MatcherState make_state(const MatcherConfig& cfg) {
    MatcherState st;
    reset(cfg, st);
    return st;
}

// Feed one raw byte. The byte is offset-encoded, folded into the running
// hash, and every record is checked immediately; a match fires on the byte
// that completes it. Unknown bytes simply hash.
inline std::optional<MatchEvent> feed(const MatcherConfig& cfg, MatcherState& st,
                                      uint8_t raw) {
    if (st.latched) return std::nullopt; // not accepting input until reset
    uint8_t m = uint8_t((int(raw) + cfg.offset) & 0xFF);
    st.h = step(cfg.spec, HashState{st.h, st.count + 1, std::nullopt}, m);
    st.count += 1;
    st.prev2 = st.prev;
    st.prev = m;
    if (!st.first_seen) st.first_seen = m;

    for (const CommandRecord& r : cfg.records) {
        if (r.hash != st.h || uint64_t(r.length) != st.count) continue;
        if (cfg.criteria.first_char && r.first && st.first_seen != *r.first) continue;
        if (cfg.criteria.last1 && r.last1 && st.prev != *r.last1) continue;
        if (cfg.criteria.last2 && r.last2 &&
            !(st.prev2 && st.prev && *st.prev2 == (*r.last2)[0] &&
              *st.prev == (*r.last2)[1]))
            continue;
        MatchEvent ev{r.id, st.h, st.count};
        if (cfg.auto_reset)
            reset(cfg, st);
        else
            st.latched = r.id;
        return ev;
    }
    return std::nullopt;
}

struct MemoryFootprint {
    uint64_t bytes_used = 0;         // hash + length + optional check bytes
    uint64_t bytes_full_strings = 0; // what storing the texts would take
    double savings_pct = 0.0;        // hash bytes alone vs full strings
};

// Savings of storing `hashed_bytes` instead of `full_bytes`.
inline double savings_pct(uint64_t full_bytes, uint64_t hashed_bytes) {
    if (full_bytes == 0) return 0.0;
    return 100.0 * (1.0 - double(hashed_bytes) / double(full_bytes));
}

inline MemoryFootprint memory_footprint(const MatcherConfig& cfg) {
    MemoryFootprint m;
    for (const CommandRecord& r : cfg.records) {
        m.bytes_used += r.storage_bytes();
        m.bytes_full_strings += r.length;
    }
    m.savings_pct = savings_pct(m.bytes_full_strings, cfg.records.size());
    return m;
}

} // namespace cmdhash
