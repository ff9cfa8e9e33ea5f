#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "cmdhash/command_set.hpp"
#include "cmdhash/hash.hpp"

namespace cmdhash {

struct AnalyzerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The extrinsic-collision criteria: which part of a random candidate string
// is pinned to the command's bytes while the rest ranges over the alphabet.
enum class CriterionKind : uint8_t { SameLength, SameStart, SameEnd1, SameEnd2 };

inline const char* criterion_name(CriterionKind c) {
    switch (c) {
    case CriterionKind::SameLength: return "same_length";
    case CriterionKind::SameStart: return "same_start";
    case CriterionKind::SameEnd1: return "same_end1";
    case CriterionKind::SameEnd2: return "same_end2";
    }
    return "?";
}

enum class Classification : uint8_t {
    Excellent,
    NotGenerallyRecommended,
    BadInappropriate,
};

inline const char* classification_label(Classification c) {
    switch (c) {
    case Classification::Excellent: return "EXCELLENT";
    case Classification::NotGenerallyRecommended: return "NOT GENERALLY RECOMMENDED";
    case Classification::BadInappropriate: return "BAD / INAPPROPRIATE";
    }
    return "?";
}

// Histogram of the command set's hash values. Only values hit at least
// twice are kept in `table`; count_sum is the number of commands involved
// in any coincidence, and the classification follows the 5% threshold on
// count_sum / n.
struct CoincidenceReport {
    std::map<int, int> table;
    int count_sum = 0;
    int max_count = 0;
    double efficiency_pct = 100.0;
    Classification classification = Classification::Excellent;

    std::string display() const {
        if (table.empty()) return "none";
        std::string out;
        for (const auto& [value, count] : table) {
            if (!out.empty()) out += ' ';
            out += '#' + std::to_string(value) + ':' + std::to_string(count);
        }
        return out;
    }
};

inline constexpr double kCoincidenceLimitPct = 5.0;

inline std::vector<uint8_t> hash_command_set(const HashSpec& spec,
                                             const CommandSet& set) {
    std::vector<uint8_t> out;
    out.reserve(set.commands.size());
    for (const Command& c : set.commands) out.push_back(hash_string(spec, c.encoded));
    return out;
}

inline CoincidenceReport coincidence_analysis(std::span<const uint8_t> hashes) {
    if (hashes.empty()) throw AnalyzerError("no hashes to analyze");
    std::array<int, 256> bins{};
    for (uint8_t h : hashes) bins[h]++;
    CoincidenceReport r;
    for (int v = 0; v < 256; ++v) {
        r.max_count = std::max(r.max_count, bins[size_t(v)]);
        if (bins[size_t(v)] > 1) {
            r.table[v] = bins[size_t(v)];
            r.count_sum += bins[size_t(v)];
        }
    }
    double ratio = 100.0 * double(r.count_sum) / double(hashes.size());
    r.efficiency_pct = 100.0 - ratio;
    if (r.count_sum == 0)
        r.classification = Classification::Excellent;
    else if (ratio >= kCoincidenceLimitPct)
        r.classification = Classification::BadInappropriate;
    else
        r.classification = Classification::NotGenerallyRecommended;
    return r;
}

// P = 100 * count / alphabet_size^length. The denominator is the full
// same-length space for every criterion, not the constrained one.
inline double probability(uint64_t count, int alphabet_size, uint32_t length) {
    if (alphabet_size < 1 || length < 1)
        throw AnalyzerError("probability needs alphabet_size >= 1 and length >= 1");
    unsigned __int128 den = 1;
    for (uint32_t i = 0; i < length; ++i) den *= unsigned(alphabet_size);
    return double(100.0L * (long double)count / (long double)den);
}

struct ExtrinsicStat {
    int command_index = -1;
    CriterionKind criterion = CriterionKind::SameLength;
    uint64_t count = 0;
    double p_pct = 0.0;
    double p_conditional = 0.0; // against the constrained space's own size
    bool space_empty = false;   // constrained space minus the command itself
    bool self_excluded = false; // the command sat in the space and was removed
    bool outside_alphabet = false;
};

struct EnumLimits {
    uint32_t max_enum_length = 5;
    int jobs = 1; // 0 = hardware concurrency
};

namespace detail {

inline int resolve_jobs(int jobs) {
    if (jobs > 0) return jobs;
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

// Constrained enumeration space: fixed[i] >= 0 pins position i to that
// byte, -1 lets it range over the alphabet.
struct SpacePlan {
    std::vector<int> fixed;

    uint32_t length() const { return uint32_t(fixed.size()); }
    int first_free() const {
        for (size_t i = 0; i < fixed.size(); ++i)
            if (fixed[i] < 0) return int(i);
        return -1;
    }
    uint32_t free_count() const {
        uint32_t n = 0;
        for (int f : fixed)
            if (f < 0) ++n;
        return n;
    }
};

inline SpacePlan plan_space(const EncodedString& cmd, CriterionKind crit) {
    SpacePlan plan;
    size_t len = cmd.length();
    plan.fixed.assign(len, -1);
    switch (crit) {
    case CriterionKind::SameLength: break;
    case CriterionKind::SameStart: plan.fixed[0] = cmd.bytes[0]; break;
    case CriterionKind::SameEnd1: plan.fixed[len - 1] = cmd.bytes[len - 1]; break;
    case CriterionKind::SameEnd2:
        plan.fixed[len - 2] = cmd.bytes[len - 2];
        plan.fixed[len - 1] = cmd.bytes[len - 1];
        break;
    }
    return plan;
}

inline void enum_histogram_rec(const HashSpec& spec, const SpacePlan& plan,
                               const Alphabet& a, uint32_t pos, uint8_t h,
                               std::array<uint64_t, 256>& hist) {
    if (pos == plan.length()) {
        hist[h]++;
        return;
    }
    HashState st{h, pos + 1, plan.length()};
    if (plan.fixed[pos] >= 0) {
        enum_histogram_rec(spec, plan, a, pos + 1,
                           step(spec, st, uint8_t(plan.fixed[pos])), hist);
        return;
    }
    for (int b = a.lo; b <= a.hi; ++b)
        enum_histogram_rec(spec, plan, a, pos + 1, step(spec, st, uint8_t(b)), hist);
}

// Workers split the first free position's byte range into contiguous
// chunks; every chunk's tally is a plain integer histogram, so the merged
// result is identical for any worker count.
inline std::array<uint64_t, 256> space_histogram(const HashSpec& spec,
                                                 const Alphabet& a,
                                                 const SpacePlan& plan, int jobs) {
    std::array<uint64_t, 256> hist{};
    int ff = plan.first_free();
    uint8_t h = spec.h_start;
    uint32_t prefix_end = ff < 0 ? plan.length() : uint32_t(ff);
    for (uint32_t pos = 0; pos < prefix_end; ++pos)
        h = step(spec, HashState{h, pos + 1, plan.length()},
                 uint8_t(plan.fixed[pos]));
    if (ff < 0) {
        hist[h]++;
        return hist;
    }

    int branches = a.size();
    int workers = std::min(resolve_jobs(jobs), branches);
    if (workers <= 1) {
        HashState st{h, uint64_t(ff) + 1, plan.length()};
        for (int b = a.lo; b <= a.hi; ++b)
            enum_histogram_rec(spec, plan, a, uint32_t(ff) + 1,
                               step(spec, st, uint8_t(b)), hist);
        return hist;
    }

    std::vector<std::array<uint64_t, 256>> partial(static_cast<size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
        int begin = a.lo + (branches * w) / workers;
        int end = a.lo + (branches * (w + 1)) / workers;
        threads.emplace_back([&, w, begin, end, h] {
            partial[size_t(w)].fill(0);
            try {
                HashState st{h, uint64_t(ff) + 1, plan.length()};
                for (int b = begin; b < end; ++b)
                    enum_histogram_rec(spec, plan, a, uint32_t(ff) + 1,
                                       step(spec, st, uint8_t(b)),
                                       partial[size_t(w)]);
            } catch (...) {
                errors[size_t(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    for (const auto& p : partial)
        for (size_t i = 0; i < 256; ++i) hist[i] += p[i];
    return hist;
}

inline bool self_in_space(const EncodedString& cmd, const SpacePlan& plan,
                          const Alphabet& a) {
    for (size_t i = 0; i < cmd.bytes.size(); ++i)
        if (plan.fixed[i] < 0 && !a.contains(cmd.bytes[i])) return false;
    return true;
}

inline unsigned __int128 ipow(unsigned base, uint32_t exp) {
    unsigned __int128 r = 1;
    for (uint32_t i = 0; i < exp; ++i) r *= base;
    return r;
}

inline void check_criterion(const Command& cmd, CriterionKind crit,
                            uint32_t max_len) {
    if (cmd.length() > max_len)
        throw AnalyzerError("command '" + cmd.text + "' is longer than the " +
                            std::to_string(max_len) + "-byte enumeration cap");
    if (crit == CriterionKind::SameStart && cmd.length() < 2)
        throw AnalyzerError("same-start is undefined for length-1 commands");
    if (crit == CriterionKind::SameEnd2 && cmd.length() < 2)
        throw AnalyzerError("same-end2 needs a command of length >= 2");
}

} // namespace detail

// Histogram of hash values over the full same-length space; useful for
// checking that the per-value counts add up to alphabet_size^length.
inline std::array<uint64_t, 256> same_length_histogram(const HashSpec& spec,
                                                       const Alphabet& a,
                                                       uint32_t length,
                                                       int jobs = 1) {
    detail::SpacePlan plan;
    plan.fixed.assign(length, -1);
    return detail::space_histogram(spec, a, plan, jobs);
}

// Exhaustively enumerates the criterion's constrained space and counts the
// strings that hash to the command's own value. The command itself is
// removed from its count whenever it lies in the space, so counts are never
// negative; an empty residual space is reported via space_empty instead.
inline ExtrinsicStat enumerate_criterion(const HashSpec& spec, const CommandSet& set,
                                         int cmd_index, CriterionKind crit,
                                         const EnumLimits& limits = {}) {
    const Command& cmd = set.commands.at(size_t(cmd_index));
    detail::check_criterion(cmd, crit, limits.max_enum_length);
    const Alphabet& a = set.alphabet;
    detail::SpacePlan plan = detail::plan_space(cmd.encoded, crit);
    std::array<uint64_t, 256> hist =
        detail::space_histogram(spec, a, plan, limits.jobs);
    uint8_t target = hash_string(spec, cmd.encoded);

    bool in_space = detail::self_in_space(cmd.encoded, plan, a);
    uint64_t count = hist[target];
    if (in_space) count -= 1;

    unsigned __int128 space_size = detail::ipow(unsigned(a.size()), plan.free_count());

    ExtrinsicStat s;
    s.command_index = cmd_index;
    s.criterion = crit;
    s.count = count;
    s.p_pct = probability(count, a.size(), cmd.length());
    s.p_conditional = double(100.0L * (long double)count / (long double)space_size);
    s.self_excluded = in_space;
    s.space_empty = in_space && space_size == 1;
    s.outside_alphabet = !cmd.encoded.all_in_alphabet();
    return s;
}

// An invalid string that collides with `collides_with` (same hash, same
// length) while also being the prefix of a longer command makes the longer
// command unreachable: the short command fires first and the stream resets.
struct PrefixCollisionFinding {
    std::string collider;
    int collides_with = -1;
    int shadowed = -1;
};

namespace detail {

struct PrefixTarget {
    std::vector<uint8_t> prefix;
    int command_index = -1;
};

inline void scan_rec(const HashSpec& spec, const SpacePlan& plan, const Alphabet& a,
                     uint32_t pos, uint8_t h, std::vector<uint8_t>& buf,
                     uint8_t target, const std::vector<uint8_t>& self,
                     const std::vector<PrefixTarget>& targets, int cmd_index,
                     std::vector<PrefixCollisionFinding>& out) {
    if (pos == plan.length()) {
        if (h != target || buf == self) return;
        for (const PrefixTarget& t : targets)
            if (t.prefix == buf)
                out.push_back(PrefixCollisionFinding{decode_bytes(buf, a), cmd_index,
                                                     t.command_index});
        return;
    }
    HashState st{h, pos + 1, plan.length()};
    if (plan.fixed[pos] >= 0) {
        buf[pos] = uint8_t(plan.fixed[pos]);
        scan_rec(spec, plan, a, pos + 1, step(spec, st, buf[pos]), buf, target, self,
                 targets, cmd_index, out);
        return;
    }
    for (int b = a.lo; b <= a.hi; ++b) {
        buf[pos] = uint8_t(b);
        scan_rec(spec, plan, a, pos + 1, step(spec, st, uint8_t(b)), buf, target,
                 self, targets, cmd_index, out);
    }
}

} // namespace detail

// For every same-length collider X of the command, report each longer
// command whose first |X| bytes equal X.
inline std::vector<PrefixCollisionFinding>
prefix_collision_scan(const HashSpec& spec, const CommandSet& set, int cmd_index,
                      const EnumLimits& limits = {}) {
    const Command& cmd = set.commands.at(size_t(cmd_index));
    detail::check_criterion(cmd, CriterionKind::SameLength, limits.max_enum_length);
    const Alphabet& a = set.alphabet;
    uint32_t len = cmd.length();

    std::vector<detail::PrefixTarget> targets;
    for (size_t i = 0; i < set.commands.size(); ++i) {
        const Command& other = set.commands[i];
        if (int(i) == cmd_index || other.length() <= len) continue;
        detail::PrefixTarget t;
        t.prefix.assign(other.encoded.bytes.begin(),
                        other.encoded.bytes.begin() + len);
        t.command_index = int(i);
        targets.push_back(std::move(t));
    }
    if (targets.empty()) return {};

    detail::SpacePlan plan;
    plan.fixed.assign(len, -1);
    uint8_t target = hash_string(spec, cmd.encoded);
    std::vector<uint8_t> buf(len, 0);
    std::vector<PrefixCollisionFinding> findings;
    detail::scan_rec(spec, plan, a, 0, spec.h_start, buf, target,
                     cmd.encoded.bytes, targets, cmd_index, findings);
    return findings;
}

// K = sum over string lengths of P(length), where P(length) adds up the
// same-length collision probabilities of the enabled commands of that
// length. Lower is better; max_p is the worst single length.
struct KReport {
    std::map<uint32_t, double> per_length;
    double k_total = 0.0;
    uint32_t max_p_length = 0;
    double max_p_value = 0.0;
};

inline KReport k_factor(const HashSpec& spec, const CommandSet& set,
                        uint32_t max_len = 5, int jobs = 1) {
    KReport r;
    EnumLimits limits{max_len, jobs};
    bool any = false;
    for (size_t i = 0; i < set.commands.size(); ++i) {
        const Command& c = set.commands[i];
        if (!c.enabled || c.length() > max_len) continue;
        ExtrinsicStat s = enumerate_criterion(spec, set, int(i),
                                              CriterionKind::SameLength, limits);
        r.per_length[c.length()] += s.p_pct;
        any = true;
    }
    if (!any)
        throw AnalyzerError("no enabled command fits the length cap " +
                            std::to_string(max_len));
    for (const auto& [len, p] : r.per_length) {
        r.k_total += p;
        if (p > r.max_p_value) {
            r.max_p_value = p;
            r.max_p_length = len;
        }
    }
    return r;
}

// A spec qualifies as collision-free when every hash value shared by two or
// more commands is shared only inside a single alias group.
inline bool intrinsic_collision_free(const CommandSet& set,
                                     std::span<const uint8_t> hashes) {
    std::map<uint8_t, std::vector<size_t>> by_hash;
    for (size_t i = 0; i < hashes.size(); ++i) by_hash[hashes[i]].push_back(i);
    for (const auto& [h, members] : by_hash) {
        if (members.size() < 2) continue;
        const std::optional<int>& g = set.commands[members[0]].alias_group;
        if (!g) return false;
        for (size_t m : members)
            if (set.commands[m].alias_group != g) return false;
    }
    return true;
}

struct RankedFunction {
    HashSpec spec;
    CoincidenceReport coincidence;
    std::optional<KReport> k;
    bool collision_free = false;
};

// Collision-free specs first, ordered by ascending K; the rest follow,
// ordered by ascending coincidence count. Ties keep the input order.
inline std::vector<RankedFunction> rank_functions(std::span<const HashSpec> specs,
                                                  const CommandSet& set,
                                                  uint32_t max_len = 5,
                                                  int jobs = 1) {
    if (specs.empty()) throw AnalyzerError("no hash functions to rank");
    std::vector<RankedFunction> ranked;
    ranked.reserve(specs.size());
    for (const HashSpec& spec : specs) {
        RankedFunction r;
        r.spec = spec;
        std::vector<uint8_t> hashes = hash_command_set(spec, set);
        r.coincidence = coincidence_analysis(hashes);
        r.collision_free = intrinsic_collision_free(set, hashes);
        if (r.collision_free) {
            try {
                r.k = k_factor(spec, set, max_len, jobs);
            } catch (const AnalyzerError&) {
                // no command fits the length cap; leave K unset
            }
        }
        ranked.push_back(std::move(r));
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedFunction& a, const RankedFunction& b) {
                         if (a.collision_free != b.collision_free)
                             return a.collision_free;
                         if (a.collision_free) {
                             if (a.k.has_value() != b.k.has_value())
                                 return a.k.has_value();
                             if (a.k) return a.k->k_total < b.k->k_total;
                             return false;
                         }
                         return a.coincidence.count_sum < b.coincidence.count_sum;
                     });
    return ranked;
}

} // namespace cmdhash
