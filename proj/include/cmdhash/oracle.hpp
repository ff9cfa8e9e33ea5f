#pragma once

#include <cstdint>
#include <vector>

#include "cmdhash/analyzer.hpp"

namespace cmdhash {

// Independent check for enumerate_criterion: a flat odometer walks every
// combination of the free positions (rightmost digit fastest), builds the
// whole candidate string, rehashes it from scratch and compares. Nothing is
// shared with the production path's prefix-reusing depth-first counting.
// Feasible only while alphabet_size^length stays small.
inline ExtrinsicStat oracle_naive_count(const HashSpec& spec, const CommandSet& set,
                                        int cmd_index, CriterionKind crit) {
    const Command& cmd = set.commands.at(size_t(cmd_index));
    const Alphabet& a = set.alphabet;
    uint32_t len = cmd.length();
    if (crit == CriterionKind::SameStart && len < 2)
        throw AnalyzerError("same-start is undefined for length-1 commands");
    if (crit == CriterionKind::SameEnd2 && len < 2)
        throw AnalyzerError("same-end2 needs a command of length >= 2");

    std::vector<uint8_t> s(cmd.encoded.bytes);
    std::vector<int> free_pos;
    for (uint32_t i = 0; i < len; ++i) {
        bool fixed = (crit == CriterionKind::SameStart && i == 0) ||
                     (crit == CriterionKind::SameEnd1 && i == len - 1) ||
                     (crit == CriterionKind::SameEnd2 && i >= len - 2);
        if (!fixed) free_pos.push_back(int(i));
    }

    unsigned __int128 total = 1;
    for (size_t i = 0; i < free_pos.size(); ++i) {
        total *= unsigned(a.size());
        if (total > 1000000) throw AnalyzerError("space too large for the oracle");
    }

    uint8_t target = hash_bytes(spec, cmd.encoded.bytes);
    uint64_t count = 0;
    uint64_t others_in_space = 0;

    std::vector<uint8_t> odo(free_pos.size(), a.lo);
    for (;;) {
        for (size_t i = 0; i < free_pos.size(); ++i) s[size_t(free_pos[i])] = odo[i];
        if (s != cmd.encoded.bytes) {
            ++others_in_space;
            if (hash_bytes(spec, s) == target) ++count;
        }
        // advance the odometer, rightmost digit first
        bool wrapped = true;
        for (size_t i = odo.size(); i-- > 0;) {
            if (odo[i] < a.hi) {
                ++odo[i];
                wrapped = false;
                break;
            }
            odo[i] = a.lo;
        }
        if (wrapped) break;
    }

    ExtrinsicStat stat;
    stat.command_index = cmd_index;
    stat.criterion = crit;
    stat.count = count;
    stat.p_pct = probability(count, a.size(), len);
    unsigned __int128 space = 1;
    for (size_t i = 0; i < free_pos.size(); ++i) space *= unsigned(a.size());
    stat.p_conditional = double(100.0L * (long double)count / (long double)space);
    bool self_inside = true;
    for (int p : free_pos)
        if (!a.contains(cmd.encoded.bytes[size_t(p)])) self_inside = false;
    stat.self_excluded = self_inside;
    stat.space_empty = others_in_space == 0 && self_inside;
    stat.outside_alphabet = !cmd.encoded.all_in_alphabet();
    return stat;
}

} // namespace cmdhash
