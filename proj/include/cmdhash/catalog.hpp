#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmdhash/hash.hpp"

namespace cmdhash {

enum class FnRole : uint8_t {
    General,
    NotSuggested,
    ShortStringsOnly,
    PositionWeighted,
};

struct CatalogEntry {
    HashSpec spec;
    FnRole role = FnRole::General;
    std::string note;
};

// The built-in family of iterative add-and-rotate hash functions. Rows that
// are traditionally written with shifts are stored in '/' and '*' form so
// the div mode selects between truncating (floor) and round-half-to-even
// (paper) arithmetic; an explicit '>>' in a user expression always
// truncates.
inline const std::vector<CatalogEntry>& catalog() {
    static const std::vector<CatalogEntry> entries = [] {
        auto e = [](const char* name, const char* text, FnRole role,
                    const char* note) {
            CatalogEntry c;
            c.spec = make_spec(name, text);
            c.role = role;
            c.note = note;
            return c;
        };
        std::vector<CatalogEntry> v;
        v.push_back(e("h_aa_m_half", "M ^ (H + 0xAA) ^ (M / 2)", FnRole::General,
                      "alternating-bit constant folded into the running hash"));
        v.push_back(e("h_55_m_dbl", "M ^ (H + 0x55) ^ (M * 2)", FnRole::General,
                      "balanced bit turnover; strong all-round pick on letter sets"));
        v.push_back(e("m_aa_h_half", "M ^ (M + 0xAA) ^ (H / 2)", FnRole::General,
                      "trailing bytes dominate; near-identical commands tend to "
                      "share a value"));
        v.push_back(e("m_55_h_dbl", "M ^ (M + 0x55) ^ (H * 2)", FnRole::General,
                      "alternating-bit constant folded into the input byte"));
        v.push_back(e("len_shr", "M ^ (M + L - x) ^ (H / (1 << x))",
                      FnRole::PositionWeighted,
                      "needs the total length up front; unusable for streaming"));
        v.push_back(e("len_shl", "M ^ (M + L - x) ^ (H * (1 << x))",
                      FnRole::PositionWeighted,
                      "needs the total length up front; unusable for streaming"));
        v.push_back(e("pos_shift", "M ^ (M / (1 << x)) ^ (H * (1 << x))",
                      FnRole::PositionWeighted,
                      "leading characters weigh most in the final value"));
        v.push_back(e("pos_shift_rev", "M ^ (M * (1 << x)) ^ (H / (1 << x))",
                      FnRole::PositionWeighted,
                      "leading characters weigh most in the final value"));
        v.push_back(e("simple_xor", "M ^ H", FnRole::NotSuggested,
                      "order-blind: any permutation of the same letters collides"));
        v.push_back(e("half_dbl", "(M / 2) ^ (H * 2)", FnRole::General,
                      "drops the input's low bit every step"));
        v.push_back(e("dbl_half", "(M * 2) ^ (H / 2)", FnRole::General,
                      "keeps little history; a byte's influence is gone after "
                      "eight steps"));
        v.push_back(e("and_mask", "M ^ (H & M)", FnRole::ShortStringsOnly,
                      "suitable only for short strings"));
        v.push_back(e("m_half_inc", "M ^ (M / 2) ^ (H + 1)", FnRole::General, ""));
        v.push_back(e("m_quarter_inc", "M ^ (M / 4) ^ (H + 1)", FnRole::General, ""));
        v.push_back(e("shr_y_add2", "M ^ (M / (1 << y)) ^ (H + 2)", FnRole::General,
                      "y-parameterized; y defaults to 1"));
        v.push_back(e("shr_y_dbl", "M ^ (M / (1 << y)) ^ (H * 2)", FnRole::General,
                      "y-parameterized; y defaults to 1"));
        v.push_back(e("mix7_half", "M ^ (((H + 7) ^ (M * 2)) / 2)", FnRole::General,
                      ""));
        v.push_back(e("m_half_add2", "M ^ (M / 2) ^ (H + 2)", FnRole::General,
                      "shr_y_add2 written out at y = 1"));
        v.push_back(e("m_half_dbl", "M ^ (M / 2) ^ (H * 2)", FnRole::General,
                      "shr_y_dbl written out at y = 1"));
        return v;
    }();
    return entries;
}

inline const CatalogEntry* find_entry(std::string_view name) {
    for (const CatalogEntry& e : catalog())
        if (e.spec.name == name) return &e;
    return nullptr;
}

inline std::optional<HashSpec> find_spec(std::string_view name) {
    const CatalogEntry* e = find_entry(name);
    if (!e) return std::nullopt;
    return e->spec;
}

inline const char* role_name(FnRole r) {
    switch (r) {
    case FnRole::General: return "general";
    case FnRole::NotSuggested: return "not-suggested";
    case FnRole::ShortStringsOnly: return "short-strings-only";
    case FnRole::PositionWeighted: return "position-weighted";
    }
    return "general";
}

} // namespace cmdhash
