#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmdhash {

// Contiguous byte range candidate strings are drawn from, plus the offset
// added to raw input bytes before hashing. The default maps lowercase ASCII
// onto an LCD controller font page: 'a' (97) + 128 = 225 .. 'z' -> 250.
struct Alphabet {
    uint8_t lo = 225;
    uint8_t hi = 250;
    int offset = 128;

    constexpr int size() const { return int(hi) - int(lo) + 1; }
    constexpr bool contains(uint8_t b) const { return b >= lo && b <= hi; }
    constexpr uint8_t encode_byte(uint8_t raw) const {
        return uint8_t((int(raw) + offset) & 0xFF);
    }
    constexpr uint8_t decode_byte(uint8_t enc) const {
        return uint8_t((int(enc) - offset) & 0xFF);
    }
};

inline Alphabet make_alphabet(int lo, int hi, int offset) {
    if (lo < 0 || hi > 255 || lo > hi)
        throw std::invalid_argument("alphabet range must satisfy 0 <= lo <= hi <= 255");
    Alphabet a;
    a.lo = uint8_t(lo);
    a.hi = uint8_t(hi);
    a.offset = offset;
    return a;
}

// A string after offset-encoding. Bytes outside [lo, hi] are legal input but
// flagged, since enumeration denominators assume every byte is drawn from
// the alphabet.
struct EncodedString {
    std::string source_text;
    std::vector<uint8_t> bytes;
    std::vector<bool> in_alphabet;

    size_t length() const { return bytes.size(); }
    bool all_in_alphabet() const {
        for (bool b : in_alphabet)
            if (!b) return false;
        return true;
    }
};

inline EncodedString encode(std::string_view text, const Alphabet& a) {
    EncodedString s;
    s.source_text.assign(text);
    s.bytes.reserve(text.size());
    s.in_alphabet.reserve(text.size());
    for (char c : text) {
        uint8_t e = a.encode_byte(uint8_t(c));
        s.bytes.push_back(e);
        s.in_alphabet.push_back(a.contains(e));
    }
    return s;
}

inline std::string decode_bytes(const std::vector<uint8_t>& bytes, const Alphabet& a) {
    std::string out;
    out.reserve(bytes.size());
    for (uint8_t b : bytes) out.push_back(char(a.decode_byte(b)));
    return out;
}

} // namespace cmdhash
