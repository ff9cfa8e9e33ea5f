#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "cmdhash/alphabet.hpp"
#include "cmdhash/expr.hpp"

namespace cmdhash {

// How '/' is evaluated.
//
// PaperRound divides exactly and rounds the quotient to the nearest integer,
// ties to even — the behaviour of a BASIC-style floating '/' whose result
// feeds an integer operator. FloorShift truncates toward zero, which is what
// a hardware right-shift computes for power-of-two divisors. The two agree
// on even operands and differ on odd ones, so a table generated under one
// mode generally cannot be reproduced under the other.
//
// '>>' always truncates, in either mode.
enum class DivMode : uint8_t { PaperRound, FloorShift };

inline const char* div_mode_name(DivMode m) {
    return m == DivMode::PaperRound ? "paper" : "floor";
}

inline DivMode parse_div_mode(std::string_view s) {
    if (s == "paper") return DivMode::PaperRound;
    if (s == "floor") return DivMode::FloorShift;
    throw std::invalid_argument("div mode must be 'paper' or 'floor'");
}

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline int64_t div_round(int64_t n, int64_t d, DivMode mode) {
    if (d == 0) throw EvalError("division by zero");
    if (mode == DivMode::FloorShift) return n / d;
    int64_t q = n / d;
    int64_t r = n % d;
    if (r == 0) return q;
    if ((r < 0) != (d < 0)) { // normalize to floor division
        q -= 1;
        r += d;
    }
    uint64_t twice = uint64_t(r < 0 ? -r : r) * 2;
    uint64_t den = uint64_t(d < 0 ? -d : d);
    if (twice > den) return q + 1;
    if (twice < den) return q;
    return (q % 2 == 0) ? q : q + 1; // tie: round to even
}

// A named iterative hash function. One step computes expr over the current
// input byte M, the previous hash H, the 1-based position x, the total
// length L and the parameter y; the step result is reduced mod 256, so the
// running state is a single byte.
struct HashSpec {
    std::string name;
    HashExpr expr;
    int64_t y_value = 1;
    DivMode div_mode = DivMode::PaperRound;
    uint8_t h_start = 0;
    bool requires_length = false; // derived: expr references L
};

inline HashSpec make_spec(std::string name, std::string_view expr_text,
                          DivMode mode = DivMode::PaperRound, int64_t y = 1,
                          uint8_t h_start = 0) {
    HashSpec s;
    s.name = std::move(name);
    s.expr = parse_expr(expr_text);
    s.y_value = y;
    s.div_mode = mode;
    s.h_start = h_start;
    s.requires_length = s.expr.references(ExprAtom::L);
    return s;
}

struct HashState {
    uint8_t h = 0;
    uint64_t pos = 1; // position of the incoming byte, first byte is 1
    std::optional<uint64_t> total_length;
};

namespace detail {

inline constexpr int64_t kMaxShift = 16;

struct EvalEnv {
    int64_t m = 0;
    int64_t h = 0;
    int64_t x = 1;
    std::optional<int64_t> l;
    int64_t y = 1;
};

inline int64_t shift_amount(int64_t v) {
    if (v < 0) throw EvalError("negative shift amount");
    return v > kMaxShift ? kMaxShift : v;
}

// Arithmetic is carried out in 64-bit signed integers without masking;
// only the per-step result is reduced mod 256. Bitwise ops use two's
// complement on the 64-bit values.
inline int64_t eval_node(const HashExpr& e, int idx, const EvalEnv& env,
                         DivMode mode) {
    const HashExpr::Node& n = e.nodes[size_t(idx)];
    switch (n.kind) {
    case HashExpr::Node::Kind::Atom:
        switch (n.atom) {
        case ExprAtom::M: return env.m;
        case ExprAtom::H: return env.h;
        case ExprAtom::X: return env.x;
        case ExprAtom::L:
            if (!env.l) throw EvalError("expression needs the total string length");
            return *env.l;
        case ExprAtom::Y: return env.y;
        }
        return 0;
    case HashExpr::Node::Kind::Literal:
        return n.value;
    case HashExpr::Node::Kind::Binary: {
        int64_t a = eval_node(e, n.lhs, env, mode);
        int64_t b = eval_node(e, n.rhs, env, mode);
        switch (n.op) {
        case ExprOp::Xor: return int64_t(uint64_t(a) ^ uint64_t(b));
        case ExprOp::And: return int64_t(uint64_t(a) & uint64_t(b));
        case ExprOp::Add: return a + b;
        case ExprOp::Sub: return a - b;
        case ExprOp::Mul: return a * b;
        case ExprOp::Div: return div_round(a, b, mode);
        case ExprOp::Shl: return a * (int64_t(1) << shift_amount(b));
        case ExprOp::Shr: return a / (int64_t(1) << shift_amount(b));
        }
        return 0;
    }
    }
    return 0;
}

inline uint8_t wrap_byte(int64_t v) {
    return uint8_t(((v % 256) + 256) % 256);
}

} // namespace detail

inline uint8_t step(const HashSpec& spec, const HashState& st, uint8_t m) {
    if (spec.requires_length && !st.total_length)
        throw EvalError("hash function '" + spec.name +
                        "' needs the total length before streaming");
    detail::EvalEnv env;
    env.m = int64_t(m);
    env.h = int64_t(st.h);
    env.x = int64_t(st.pos);
    if (st.total_length) env.l = int64_t(*st.total_length);
    env.y = spec.y_value;
    return detail::wrap_byte(detail::eval_node(spec.expr, spec.expr.root, env,
                                               spec.div_mode));
}

inline uint8_t hash_bytes(const HashSpec& spec, std::span<const uint8_t> bytes) {
    uint8_t h = spec.h_start;
    uint64_t pos = 1;
    for (uint8_t b : bytes) {
        h = step(spec, HashState{h, pos, bytes.size()}, b);
        ++pos;
    }
    return h;
}

inline uint8_t hash_string(const HashSpec& spec, const EncodedString& s) {
    return hash_bytes(spec, s.bytes);
}

} // namespace cmdhash
