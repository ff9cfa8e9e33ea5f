#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cmdhash {

// The expression DSL for one iterative hash step.
//
//   atoms:      M (input byte)  H (previous hash)  x (1-based position)
//               L (total string length)  y (per-spec parameter)
//               decimal or 0x-prefixed integer literals
//   operators:  tightest to loosest, all left-associative:
//               ( )   then   * / << >>   then   + -   then   &   then   ^
//
// '^' is exclusive-or, not exponentiation. Write powers of two as shifts,
// e.g. "M / (1 << x)".

enum class ExprOp : uint8_t { Xor, And, Add, Sub, Mul, Div, Shl, Shr };
enum class ExprAtom : uint8_t { M, H, X, L, Y };

struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " at position " + std::to_string(pos)),
          position(pos) {}
};

// Expression tree stored as a flat node pool; `root` indexes into `nodes`.
// Parentheses written in the source are kept on the node so rendering can
// reproduce the original text.
struct HashExpr {
    struct Node {
        enum class Kind : uint8_t { Atom, Literal, Binary };
        Kind kind = Kind::Literal;
        ExprAtom atom = ExprAtom::M;
        int64_t value = 0;
        bool hex = false;   // literal was written with a 0x prefix
        ExprOp op = ExprOp::Xor;
        int lhs = -1;
        int rhs = -1;
        bool paren = false; // explicitly parenthesized in the source
    };

    std::vector<Node> nodes;
    int root = -1;

    bool empty() const { return root < 0; }

    bool references(ExprAtom a) const { return references_from(root, a); }

  private:
    bool references_from(int idx, ExprAtom a) const {
        if (idx < 0) return false;
        const Node& n = nodes[size_t(idx)];
        switch (n.kind) {
        case Node::Kind::Atom: return n.atom == a;
        case Node::Kind::Literal: return false;
        case Node::Kind::Binary:
            return references_from(n.lhs, a) || references_from(n.rhs, a);
        }
        return false;
    }
};

namespace detail {

inline bool node_equal(const HashExpr& a, int ia, const HashExpr& b, int ib) {
    if (ia < 0 || ib < 0) return ia == ib;
    const auto& na = a.nodes[size_t(ia)];
    const auto& nb = b.nodes[size_t(ib)];
    if (na.kind != nb.kind) return false;
    switch (na.kind) {
    case HashExpr::Node::Kind::Atom: return na.atom == nb.atom;
    case HashExpr::Node::Kind::Literal: return na.value == nb.value;
    case HashExpr::Node::Kind::Binary:
        return na.op == nb.op && node_equal(a, na.lhs, b, nb.lhs) &&
               node_equal(a, na.rhs, b, nb.rhs);
    }
    return false;
}

} // namespace detail

// Structural equality; parenthesization and literal radix do not matter.
inline bool operator==(const HashExpr& a, const HashExpr& b) {
    return detail::node_equal(a, a.root, b, b.root);
}
inline bool operator!=(const HashExpr& a, const HashExpr& b) { return !(a == b); }

namespace detail {

class ExprParser {
  public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    HashExpr parse() {
        skip_ws();
        if (at_end()) throw ParseError("empty expression", 0);
        int root = parse_xor();
        skip_ws();
        if (!at_end())
            throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
        expr_.root = root;
        return std::move(expr_);
    }

  private:
    std::string_view text_;
    size_t pos_ = 0;
    HashExpr expr_;

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
    }

    bool match(char c) {
        skip_ws();
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    bool match2(char a, char b) {
        skip_ws();
        if (pos_ + 1 < text_.size() && text_[pos_] == a && text_[pos_ + 1] == b) {
            pos_ += 2;
            return true;
        }
        return false;
    }

    int add_binary(ExprOp op, int lhs, int rhs) {
        HashExpr::Node n;
        n.kind = HashExpr::Node::Kind::Binary;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        expr_.nodes.push_back(n);
        return int(expr_.nodes.size()) - 1;
    }

    int parse_xor() {
        int lhs = parse_and();
        while (match('^')) lhs = add_binary(ExprOp::Xor, lhs, parse_and());
        return lhs;
    }

    int parse_and() {
        int lhs = parse_add();
        while (match('&')) lhs = add_binary(ExprOp::And, lhs, parse_add());
        return lhs;
    }

    int parse_add() {
        int lhs = parse_mul();
        for (;;) {
            if (match('+'))
                lhs = add_binary(ExprOp::Add, lhs, parse_mul());
            else if (match('-'))
                lhs = add_binary(ExprOp::Sub, lhs, parse_mul());
            else
                return lhs;
        }
    }

    int parse_mul() {
        int lhs = parse_primary();
        for (;;) {
            if (match2('<', '<'))
                lhs = add_binary(ExprOp::Shl, lhs, parse_primary());
            else if (match2('>', '>'))
                lhs = add_binary(ExprOp::Shr, lhs, parse_primary());
            else if (match('*'))
                lhs = add_binary(ExprOp::Mul, lhs, parse_primary());
            else if (match('/'))
                lhs = add_binary(ExprOp::Div, lhs, parse_primary());
            else
                return lhs;
        }
    }

    int parse_primary() {
        skip_ws();
        if (at_end()) throw ParseError("expected an operand", pos_);
        char c = peek();
        if (c == '(') {
            size_t open = pos_;
            ++pos_;
            int inner = parse_xor();
            skip_ws();
            if (!match(')')) throw ParseError("unbalanced '('", open);
            expr_.nodes[size_t(inner)].paren = true;
            return inner;
        }
        if (c >= '0' && c <= '9') return parse_number();
        if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_')
            return parse_atom();
        throw ParseError(std::string("unexpected '") + c + "'", pos_);
    }

    int parse_number() {
        size_t start = pos_;
        int base = 10;
        if (pos_ + 1 < text_.size() && text_[pos_] == '0' &&
            (text_[pos_ + 1] == 'x' || text_[pos_ + 1] == 'X')) {
            base = 16;
            pos_ += 2;
        }
        size_t digits_begin = pos_;
        while (!at_end() && (std::isdigit(uint8_t(peek())) ||
                             (base == 16 && std::isxdigit(uint8_t(peek())))))
            ++pos_;
        if (pos_ == digits_begin) throw ParseError("malformed integer literal", start);
        int64_t value = 0;
        auto res = std::from_chars(text_.data() + digits_begin, text_.data() + pos_,
                                   value, base);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_)
            throw ParseError("integer literal out of range", start);
        HashExpr::Node n;
        n.kind = HashExpr::Node::Kind::Literal;
        n.value = value;
        n.hex = (base == 16);
        expr_.nodes.push_back(n);
        return int(expr_.nodes.size()) - 1;
    }

    int parse_atom() {
        size_t start = pos_;
        while (!at_end() && (std::isalnum(uint8_t(peek())) || peek() == '_')) ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        ExprAtom atom;
        if (name == "M" || name == "m")
            atom = ExprAtom::M;
        else if (name == "H" || name == "h")
            atom = ExprAtom::H;
        else if (name == "x" || name == "X")
            atom = ExprAtom::X;
        else if (name == "L" || name == "l")
            atom = ExprAtom::L;
        else if (name == "y" || name == "Y")
            atom = ExprAtom::Y;
        else
            throw ParseError("unknown atom '" + std::string(name) + "'", start);
        HashExpr::Node n;
        n.kind = HashExpr::Node::Kind::Atom;
        n.atom = atom;
        expr_.nodes.push_back(n);
        return int(expr_.nodes.size()) - 1;
    }
};

inline int op_precedence(ExprOp op) {
    switch (op) {
    case ExprOp::Mul:
    case ExprOp::Div:
    case ExprOp::Shl:
    case ExprOp::Shr: return 3;
    case ExprOp::Add:
    case ExprOp::Sub: return 2;
    case ExprOp::And: return 1;
    case ExprOp::Xor: return 0;
    }
    return 0;
}

inline const char* op_token(ExprOp op) {
    switch (op) {
    case ExprOp::Xor: return "^";
    case ExprOp::And: return "&";
    case ExprOp::Add: return "+";
    case ExprOp::Sub: return "-";
    case ExprOp::Mul: return "*";
    case ExprOp::Div: return "/";
    case ExprOp::Shl: return "<<";
    case ExprOp::Shr: return ">>";
    }
    return "?";
}

inline void render_node(const HashExpr& e, int idx, int parent_prec, bool is_rhs,
                        std::string& out) {
    const HashExpr::Node& n = e.nodes[size_t(idx)];
    switch (n.kind) {
    case HashExpr::Node::Kind::Atom: {
        static constexpr const char* names[] = {"M", "H", "x", "L", "y"};
        if (n.paren) out += '(';
        out += names[size_t(n.atom)];
        if (n.paren) out += ')';
        return;
    }
    case HashExpr::Node::Kind::Literal: {
        if (n.paren) out += '(';
        if (n.hex) {
            char buf[24];
            std::snprintf(buf, sizeof buf, "0x%llX", (unsigned long long)n.value);
            out += buf;
        } else {
            out += std::to_string(n.value);
        }
        if (n.paren) out += ')';
        return;
    }
    case HashExpr::Node::Kind::Binary: {
        int prec = op_precedence(n.op);
        bool need = n.paren || prec < parent_prec || (prec == parent_prec && is_rhs);
        if (need) out += '(';
        render_node(e, n.lhs, prec, false, out);
        out += ' ';
        out += op_token(n.op);
        out += ' ';
        render_node(e, n.rhs, prec, true, out);
        if (need) out += ')';
        return;
    }
    }
}

} // namespace detail

inline HashExpr parse_expr(std::string_view text) {
    return detail::ExprParser(text).parse();
}

inline std::string render_expr(const HashExpr& e) {
    if (e.empty()) return {};
    std::string out;
    detail::render_node(e, e.root, -1, false, out);
    return out;
}

} // namespace cmdhash
