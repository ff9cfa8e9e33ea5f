#pragma once

#include <cctype>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmdhash/alphabet.hpp"

namespace cmdhash {

struct CommandSetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Command {
    std::string text;
    EncodedString encoded;
    bool enabled = true;
    std::optional<int> alias_group;

    uint32_t length() const { return uint32_t(encoded.length()); }
};

struct CommandSet {
    std::vector<Command> commands;
    Alphabet alphabet;
};

namespace detail {

inline void check_set(const CommandSet& set) {
    if (set.commands.empty())
        throw CommandSetError("command set is empty");
    std::set<std::string> seen;
    for (const Command& c : set.commands) {
        if (c.text.empty()) throw CommandSetError("empty command text");
        if (!seen.insert(c.text).second)
            throw CommandSetError("duplicate command '" + c.text + "'");
    }
}

} // namespace detail

// Commands longer than `auto_disable_over` start out disabled: they stay in
// the set and are hashed, but are skipped by the exhaustive enumeration.
inline CommandSet make_command_set(const std::vector<std::string>& texts,
                                   Alphabet alphabet = {},
                                   uint32_t auto_disable_over = 5) {
    CommandSet set;
    set.alphabet = alphabet;
    for (const std::string& t : texts) {
        Command c;
        c.text = t;
        c.encoded = encode(t, alphabet);
        c.enabled = c.length() <= auto_disable_over;
        set.commands.push_back(std::move(c));
    }
    detail::check_set(set);
    return set;
}

// One command per line. Blank lines and lines starting with '#' are
// ignored. A leading '!' disables the command; a trailing '=N' puts it in
// alias group N (aliased commands are allowed to collide).
inline CommandSet parse_command_file(std::istream& in, Alphabet alphabet = {},
                                     uint32_t auto_disable_over = 5) {
    CommandSet set;
    set.alphabet = alphabet;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        bool bang = false;
        std::string body = line;
        if (body[0] == '!') {
            bang = true;
            body.erase(0, 1);
        }
        std::optional<int> alias;
        size_t eq = body.rfind('=');
        if (eq != std::string::npos && eq + 1 < body.size()) {
            bool digits = true;
            for (size_t i = eq + 1; i < body.size(); ++i)
                if (!std::isdigit(uint8_t(body[i]))) digits = false;
            if (digits) {
                try {
                    alias = std::stoi(body.substr(eq + 1));
                } catch (const std::exception&) {
                    throw CommandSetError("alias group out of range in '" + line +
                                          "'");
                }
                body.erase(eq);
            }
        }
        if (body.empty()) throw CommandSetError("empty command text");
        Command c;
        c.text = body;
        c.encoded = encode(body, alphabet);
        c.enabled = !bang && c.length() <= auto_disable_over;
        c.alias_group = alias;
        set.commands.push_back(std::move(c));
    }
    detail::check_set(set);
    return set;
}

inline CommandSet parse_command_text(const std::string& text, Alphabet alphabet = {},
                                     uint32_t auto_disable_over = 5) {
    std::istringstream ss(text);
    return parse_command_file(ss, alphabet, auto_disable_over);
}

} // namespace cmdhash
