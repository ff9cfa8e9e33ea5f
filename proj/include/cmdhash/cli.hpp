#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmdhash/catalog.hpp"
#include "cmdhash/matcher.hpp"
#include "cmdhash/report.hpp"

namespace cmdhash::cli {

struct RunConfig {
    std::string commands_path;
    std::string fn_name;
    std::string expr_text;
    std::string div_mode = "paper";
    int offset = 128;
    std::string alphabet_range = "225..250";
    int64_t y = 1;
    int h_start = 0;
    std::string criteria = "length,start,end1,end2";
    uint32_t max_enum_len = 5;
    int jobs = 0; // 0 = all cores
    std::string format = "text";
    std::string out_path;
    std::string specs_path;
    bool require_collision_free = false;
    bool with_k = false;
    bool raw_stream = false;
    bool no_auto_reset = false;
};

namespace detail {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Alphabet resolve_alphabet(const RunConfig& cfg) {
    size_t dots = cfg.alphabet_range.find("..");
    if (dots == std::string::npos)
        throw ConfigError("--alphabet expects LO..HI, e.g. 225..250");
    int lo = 0, hi = 0;
    try {
        lo = std::stoi(cfg.alphabet_range.substr(0, dots));
        hi = std::stoi(cfg.alphabet_range.substr(dots + 2));
    } catch (const std::exception&) {
        throw ConfigError("--alphabet expects LO..HI, e.g. 225..250");
    }
    return make_alphabet(lo, hi, cfg.offset);
}

inline HashSpec resolve_spec(const RunConfig& cfg) {
    if (cfg.fn_name.empty() == cfg.expr_text.empty())
        throw ConfigError("give exactly one of --fn NAME or --expr STRING");
    HashSpec spec;
    if (!cfg.fn_name.empty()) {
        auto found = find_spec(cfg.fn_name);
        if (!found)
            throw ConfigError("unknown function '" + cfg.fn_name +
                              "'; see the catalog subcommand");
        spec = *found;
    } else {
        spec = make_spec(cfg.expr_text, cfg.expr_text);
    }
    spec.div_mode = parse_div_mode(cfg.div_mode);
    spec.y_value = cfg.y;
    if (cfg.h_start < 0 || cfg.h_start > 255)
        throw ConfigError("--h-start must be a byte");
    spec.h_start = uint8_t(cfg.h_start);
    return spec;
}

inline CommandSet load_commands(const RunConfig& cfg, const Alphabet& a) {
    if (cfg.commands_path.empty())
        throw ConfigError("--commands FILE is required");
    std::ifstream in(cfg.commands_path);
    if (!in) throw ConfigError("cannot read '" + cfg.commands_path + "'");
    return parse_command_file(in, a, cfg.max_enum_len);
}

struct CriteriaSelection {
    std::array<bool, 4> eval = {false, false, false, false};
    MatchCriteria match;
};

inline CriteriaSelection parse_criteria(const std::string& list) {
    CriteriaSelection sel;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        if (tok == "length") {
            sel.eval[0] = true;
        } else if (tok == "start") {
            sel.eval[1] = true;
            sel.match.first_char = true;
        } else if (tok == "end1") {
            sel.eval[2] = true;
            sel.match.last1 = true;
        } else if (tok == "end2") {
            sel.eval[3] = true;
            sel.match.last2 = true;
        } else {
            throw ConfigError("unknown criterion '" + tok +
                              "' (expected length,start,end1,end2)");
        }
    }
    return sel;
}

struct OutputTarget {
    std::ostream* stream;
    std::unique_ptr<std::ofstream> file;
};

inline OutputTarget open_output(const RunConfig& cfg, std::ostream& fallback) {
    OutputTarget t{&fallback, nullptr};
    if (!cfg.out_path.empty()) {
        t.file = std::make_unique<std::ofstream>(cfg.out_path);
        if (!*t.file) throw ConfigError("cannot write '" + cfg.out_path + "'");
        t.stream = t.file.get();
    }
    return t;
}

inline bool collision_gate(const HashSpec& spec, const CommandSet& set,
                           std::ostream& err) {
    std::vector<uint8_t> hashes = hash_command_set(spec, set);
    if (intrinsic_collision_free(set, hashes)) return true;
    CoincidenceReport r = coincidence_analysis(hashes);
    err << "intrinsic collisions present: " << r.display() << "\n";
    return false;
}

inline int cmd_hash(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Alphabet a = resolve_alphabet(cfg);
    HashSpec spec = resolve_spec(cfg);
    CommandSet set = load_commands(cfg, a);
    std::vector<uint8_t> hashes = hash_command_set(spec, set);
    OutputTarget target = open_output(cfg, out);
    if (cfg.format == "json") {
        nlohmann::json j;
        j["function"] = {{"name", spec.name},
                         {"expression", render_expr(spec.expr)}};
        nlohmann::json rows = nlohmann::json::array();
        for (size_t i = 0; i < set.commands.size(); ++i)
            rows.push_back({{"text", set.commands[i].text},
                            {"length", set.commands[i].length()},
                            {"hash", hashes[i]}});
        j["hashes"] = rows;
        *target.stream << j.dump(2) << "\n";
    } else if (cfg.format == "csv") {
        *target.stream << "command,length,hash\n";
        for (size_t i = 0; i < set.commands.size(); ++i)
            *target.stream << cmdhash::detail::csv_quote(set.commands[i].text)
                           << ',' << set.commands[i].length() << ','
                           << int(hashes[i]) << "\n";
    } else {
        for (size_t i = 0; i < set.commands.size(); ++i)
            *target.stream << set.commands[i].text << ' ' << int(hashes[i]) << "\n";
    }
    if (cfg.require_collision_free && !collision_gate(spec, set, err)) return 1;
    return 0;
}

inline int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Alphabet a = resolve_alphabet(cfg);
    HashSpec spec = resolve_spec(cfg);
    CommandSet set = load_commands(cfg, a);
    ReportOptions opt;
    opt.criteria = parse_criteria(cfg.criteria).eval;
    opt.with_k = cfg.with_k;
    opt.limits.max_enum_length = cfg.max_enum_len;
    opt.limits.jobs = cfg.jobs;
    EvaluationReport rep = build_report(spec, set, opt);
    OutputTarget target = open_output(cfg, out);
    if (cfg.format == "json")
        *target.stream << render_json(rep);
    else if (cfg.format == "csv")
        *target.stream << render_csv(rep);
    else
        *target.stream << render_text(rep);
    if (cfg.require_collision_free && !collision_gate(spec, set, err)) return 1;
    return 0;
}

inline std::string fmt_k(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline int cmd_rank(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    Alphabet a = resolve_alphabet(cfg);
    CommandSet set = load_commands(cfg, a);
    DivMode mode = parse_div_mode(cfg.div_mode);
    std::vector<HashSpec> specs;
    if (!cfg.specs_path.empty()) {
        std::ifstream in(cfg.specs_path);
        if (!in) throw ConfigError("cannot read '" + cfg.specs_path + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            if (auto found = find_spec(line))
                specs.push_back(*found);
            else
                specs.push_back(make_spec(line, line));
        }
        if (specs.empty()) throw ConfigError("no functions in '" + cfg.specs_path + "'");
    } else {
        for (const CatalogEntry& e : catalog()) specs.push_back(e.spec);
    }
    for (HashSpec& s : specs) {
        s.div_mode = mode;
        s.y_value = cfg.y;
        s.h_start = uint8_t(cfg.h_start);
    }
    std::vector<RankedFunction> ranked =
        rank_functions(specs, set, cfg.max_enum_len, cfg.jobs);
    OutputTarget target = open_output(cfg, out);
    if (cfg.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const RankedFunction& r : ranked) {
            nlohmann::json j;
            j["name"] = r.spec.name;
            j["expression"] = render_expr(r.spec.expr);
            j["collision_free"] = r.collision_free;
            j["classification"] =
                classification_label(r.coincidence.classification);
            j["efficiency_pct"] = r.coincidence.efficiency_pct;
            j["count_sum"] = r.coincidence.count_sum;
            j["coincidences"] = r.coincidence.display();
            if (r.k)
                j["k_total"] = r.k->k_total;
            else
                j["k_total"] = nullptr;
            rows.push_back(j);
        }
        *target.stream << rows.dump(2) << "\n";
    } else {
        int rank = 1;
        for (const RankedFunction& r : ranked) {
            std::ostringstream line;
            line << std::left << std::setw(4) << rank++ << std::setw(16)
                 << r.spec.name << std::setw(36) << render_expr(r.spec.expr)
                 << std::setw(28)
                 << classification_label(r.coincidence.classification);
            if (r.k)
                line << "K=" << fmt_k(r.k->k_total) << "%";
            else
                line << "coincidences: " << r.coincidence.display();
            *target.stream << line.str() << "\n";
        }
    }
    (void)err;
    return 0;
}

inline int cmd_catalog(const RunConfig& cfg, std::ostream& out) {
    OutputTarget target = open_output(cfg, out);
    if (cfg.format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        for (const CatalogEntry& e : catalog())
            rows.push_back({{"name", e.spec.name},
                            {"expression", render_expr(e.spec.expr)},
                            {"role", role_name(e.role)},
                            {"note", e.note}});
        *target.stream << rows.dump(2) << "\n";
    } else {
        for (const CatalogEntry& e : catalog()) {
            *target.stream << std::left << std::setw(16) << e.spec.name
                           << std::setw(36) << render_expr(e.spec.expr)
                           << std::setw(20) << role_name(e.role) << e.note << "\n";
        }
    }
    return 0;
}

inline int cmd_match(const RunConfig& cfg, std::istream& in, std::ostream& out,
                     std::ostream& err) {
    Alphabet a = resolve_alphabet(cfg);
    HashSpec spec = resolve_spec(cfg);
    CommandSet set = load_commands(cfg, a);
    MatchCriteria criteria = parse_criteria(cfg.criteria).match;
    MatcherConfig matcher;
    try {
        matcher = build_matcher(spec, set, criteria, !cfg.no_auto_reset);
    } catch (const IntrinsicSameLengthCollision& e) {
        err << "cannot build matcher: " << e.what() << "\n";
        return 1;
    }
    for (const std::string& w : matcher.warnings) err << "note: " << w << "\n";
    MatcherState st = make_state(matcher);
    int ch;
    while ((ch = in.get()) != EOF) {
        char c = char(ch);
        if (!cfg.raw_stream && (c == '\n' || c == '\r')) {
            reset(matcher, st);
            continue;
        }
        if (auto ev = feed(matcher, st, uint8_t(c)))
            out << "MATCH " << ev->id << " " << matcher.texts[size_t(ev->id)]
                << " hash=" << int(ev->hash) << " len=" << ev->length << "\n";
    }
    return 0;
}

} // namespace detail

// Entry point shared by the binary and the tests. Returns the process exit
// code: 0 on success, 1 when --require-collision-free found unaliased
// collisions (or the matcher could not be built because of one), 2 for
// configuration and input errors.
inline int run(const std::vector<std::string>& args, std::istream& in,
               std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"workbench for 1-byte iterative command-set hash functions",
                 "cmdhash"};
    app.require_subcommand(1);

    auto add_common = [&cfg](CLI::App* sub, bool needs_fn, bool needs_commands) {
        if (needs_commands)
            sub->add_option("--commands", cfg.commands_path,
                            "command file, one command per line");
        if (needs_fn) {
            sub->add_option("--fn", cfg.fn_name, "catalog function name");
            sub->add_option("--expr", cfg.expr_text, "hash step expression");
        }
        sub->add_option("--div-mode", cfg.div_mode, "paper|floor")
            ->check(CLI::IsMember({"paper", "floor"}));
        sub->add_option("--offset", cfg.offset, "byte offset added before hashing");
        sub->add_option("--alphabet", cfg.alphabet_range,
                        "encoded byte range LO..HI");
        sub->add_option("--y", cfg.y, "value of the y atom");
        sub->add_option("--h-start", cfg.h_start, "initial hash state");
        sub->add_option("--max-enum-len", cfg.max_enum_len,
                        "exhaustive enumeration length cap");
        sub->add_option("--jobs", cfg.jobs, "worker threads (0 = all cores)");
        sub->add_option("--format", cfg.format, "text|json|csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        sub->add_option("--out", cfg.out_path, "write output to a file");
    };

    CLI::App* hash = app.add_subcommand("hash", "hash every command");
    add_common(hash, true, true);
    hash->add_flag("--require-collision-free", cfg.require_collision_free,
                   "exit 1 if unaliased commands collide");

    CLI::App* eval = app.add_subcommand("eval", "full collision evaluation");
    add_common(eval, true, true);
    eval->add_option("--criteria", cfg.criteria,
                     "comma list of length,start,end1,end2");
    eval->add_flag("--k-factor", cfg.with_k, "compute the overall K factor");
    eval->add_flag("--require-collision-free", cfg.require_collision_free,
                   "exit 1 if unaliased commands collide");

    CLI::App* rank = app.add_subcommand("rank", "rank hash functions for a set");
    add_common(rank, false, true);
    rank->add_option("--specs", cfg.specs_path,
                     "file of function names or expressions (default: catalog)");

    CLI::App* match = app.add_subcommand("match", "stream recognizer on stdin");
    add_common(match, true, true);
    match->add_option("--criteria", cfg.criteria,
                      "extra checks: start,end1,end2");
    match->add_flag("--raw", cfg.raw_stream,
                    "hash newline bytes instead of resetting on them");
    match->add_flag("--no-auto-reset", cfg.no_auto_reset,
                    "latch after a match until the stream resets");

    CLI::App* cat = app.add_subcommand("catalog", "list built-in functions");
    cat->add_option("--format", cfg.format, "text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cat->add_option("--out", cfg.out_path, "write output to a file");

    std::vector<const char*> argv;
    argv.push_back("cmdhash");
    for (const std::string& s : args) argv.push_back(s.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (hash->parsed()) return detail::cmd_hash(cfg, out, err);
        if (eval->parsed()) return detail::cmd_eval(cfg, out, err);
        if (rank->parsed()) return detail::cmd_rank(cfg, out, err);
        if (cat->parsed()) return detail::cmd_catalog(cfg, out);
        if (match->parsed()) {
            // the recognizer's extra checks are opt-in
            if (match->count("--criteria") == 0) cfg.criteria = "";
            return detail::cmd_match(cfg, in, out, err);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}

} // namespace cmdhash::cli
