#pragma once

#include <array>
#include <cstdio>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cmdhash/analyzer.hpp"

namespace cmdhash {

inline constexpr std::array<CriterionKind, 4> kAllCriteria = {
    CriterionKind::SameLength, CriterionKind::SameStart, CriterionKind::SameEnd1,
    CriterionKind::SameEnd2};

struct StatCell {
    enum class State : uint8_t { Skipped, Inapplicable, Computed };
    State state = State::Skipped;
    ExtrinsicStat stat;
};

struct ReportRow {
    std::string text;
    uint32_t length = 0;
    uint8_t hash = 0;
    bool enabled = true;
    std::array<StatCell, 4> stats; // indexed like kAllCriteria
};

struct EvaluationReport {
    std::string function_name;
    std::string expr_text;
    DivMode div_mode = DivMode::PaperRound;
    Alphabet alphabet;
    std::vector<ReportRow> rows;
    CoincidenceReport coincidence;
    std::optional<KReport> k;
    std::vector<PrefixCollisionFinding> prefix_collisions;
};

struct ReportOptions {
    std::array<bool, 4> criteria = {true, true, true, true};
    bool with_k = false;
    bool prefix_scan = true;
    EnumLimits limits;
};

inline EvaluationReport build_report(const HashSpec& spec, const CommandSet& set,
                                     const ReportOptions& opt = {}) {
    EvaluationReport rep;
    rep.function_name = spec.name;
    rep.expr_text = render_expr(spec.expr);
    rep.div_mode = spec.div_mode;
    rep.alphabet = set.alphabet;

    std::vector<uint8_t> hashes = hash_command_set(spec, set);
    rep.coincidence = coincidence_analysis(hashes);

    for (size_t i = 0; i < set.commands.size(); ++i) {
        const Command& c = set.commands[i];
        ReportRow row;
        row.text = c.text;
        row.length = c.length();
        row.hash = hashes[i];
        row.enabled = c.enabled;
        bool eligible = c.enabled && c.length() <= opt.limits.max_enum_length;
        for (size_t ci = 0; ci < 4; ++ci) {
            if (!eligible || !opt.criteria[ci]) continue;
            CriterionKind crit = kAllCriteria[ci];
            bool applicable = !((crit == CriterionKind::SameStart ||
                                 crit == CriterionKind::SameEnd2) &&
                                c.length() < 2);
            if (!applicable) {
                row.stats[ci].state = StatCell::State::Inapplicable;
                continue;
            }
            row.stats[ci].state = StatCell::State::Computed;
            row.stats[ci].stat =
                enumerate_criterion(spec, set, int(i), crit, opt.limits);
        }
        rep.rows.push_back(std::move(row));
    }

    if (opt.prefix_scan) {
        for (size_t i = 0; i < set.commands.size(); ++i) {
            const Command& c = set.commands[i];
            if (!c.enabled || c.length() > opt.limits.max_enum_length) continue;
            auto findings = prefix_collision_scan(spec, set, int(i), opt.limits);
            rep.prefix_collisions.insert(rep.prefix_collisions.end(),
                                         findings.begin(), findings.end());
        }
    }

    if (opt.with_k)
        rep.k = k_factor(spec, set, opt.limits.max_enum_length, opt.limits.jobs);
    return rep;
}

namespace detail {

inline std::string fmt_pct(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.7g", v);
    return buf;
}

inline std::string fmt_eff(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

inline std::string stat_text(const StatCell& cell) {
    switch (cell.state) {
    case StatCell::State::Skipped: return "";
    case StatCell::State::Inapplicable: return "n/a";
    case StatCell::State::Computed: {
        std::string s = std::to_string(cell.stat.count) +
                        " /P=" + fmt_pct(cell.stat.p_pct) + "%";
        if (cell.stat.space_empty) s += " (space empty)";
        return s;
    }
    }
    return "";
}

} // namespace detail

inline std::string render_text(const EvaluationReport& rep) {
    std::ostringstream out;
    out << "evaluation of the iterative hash function: H = " << rep.expr_text
        << "\n";
    out << "function: " << rep.function_name
        << "   div mode: " << div_mode_name(rep.div_mode) << "   alphabet: "
        << int(rep.alphabet.lo) << ".." << int(rep.alphabet.hi)
        << "   offset: " << rep.alphabet.offset << "\n\n";

    out << std::left << std::setw(16) << "command" << std::right << std::setw(4)
        << "len" << std::setw(6) << "hash"
        << "  " << std::left << std::setw(24) << "same-length" << std::setw(24)
        << "same-start" << std::setw(24) << "same-end(1)" << std::setw(24)
        << "same-end(2)" << "\n";
    for (const ReportRow& row : rep.rows) {
        out << std::left << std::setw(16)
            << (row.enabled ? row.text : "!" + row.text) << std::right
            << std::setw(4) << row.length << std::setw(6) << int(row.hash) << "  "
            << std::left;
        for (size_t ci = 0; ci < 4; ++ci)
            out << std::setw(24) << detail::stat_text(row.stats[ci]);
        out << "\n";
    }
    out << "\n";
    out << "coincidence table: " << rep.coincidence.display() << "\n";
    out << "Maximum coincidence count is " << rep.coincidence.max_count
        << " with a hash coincidence efficiency of "
        << detail::fmt_eff(rep.coincidence.efficiency_pct)
        << "%. The hash function is classified as "
        << classification_label(rep.coincidence.classification) << ".\n\n";

    out << "prefix collisions:";
    if (rep.prefix_collisions.empty()) {
        out << " none\n";
    } else {
        out << "\n";
        for (const PrefixCollisionFinding& f : rep.prefix_collisions)
            out << "  '" << f.collider << "' collides with '"
                << rep.rows[size_t(f.collides_with)].text << "' and shadows '"
                << rep.rows[size_t(f.shadowed)].text << "'\n";
    }

    if (rep.k) {
        out << "\nK = " << detail::fmt_pct(rep.k->k_total) << "% over lengths {";
        bool first = true;
        for (const auto& [len, p] : rep.k->per_length) {
            if (!first) out << ", ";
            first = false;
            out << len << ": " << detail::fmt_pct(p) << "%";
        }
        out << "}, max(P|length) = " << detail::fmt_pct(rep.k->max_p_value)
            << "% at length " << rep.k->max_p_length << "\n";
    }
    return out.str();
}

namespace detail {

inline nlohmann::json stat_to_json(const StatCell& cell) {
    switch (cell.state) {
    case StatCell::State::Skipped: return nullptr;
    case StatCell::State::Inapplicable: return "inapplicable";
    case StatCell::State::Computed: {
        nlohmann::json j;
        j["count"] = cell.stat.count;
        j["p_pct"] = cell.stat.p_pct;
        j["p_conditional"] = cell.stat.p_conditional;
        j["space_empty"] = cell.stat.space_empty;
        j["self_excluded"] = cell.stat.self_excluded;
        j["outside_alphabet"] = cell.stat.outside_alphabet;
        return j;
    }
    }
    return nullptr;
}

inline StatCell stat_from_json(const nlohmann::json& j, int cmd_index,
                               CriterionKind crit) {
    StatCell cell;
    if (j.is_null()) return cell;
    if (j.is_string()) {
        cell.state = StatCell::State::Inapplicable;
        return cell;
    }
    cell.state = StatCell::State::Computed;
    cell.stat.command_index = cmd_index;
    cell.stat.criterion = crit;
    cell.stat.count = j.at("count").get<uint64_t>();
    cell.stat.p_pct = j.at("p_pct").get<double>();
    cell.stat.p_conditional = j.at("p_conditional").get<double>();
    cell.stat.space_empty = j.at("space_empty").get<bool>();
    cell.stat.self_excluded = j.at("self_excluded").get<bool>();
    cell.stat.outside_alphabet = j.at("outside_alphabet").get<bool>();
    return cell;
}

} // namespace detail

inline std::string render_json(const EvaluationReport& rep) {
    nlohmann::json j;
    j["function"] = {{"name", rep.function_name}, {"expression", rep.expr_text}};
    j["div_mode"] = div_mode_name(rep.div_mode);
    j["alphabet"] = {{"lo", rep.alphabet.lo},
                     {"hi", rep.alphabet.hi},
                     {"offset", rep.alphabet.offset}};
    nlohmann::json commands = nlohmann::json::array();
    for (const ReportRow& row : rep.rows) {
        nlohmann::json r;
        r["text"] = row.text;
        r["length"] = row.length;
        r["hash"] = row.hash;
        r["enabled"] = row.enabled;
        nlohmann::json stats;
        for (size_t ci = 0; ci < 4; ++ci)
            stats[criterion_name(kAllCriteria[ci])] =
                detail::stat_to_json(row.stats[ci]);
        r["stats"] = stats;
        commands.push_back(r);
    }
    j["commands"] = commands;
    nlohmann::json coincidences = nlohmann::json::array();
    for (const auto& [value, count] : rep.coincidence.table)
        coincidences.push_back({{"hash", value}, {"count", count}});
    j["coincidences"] = coincidences;
    j["count_sum"] = rep.coincidence.count_sum;
    j["max_count"] = rep.coincidence.max_count;
    j["efficiency_pct"] = rep.coincidence.efficiency_pct;
    j["classification"] = classification_label(rep.coincidence.classification);
    if (rep.k) {
        nlohmann::json k;
        nlohmann::json per;
        for (const auto& [len, p] : rep.k->per_length) per[std::to_string(len)] = p;
        k["per_length"] = per;
        k["k_total"] = rep.k->k_total;
        k["max_p"] = {{"length", rep.k->max_p_length},
                      {"value", rep.k->max_p_value}};
        j["k"] = k;
    } else {
        j["k"] = nullptr;
    }
    nlohmann::json prefix = nlohmann::json::array();
    for (const PrefixCollisionFinding& f : rep.prefix_collisions)
        prefix.push_back({{"collider", f.collider},
                          {"collides_with", f.collides_with},
                          {"shadowed", f.shadowed}});
    j["prefix_collisions"] = prefix;
    return j.dump(2) + "\n";
}

inline EvaluationReport parse_report_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    EvaluationReport rep;
    rep.function_name = j.at("function").at("name").get<std::string>();
    rep.expr_text = j.at("function").at("expression").get<std::string>();
    rep.div_mode = parse_div_mode(j.at("div_mode").get<std::string>());
    rep.alphabet.lo = j.at("alphabet").at("lo").get<uint8_t>();
    rep.alphabet.hi = j.at("alphabet").at("hi").get<uint8_t>();
    rep.alphabet.offset = j.at("alphabet").at("offset").get<int>();
    int idx = 0;
    for (const auto& r : j.at("commands")) {
        ReportRow row;
        row.text = r.at("text").get<std::string>();
        row.length = r.at("length").get<uint32_t>();
        row.hash = r.at("hash").get<uint8_t>();
        row.enabled = r.at("enabled").get<bool>();
        for (size_t ci = 0; ci < 4; ++ci)
            row.stats[ci] = detail::stat_from_json(
                r.at("stats").at(criterion_name(kAllCriteria[ci])), idx,
                kAllCriteria[ci]);
        rep.rows.push_back(std::move(row));
        ++idx;
    }
    for (const auto& c : j.at("coincidences")) {
        int value = c.at("hash").get<int>();
        int count = c.at("count").get<int>();
        rep.coincidence.table[value] = count;
    }
    rep.coincidence.count_sum = j.at("count_sum").get<int>();
    rep.coincidence.max_count = j.at("max_count").get<int>();
    rep.coincidence.efficiency_pct = j.at("efficiency_pct").get<double>();
    std::string label = j.at("classification").get<std::string>();
    for (Classification c :
         {Classification::Excellent, Classification::NotGenerallyRecommended,
          Classification::BadInappropriate})
        if (label == classification_label(c)) rep.coincidence.classification = c;
    if (!j.at("k").is_null()) {
        KReport k;
        for (const auto& [key, val] : j.at("k").at("per_length").items())
            k.per_length[uint32_t(std::stoul(key))] = val.get<double>();
        k.k_total = j.at("k").at("k_total").get<double>();
        k.max_p_length = j.at("k").at("max_p").at("length").get<uint32_t>();
        k.max_p_value = j.at("k").at("max_p").at("value").get<double>();
        rep.k = k;
    }
    for (const auto& p : j.at("prefix_collisions")) {
        PrefixCollisionFinding f;
        f.collider = p.at("collider").get<std::string>();
        f.collides_with = p.at("collides_with").get<int>();
        f.shadowed = p.at("shadowed").get<int>();
        rep.prefix_collisions.push_back(std::move(f));
    }
    return rep;
}

inline std::string render_csv(const EvaluationReport& rep) {
    std::ostringstream out;
    out << "command,length,hash,criterion,count,p_pct,p_conditional,space_empty\n";
    char buf[40];
    for (const ReportRow& row : rep.rows) {
        for (size_t ci = 0; ci < 4; ++ci) {
            const StatCell& cell = row.stats[ci];
            if (cell.state != StatCell::State::Computed) continue;
            out << detail::csv_quote(row.text) << ',' << row.length << ','
                << int(row.hash)
                << ',' << criterion_name(kAllCriteria[ci]) << ',' << cell.stat.count
                << ',';
            std::snprintf(buf, sizeof buf, "%.9g", cell.stat.p_pct);
            out << buf << ',';
            std::snprintf(buf, sizeof buf, "%.9g", cell.stat.p_conditional);
            out << buf << ',' << (cell.stat.space_empty ? "true" : "false") << "\n";
        }
    }
    return out.str();
}

} // namespace cmdhash
