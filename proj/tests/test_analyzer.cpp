#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "cmdhash/analyzer.hpp"
#include "cmdhash/catalog.hpp"
#include "cmdhash/oracle.hpp"
#include "motor_set.hpp"

using namespace cmdhash;

namespace {

int index_of(const CommandSet& set, const std::string& text) {
    for (size_t i = 0; i < set.commands.size(); ++i)
        if (set.commands[i].text == text) return int(i);
    FAIL("no command " + text);
    return -1;
}

HashSpec spec_of(const std::string& name) {
    auto s = find_spec(name);
    REQUIRE(s);
    return *s;
}

} // namespace

TEST_CASE("hash_command_set matches the reference tables") {
    CommandSet set = motor_set();
    std::vector<uint8_t> hashes = hash_command_set(spec_of("simple_xor"), set);
    for (const auto& [text, expected] : simple_xor_table())
        REQUIRE(int(hashes[size_t(index_of(set, text))]) == expected);

    std::vector<uint8_t> hd = hash_command_set(spec_of("m_half_dbl"), set);
    for (const auto& [text, expected] : m_half_dbl_table())
        REQUIRE(int(hd[size_t(index_of(set, text))]) == expected);
    REQUIRE(hd[size_t(index_of(set, "setspeed"))] ==
            hd[size_t(index_of(set, "targetspeed"))]);

    CommandSet one = make_command_set({"a"});
    REQUIRE(hash_command_set(spec_of("simple_xor"), one) ==
            std::vector<uint8_t>{225});
}

TEST_CASE("coincidence analysis and classification") {
    CommandSet set = motor_set();

    SECTION("all nineteen distinct: EXCELLENT") {
        auto r = coincidence_analysis(hash_command_set(spec_of("simple_xor"), set));
        REQUIRE(r.count_sum == 0);
        REQUIRE(r.max_count == 1);
        REQUIRE(r.efficiency_pct == 100.0);
        REQUIRE(r.classification == Classification::Excellent);
        REQUIRE(r.display() == "none");
    }

    SECTION("one pair at 180") {
        auto r = coincidence_analysis(hash_command_set(spec_of("m_half_dbl"), set));
        REQUIRE(r.count_sum == 2);
        REQUIRE(r.max_count == 2);
        REQUIRE(r.display() == "#180:2");
        REQUIRE_THAT(r.efficiency_pct,
                     Catch::Matchers::WithinRel(89.4736842105263, 1e-12));
        REQUIRE(r.classification == Classification::BadInappropriate);
    }

    SECTION("dbl_half: two triples and two pairs") {
        auto r = coincidence_analysis(hash_command_set(spec_of("dbl_half"), set));
        REQUIRE(r.display() == "#136:3 #149:2 #164:3 #168:2");
        REQUIRE(r.count_sum == 10);
        REQUIRE(r.max_count == 3);
        REQUIRE_THAT(r.efficiency_pct,
                     Catch::Matchers::WithinRel(100.0 - 1000.0 / 19.0, 1e-12));
        REQUIRE(r.classification == Classification::BadInappropriate);
    }

    SECTION("remaining reference coincidence tables") {
        struct Row {
            const char* fn;
            const char* display;
            int count_sum;
        };
        const Row rows[] = {
            {"m_half_add2", "#31:2 #145:2", 4},
            {"m_quarter_inc", "#19:2 #30:2 #222:2", 6},
            {"m_half_inc", "#16:2 #18:2 #25:2", 6},
            {"and_mask", "#4:2 #16:3 #228:3", 8},
            {"m_55_h_dbl", "#207:2 #231:3", 5},
            {"half_dbl", "#142:2 #254:3", 5},
            {"m_aa_h_half", "#65:3 #70:2 #76:5 #91:2", 12},
        };
        for (const Row& row : rows) {
            auto r = coincidence_analysis(hash_command_set(spec_of(row.fn), set));
            CAPTURE(row.fn);
            REQUIRE(r.display() == row.display);
            REQUIRE(r.count_sum == row.count_sum);
            REQUIRE(r.classification == Classification::BadInappropriate);
            REQUIRE_THAT(r.efficiency_pct,
                         Catch::Matchers::WithinRel(
                             100.0 - 100.0 * row.count_sum / 19.0, 1e-12));
        }
    }

    SECTION("the 5% threshold splits NOT RECOMMENDED from BAD") {
        // one colliding pair among 41 commands: ratio 4.88% < 5
        std::vector<uint8_t> h41(41);
        for (size_t i = 0; i < h41.size(); ++i) h41[i] = uint8_t(i);
        h41[40] = h41[0];
        auto r = coincidence_analysis(h41);
        REQUIRE(r.classification == Classification::NotGenerallyRecommended);
        // one colliding pair among 40: ratio exactly 5
        std::vector<uint8_t> h40(40);
        for (size_t i = 0; i < h40.size(); ++i) h40[i] = uint8_t(i);
        h40[39] = h40[0];
        auto r40 = coincidence_analysis(h40);
        REQUIRE(r40.classification == Classification::BadInappropriate);
    }

    REQUIRE_THROWS_AS(coincidence_analysis(std::vector<uint8_t>{}), AnalyzerError);
}

TEST_CASE("probability uses the full-space denominator") {
    REQUIRE_THAT(probability(14239, 26, 4),
                 Catch::Matchers::WithinAbs(3.115919, 1e-5));
    REQUIRE(probability(0, 26, 3) == 0.0);
    REQUIRE_THAT(probability(19, 26, 2),
                 Catch::Matchers::WithinAbs(2.810651, 1e-5));
    REQUIRE_THROWS_AS(probability(1, 0, 2), AnalyzerError);
    REQUIRE_THROWS_AS(probability(1, 26, 0), AnalyzerError);
}

TEST_CASE("exhaustive criterion counts reproduce the reference run") {
    CommandSet set = motor_set();
    HashSpec spec = spec_of("simple_xor");
    EnumLimits limits{5, 2};

    auto info = enumerate_criterion(spec, set, index_of(set, "info"),
                                    CriterionKind::SameLength, limits);
    REQUIRE(info.count == 14239);
    REQUIRE_THAT(info.p_pct, Catch::Matchers::WithinAbs(3.115919, 1e-5));
    REQUIRE(info.self_excluded);
    REQUIRE(!info.space_empty);

    auto info_start = enumerate_criterion(spec, set, index_of(set, "info"),
                                          CriterionKind::SameStart, limits);
    REQUIRE(info_start.count == 549);
    REQUIRE_THAT(info_start.p_pct, Catch::Matchers::WithinAbs(0.1201376, 1e-6));

    auto ds = enumerate_criterion(spec, set, index_of(set, "ds"),
                                  CriterionKind::SameLength, limits);
    REQUIRE(ds.count == 19);
    REQUIRE_THAT(ds.p_pct, Catch::Matchers::WithinAbs(2.810651, 1e-5));

    auto ds_end2 = enumerate_criterion(spec, set, index_of(set, "ds"),
                                       CriterionKind::SameEnd2, limits);
    REQUIRE(ds_end2.count == 0);
    REQUIRE(ds_end2.space_empty);
    REQUIRE(ds_end2.p_pct == 0.0);
}

TEST_CASE("criterion preconditions") {
    CommandSet set = motor_set();
    EnumLimits limits{5, 1};
    // over the length cap
    REQUIRE_THROWS_AS(enumerate_criterion(spec_of("simple_xor"), set,
                                          index_of(set, "setspeed"),
                                          CriterionKind::SameLength, limits),
                      AnalyzerError);
    CommandSet single = make_command_set({"a", "ab"});
    REQUIRE_THROWS_AS(enumerate_criterion(spec_of("simple_xor"), single, 0,
                                          CriterionKind::SameStart, limits),
                      AnalyzerError);
    REQUIRE_THROWS_AS(enumerate_criterion(spec_of("simple_xor"), single, 0,
                                          CriterionKind::SameEnd2, limits),
                      AnalyzerError);
    // same-end over one byte degenerates but is allowed
    auto s = enumerate_criterion(spec_of("simple_xor"), single, 0,
                                 CriterionKind::SameEnd1, limits);
    REQUIRE(s.count == 0);
    REQUIRE(s.space_empty);
}

TEST_CASE("oracle equivalence on a size-4 alphabet, all criteria") {
    Alphabet small = make_alphabet(225, 228, 128); // 'a'..'d'
    CommandSet set = make_command_set({"a", "ab", "abc", "bad", "cab", "dc"},
                                      small, 5);
    const char* names[] = {"simple_xor", "m_half_dbl", "h_55_m_dbl", "and_mask",
                           "pos_shift"};
    EnumLimits limits{5, 2};
    for (const char* name : names) {
        HashSpec spec = spec_of(name);
        for (size_t i = 0; i < set.commands.size(); ++i) {
            for (CriterionKind crit :
                 {CriterionKind::SameLength, CriterionKind::SameStart,
                  CriterionKind::SameEnd1, CriterionKind::SameEnd2}) {
                if ((crit == CriterionKind::SameStart ||
                     crit == CriterionKind::SameEnd2) &&
                    set.commands[i].length() < 2)
                    continue;
                CAPTURE(name, set.commands[i].text, criterion_name(crit));
                auto fast = enumerate_criterion(spec, set, int(i), crit, limits);
                auto slow = oracle_naive_count(spec, set, int(i), crit);
                REQUIRE(fast.count == slow.count);
                REQUIRE(fast.p_pct == slow.p_pct);
                REQUIRE(fast.space_empty == slow.space_empty);
                REQUIRE(fast.self_excluded == slow.self_excluded);
            }
        }
    }
}

TEST_CASE("oracle reproduces the ds reference count directly") {
    CommandSet set = motor_set();
    auto slow = oracle_naive_count(spec_of("simple_xor"), set,
                                   index_of(set, "ds"), CriterionKind::SameLength);
    REQUIRE(slow.count == 19);
    auto fast = enumerate_criterion(spec_of("simple_xor"), set, index_of(set, "ds"),
                                    CriterionKind::SameLength, EnumLimits{5, 1});
    REQUIRE(fast.count == slow.count);
    // infeasible spaces are refused
    REQUIRE_THROWS_AS(oracle_naive_count(spec_of("simple_xor"), set,
                                         index_of(set, "start"),
                                         CriterionKind::SameLength),
                      AnalyzerError);
}

TEST_CASE("oracle equivalence on randomized cases") {
    std::mt19937 rng(20250810);
    const auto& entries = catalog();
    EnumLimits limits{5, 1};
    int done = 0;
    while (done < 100) {
        int size = 3 + int(rng() % 4);
        Alphabet a = make_alphabet(225, 225 + size - 1, 128);
        uint32_t len = 1 + rng() % 3;
        std::string text;
        for (uint32_t i = 0; i < len; ++i) text += char('a' + int(rng() % size));
        const HashSpec& spec = entries[rng() % entries.size()].spec;
        CriterionKind crit = static_cast<CriterionKind>(rng() % 4);
        if ((crit == CriterionKind::SameStart || crit == CriterionKind::SameEnd2) &&
            len < 2)
            continue;
        CommandSet set = make_command_set({text}, a, 5);
        CAPTURE(spec.name, text, size, criterion_name(crit));
        auto fast = enumerate_criterion(spec, set, 0, crit, limits);
        auto slow = oracle_naive_count(spec, set, 0, crit);
        REQUIRE(fast.count == slow.count);
        REQUIRE(fast.space_empty == slow.space_empty);
        ++done;
    }
}

TEST_CASE("commands outside the alphabet are flagged, not rejected") {
    Alphabet small = make_alphabet(225, 228, 128); // 'a'..'d'
    CommandSet set = make_command_set({"az", "bb"}, small, 5);
    HashSpec spec = spec_of("simple_xor");
    EnumLimits limits{5, 1};
    auto stat = enumerate_criterion(spec, set, 0, CriterionKind::SameLength, limits);
    REQUIRE(stat.outside_alphabet);
    REQUIRE(!stat.self_excluded); // "az" cannot appear in the enumerated space
    auto slow = oracle_naive_count(spec, set, 0, CriterionKind::SameLength);
    REQUIRE(stat.count == slow.count);
    // fixing the out-of-alphabet byte keeps it in the space verbatim
    auto end1 = enumerate_criterion(spec, set, 0, CriterionKind::SameEnd1, limits);
    auto end1_slow = oracle_naive_count(spec, set, 0, CriterionKind::SameEnd1);
    REQUIRE(end1.count == end1_slow.count);
    REQUIRE(end1.self_excluded);
}

TEST_CASE("constraint monotonicity") {
    std::mt19937 rng(77);
    EnumLimits limits{5, 1};
    const auto& entries = catalog();
    for (int c = 0; c < 50; ++c) {
        int size = 3 + int(rng() % 3);
        Alphabet a = make_alphabet(225, 225 + size - 1, 128);
        uint32_t len = 2 + rng() % 2;
        std::string text;
        for (uint32_t i = 0; i < len; ++i) text += char('a' + int(rng() % size));
        CommandSet set = make_command_set({text}, a, 5);
        const HashSpec& spec = entries[rng() % entries.size()].spec;
        CAPTURE(spec.name, text, size);
        auto same = enumerate_criterion(spec, set, 0, CriterionKind::SameLength, limits);
        auto start = enumerate_criterion(spec, set, 0, CriterionKind::SameStart, limits);
        auto end1 = enumerate_criterion(spec, set, 0, CriterionKind::SameEnd1, limits);
        auto end2 = enumerate_criterion(spec, set, 0, CriterionKind::SameEnd2, limits);
        REQUIRE(start.count <= same.count);
        REQUIRE(end1.count <= same.count);
        REQUIRE(end2.count <= end1.count);
    }
}

TEST_CASE("evaluation errors surface from worker threads") {
    // M - 225 is zero exactly once per alphabet pass, so the division blows
    // up inside the enumeration, possibly on a worker thread
    HashSpec bad = make_spec("bad", "M / (M - 225)");
    CommandSet set = make_command_set({"abc"});
    for (int jobs : {1, 4})
        REQUIRE_THROWS_AS(enumerate_criterion(bad, set, 0,
                                              CriterionKind::SameLength,
                                              EnumLimits{5, jobs}),
                          EvalError);
}

TEST_CASE("rank survives sets with no enumerable commands") {
    CommandSet long_only = make_command_set({"averylongcommand", "anotherlongone"});
    std::vector<HashSpec> specs{*find_spec("simple_xor")};
    auto ranked = rank_functions(specs, long_only, 5, 1);
    REQUIRE(ranked.size() == 1);
    REQUIRE(ranked[0].collision_free);
    REQUIRE(!ranked[0].k);
}

TEST_CASE("partition determinism across worker counts") {
    CommandSet set = motor_set();
    HashSpec spec = spec_of("m_half_dbl");
    int info = index_of(set, "info");
    uint64_t expected = 0;
    for (int jobs : {1, 2, 8}) {
        auto stat = enumerate_criterion(spec, set, info, CriterionKind::SameLength,
                                        EnumLimits{5, jobs});
        if (jobs == 1) expected = stat.count;
        REQUIRE(stat.count == expected);
    }
}

TEST_CASE("count conservation over the whole space") {
    for (const char* name : {"simple_xor", "mix7_half"}) {
        HashSpec spec = spec_of(name);
        for (uint32_t len : {2u, 3u}) {
            auto hist = same_length_histogram(spec, Alphabet{}, len, 2);
            unsigned __int128 sum = 0;
            for (uint64_t v : hist) sum += v;
            unsigned __int128 want = 1;
            for (uint32_t i = 0; i < len; ++i) want *= 26;
            REQUIRE(sum == want);
        }
    }
}

TEST_CASE("prefix collision scan") {
    SECTION("the go/st/stop shadowing triple") {
        // a constant hash step makes every equal-length string a collider
        HashSpec stub = make_spec("const9", "9");
        Alphabet ascii = make_alphabet(97, 122, 0);
        CommandSet set = make_command_set({"go", "stop"}, ascii, 5);
        auto findings = prefix_collision_scan(stub, set, 0, EnumLimits{5, 1});
        REQUIRE(findings.size() == 1);
        REQUIRE(findings[0].collider == "st");
        REQUIRE(set.commands[size_t(findings[0].collides_with)].text == "go");
        REQUIRE(set.commands[size_t(findings[0].shadowed)].text == "stop");
    }

    SECTION("motor 'ds' findings agree with a direct scan") {
        CommandSet set = motor_set();
        HashSpec spec = spec_of("simple_xor");
        int ds = index_of(set, "ds");
        auto findings = prefix_collision_scan(spec, set, ds, EnumLimits{5, 1});

        // direct scan over all 676 two-byte strings
        std::vector<std::pair<std::string, std::string>> expected;
        uint8_t target = hash_string(spec, set.commands[size_t(ds)].encoded);
        for (int b0 = 225; b0 <= 250; ++b0)
            for (int b1 = 225; b1 <= 250; ++b1) {
                std::vector<uint8_t> bytes{uint8_t(b0), uint8_t(b1)};
                if (bytes == set.commands[size_t(ds)].encoded.bytes) continue;
                if (hash_bytes(spec, bytes) != target) continue;
                for (const Command& other : set.commands) {
                    if (other.length() <= 2) continue;
                    if (std::equal(bytes.begin(), bytes.end(),
                                   other.encoded.bytes.begin()))
                        expected.emplace_back(decode_bytes(bytes, set.alphabet),
                                              other.text);
                }
            }
        REQUIRE(!expected.empty());
        REQUIRE(findings.size() == expected.size());
        for (const auto& [collider, shadowed] : expected) {
            bool found = false;
            for (const auto& f : findings)
                found |= f.collider == collider &&
                         set.commands[size_t(f.shadowed)].text == shadowed;
            CAPTURE(collider, shadowed);
            REQUIRE(found);
        }
    }

    SECTION("no nesting, no findings") {
        CommandSet set = make_command_set({"ab", "cd", "ef"});
        auto findings =
            prefix_collision_scan(spec_of("simple_xor"), set, 0, EnumLimits{5, 1});
        REQUIRE(findings.empty());
    }
}

TEST_CASE("k factor") {
    CommandSet set = motor_set();

    SECTION("simple_xor across the enabled lengths") {
        KReport k = k_factor(spec_of("simple_xor"), set, 5, 2);
        REQUIRE(k.per_length.size() == 4);
        REQUIRE_THAT(k.per_length.at(2), Catch::Matchers::WithinAbs(12.7219, 1e-3));
        REQUIRE_THAT(k.per_length.at(3), Catch::Matchers::WithinAbs(6.3154, 1e-3));
        REQUIRE_THAT(k.per_length.at(4), Catch::Matchers::WithinAbs(12.4742, 1e-3));
        REQUIRE_THAT(k.per_length.at(5), Catch::Matchers::WithinAbs(6.2499, 1e-3));
        REQUIRE_THAT(k.k_total, Catch::Matchers::WithinAbs(37.7614, 1e-3));
        REQUIRE(k.max_p_length == 2);
        double sum = 0;
        for (const auto& [len, p] : k.per_length) sum += p;
        REQUIRE(k.k_total == sum);
    }

    SECTION("single enabled command") {
        CommandSet one = make_command_set({"ds"});
        KReport k = k_factor(spec_of("simple_xor"), one, 5, 1);
        auto stat = enumerate_criterion(spec_of("simple_xor"), one, 0,
                                        CriterionKind::SameLength, EnumLimits{5, 1});
        REQUIRE(k.k_total == stat.p_pct);
        REQUIRE(k.max_p_length == 2);
    }

    SECTION("additivity: dropping a length removes exactly its P") {
        KReport full = k_factor(spec_of("simple_xor"), set, 5, 2);
        KReport upTo4 = k_factor(spec_of("simple_xor"), set, 4, 2);
        REQUIRE_THAT(full.k_total - upTo4.k_total,
                     Catch::Matchers::WithinAbs(full.per_length.at(5), 1e-12));
    }

    SECTION("nothing enabled under the cap") {
        CommandSet long_only = make_command_set({"verylongcommand"});
        REQUIRE_THROWS_AS(k_factor(spec_of("simple_xor"), long_only, 5, 1),
                          AnalyzerError);
    }
}

TEST_CASE("rank_functions") {
    CommandSet set = motor_set();

    SECTION("collision-free beats colliding") {
        std::vector<HashSpec> specs{spec_of("m_half_dbl"), spec_of("simple_xor")};
        auto ranked = rank_functions(specs, set, 5, 2);
        REQUIRE(ranked[0].spec.name == "simple_xor");
        REQUIRE(ranked[0].collision_free);
        REQUIRE(ranked[0].k);
        REQUIRE(ranked[1].spec.name == "m_half_dbl");
        REQUIRE(!ranked[1].collision_free);
        REQUIRE(!ranked[1].k);
    }

    SECTION("two collision-free specs order by K") {
        std::vector<HashSpec> specs{spec_of("simple_xor"), spec_of("h_aa_m_half")};
        auto ranked = rank_functions(specs, set, 5, 2);
        REQUIRE(ranked[0].collision_free);
        REQUIRE(ranked[1].collision_free);
        REQUIRE(ranked[0].spec.name == "h_aa_m_half");
        REQUIRE(ranked[0].k->k_total < ranked[1].k->k_total);
    }

    SECTION("singleton list ranks first") {
        std::vector<HashSpec> specs{spec_of("and_mask")};
        auto ranked = rank_functions(specs, set, 5, 1);
        REQUIRE(ranked.size() == 1);
        REQUIRE(ranked[0].spec.name == "and_mask");
    }

    SECTION("alias groups excuse collisions") {
        CommandSet aliased = make_command_set({"ab", "ba", "cd"});
        aliased.commands[0].alias_group = 1;
        aliased.commands[1].alias_group = 1;
        std::vector<uint8_t> hashes =
            hash_command_set(spec_of("simple_xor"), aliased);
        REQUIRE(hashes[0] == hashes[1]); // permutation collision
        REQUIRE(intrinsic_collision_free(aliased, hashes));
        aliased.commands[1].alias_group = 2;
        REQUIRE(!intrinsic_collision_free(
            aliased, hash_command_set(spec_of("simple_xor"), aliased)));
    }

    REQUIRE_THROWS_AS(rank_functions({}, set, 5, 1), AnalyzerError);
}
