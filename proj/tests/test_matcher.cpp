#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "evpv/claims.hpp"
#include "evpv/constraints.hpp"
#include "evpv/matcher.hpp"
#include "evpv/rng.hpp"

using namespace evpv;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ConstraintSet fixture_set() {
    return parse_constraints(slurp(std::string(EVPV_FIXTURE_DIR) + "/a1.constraints.json"), "a1");
}

Constraint numeric_fact(std::string entity, std::string attribute, double value,
                        std::optional<std::string> unit, double confidence) {
    Constraint c;
    c.fact = NumericFact{std::move(entity), std::move(attribute), value, std::move(unit)};
    c.confidence = confidence;
    return c;
}

Constraint relation_fact(RelationType type, std::vector<std::string> entities, double confidence) {
    Constraint c;
    c.fact = RelationFact{type, std::move(entities), std::nullopt};
    c.confidence = confidence;
    return c;
}

Constraint structure_fact(StructureType type, std::vector<std::string> parts, double confidence) {
    Constraint c;
    c.fact = StructureFact{type, std::move(parts), {}, {}};
    c.confidence = confidence;
    return c;
}

}  // namespace

TEST_CASE("numeric matching against the composite-solid facts") {
    const ConstraintSet set = fixture_set();

    SUBCASE("exact read returns the fact's confidence") {
        const MatchResult r =
            match_numeric(NumericClaim{"cylinder base radius", "length", 3.0, "cm"}, set);
        CHECK(r.support == 0.95);
        CHECK(r.rationale == MatchRationale::NumericHit);
        CHECK(r.matched_constraint == 0);
    }
    SUBCASE("misread outside tolerance scores zero but keeps the culprit") {
        // |10 - 8| / max(10, 1) = 0.2 >= 0.15
        const MatchResult r =
            match_numeric(NumericClaim{"cylinder height", "length", 10.0, "cm"}, set);
        CHECK(r.support == 0.0);
        CHECK(r.rationale == MatchRationale::NumericMiss);
        CHECK(r.matched_constraint == 1);
    }
    SUBCASE("small deviation inside tolerance still counts as a hit") {
        // |4.2 - 4| / 4.2 ~ 0.048 < 0.15
        const MatchResult r =
            match_numeric(NumericClaim{"cone height", "length", 4.2, std::nullopt}, set);
        CHECK(r.support == 0.88);
        CHECK(r.rationale == MatchRationale::NumericHit);
        CHECK(r.matched_constraint == 2);
    }
    SUBCASE("an entity with too little overlap finds no candidate") {
        const MatchResult r = match_numeric(NumericClaim{"base", "length", 3.0, "cm"}, set);
        CHECK(r.support == 0.0);
        CHECK(r.rationale == MatchRationale::NoCandidate);
        CHECK_FALSE(r.matched_constraint.has_value());
    }
    SUBCASE("attribute mismatch disqualifies the candidate") {
        const MatchResult r =
            match_numeric(NumericClaim{"cylinder base radius", "angle", 3.0, std::nullopt}, set);
        CHECK(r.rationale == MatchRationale::NoCandidate);
    }
}

TEST_CASE("the tolerance boundary is strict") {
    ConstraintSet set;
    set.constraints.push_back(numeric_fact("edge", "length", 5.0, std::nullopt, 1.0));
    const NumericClaim claim{"edge", "length", 4.0, std::nullopt};  // dev = 1/4 = 0.25

    CHECK(match_numeric(claim, set, 0.25).rationale == MatchRationale::NumericMiss);
    CHECK(match_numeric(claim, set, 0.25).support == 0.0);
    CHECK(match_numeric(claim, set, 0.2501).rationale == MatchRationale::NumericHit);
    CHECK(match_numeric(claim, set, 0.2501).support == 1.0);
}

TEST_CASE("units are compared only when both sides carry one") {
    ConstraintSet set;
    set.constraints.push_back(numeric_fact("angle A", "angle", 30.0, "degrees", 0.9));

    SUBCASE("claim without a unit matches") {
        const MatchResult r = match_numeric(NumericClaim{"angle A", "angle", 30.0, std::nullopt}, set);
        CHECK(r.support == 0.9);
        CHECK(r.rationale == MatchRationale::NumericHit);
    }
    SUBCASE("unit comparison is lexical after lowercasing") {
        CHECK(match_numeric(NumericClaim{"angle A", "angle", 30.0, "DEGREES"}, set).support == 0.9);
        // "deg" and "degrees" are different spellings, hence different units here
        CHECK(match_numeric(NumericClaim{"angle A", "angle", 30.0, "deg"}, set).rationale ==
              MatchRationale::NoCandidate);
    }
    SUBCASE("fact without a unit accepts any claim unit") {
        ConstraintSet bare;
        bare.constraints.push_back(numeric_fact("angle A", "angle", 30.0, std::nullopt, 0.9));
        CHECK(match_numeric(NumericClaim{"angle A", "angle", 30.0, "rad"}, bare).support == 0.9);
    }
}

TEST_CASE("numeric candidates are ranked by confidence, then deviation, then position") {
    SUBCASE("higher confidence wins even with a worse fit") {
        ConstraintSet set;
        set.constraints.push_back(numeric_fact("edge", "length", 10.0, std::nullopt, 0.9));
        set.constraints.push_back(numeric_fact("edge", "length", 12.0, std::nullopt, 0.8));
        // the claim reads 12: the low-confidence fact fits exactly, but the
        // high-confidence one is compared against -- and it is a miss
        const MatchResult r = match_numeric(NumericClaim{"edge", "length", 12.0, std::nullopt}, set);
        CHECK(r.matched_constraint == 0);
        CHECK(r.rationale == MatchRationale::NumericMiss);
        CHECK(r.support == 0.0);
    }
    SUBCASE("equal confidence falls back to smaller deviation") {
        ConstraintSet set;
        set.constraints.push_back(numeric_fact("edge", "length", 10.0, std::nullopt, 0.9));
        set.constraints.push_back(numeric_fact("edge", "length", 12.0, std::nullopt, 0.9));
        const MatchResult r = match_numeric(NumericClaim{"edge", "length", 12.0, std::nullopt}, set);
        CHECK(r.matched_constraint == 1);
        CHECK(r.support == 0.9);
    }
    SUBCASE("full tie keeps the first candidate") {
        ConstraintSet set;
        set.constraints.push_back(numeric_fact("edge", "length", 12.0, std::nullopt, 0.9));
        set.constraints.push_back(numeric_fact("edge", "length", 12.0, std::nullopt, 0.9));
        CHECK(match_numeric(NumericClaim{"edge", "length", 12.0, std::nullopt}, set)
                  .matched_constraint == 0);
    }
}

TEST_CASE("relation matching scores by entity-token overlap") {
    const ConstraintSet set = fixture_set();

    SUBCASE("identical entity sets return the fact's confidence") {
        const MatchResult r = match_relation(
            RelationalClaim{RelationType::Equal, {"cone base radius", "cylinder base radius"}}, set);
        CHECK(r.support == doctest::Approx(0.97));
        CHECK(r.rationale == MatchRationale::RelationOverlap);
        CHECK(r.matched_constraint == 3);
    }
    SUBCASE("no fact of the claimed type means no candidate") {
        const MatchResult r =
            match_relation(RelationalClaim{RelationType::Parallel, {"AB", "CD"}}, set);
        CHECK(r.support == 0.0);
        CHECK(r.rationale == MatchRationale::NoCandidate);
        CHECK_FALSE(r.matched_constraint.has_value());
    }
}

TEST_CASE("partial relation overlap scales the support") {
    ConstraintSet set;
    set.constraints.push_back(relation_fact(RelationType::Parallel, {"AB", "EF"}, 1.0));
    // token unions {ab, cd} vs {ab, ef}: intersection 1, union 3
    const MatchResult r = match_relation(RelationalClaim{RelationType::Parallel, {"AB", "CD"}}, set);
    CHECK(r.support == doctest::Approx(1.0 / 3.0));
    CHECK(r.rationale == MatchRationale::RelationOverlap);
    CHECK(r.matched_constraint == 0);
}

TEST_CASE("zero relation overlap reports the rationale without a culprit") {
    ConstraintSet set;
    set.constraints.push_back(relation_fact(RelationType::Parallel, {"AB", "EF"}, 1.0));
    const MatchResult r = match_relation(RelationalClaim{RelationType::Parallel, {"XY", "ZW"}}, set);
    CHECK(r.support == 0.0);
    CHECK(r.rationale == MatchRationale::RelationOverlap);  // a candidate existed
    CHECK_FALSE(r.matched_constraint.has_value());
}

TEST_CASE("the best-scoring relation candidate wins") {
    ConstraintSet set;
    set.constraints.push_back(relation_fact(RelationType::Equal, {"AB", "CD"}, 0.5));
    set.constraints.push_back(relation_fact(RelationType::Equal, {"AB", "CD"}, 0.9));
    set.constraints.push_back(relation_fact(RelationType::Equal, {"AB", "XY"}, 1.0));  // overlap 1/3
    const MatchResult r = match_relation(RelationalClaim{RelationType::Equal, {"AB", "CD"}}, set);
    CHECK(r.support == doctest::Approx(0.9));
    CHECK(r.matched_constraint == 1);
}

TEST_CASE("structural matching compares canonical part-label sets") {
    const ConstraintSet set = fixture_set();

    SUBCASE("same parts return the fact's confidence") {
        const MatchResult r = match_structural(StructuralClaim{{"cylinder", "cone"}}, set);
        CHECK(r.support == doctest::Approx(0.94));
        CHECK(r.rationale == MatchRationale::StructuralOverlap);
        CHECK(r.matched_constraint == 4);
    }
    SUBCASE("an invented extra part dilutes the overlap") {
        const MatchResult r = match_structural(StructuralClaim{{"cylinder", "cone", "sphere"}}, set);
        CHECK(r.support == doctest::Approx(0.94 * 2.0 / 3.0));
        CHECK(r.matched_constraint == 4);
    }
    SUBCASE("disjoint parts score zero with the overlap rationale") {
        const MatchResult r = match_structural(StructuralClaim{{"prism"}}, set);
        CHECK(r.support == 0.0);
        CHECK(r.rationale == MatchRationale::StructuralOverlap);
        CHECK_FALSE(r.matched_constraint.has_value());
    }
    SUBCASE("label comparison is canonical, so word order does not matter") {
        const MatchResult a = match_structural(StructuralClaim{{"the cylinder", "cone"}}, set);
        CHECK(a.support == doctest::Approx(0.94));
    }
}

TEST_CASE("unclassified claims always get the neutral half") {
    const ChecklistClaim vague = classify_claim("the figure looks symmetric");
    REQUIRE(vague.type() == ClaimType::Unclassified);

    const MatchResult with_facts = match_claim(vague, fixture_set());
    CHECK(with_facts.support == 0.5);
    CHECK(with_facts.rationale == MatchRationale::FallbackUnclassified);

    const MatchResult without_facts = match_claim(vague, ConstraintSet{});
    CHECK(without_facts.support == 0.5);
    CHECK(without_facts.rationale == MatchRationale::NoCandidate);
}

TEST_CASE("typed claims against an empty set score a strict zero") {
    const ConstraintSet empty;
    CHECK(match_numeric(NumericClaim{"edge", "length", 1.0, std::nullopt}, empty).support == 0.0);
    CHECK(match_relation(RelationalClaim{RelationType::Equal, {"a", "b"}}, empty).support == 0.0);
    CHECK(match_structural(StructuralClaim{{"p"}}, empty).support == 0.0);
    CHECK(match_numeric(NumericClaim{"edge", "length", 1.0, std::nullopt}, empty).rationale ==
          MatchRationale::NoCandidate);
}

TEST_CASE("caption pseudo-facts never support typed claims") {
    ConstraintSet set;
    Constraint cap;
    cap.fact = CaptionFact{"the cylinder base radius is 3 cm"};
    cap.confidence = 1.0;
    set.constraints.push_back(cap);

    CHECK(match_numeric(NumericClaim{"cylinder base radius", "length", 3.0, "cm"}, set).support ==
          0.0);
    CHECK(match_relation(RelationalClaim{RelationType::Equal, {"a", "b"}}, set).support == 0.0);
    CHECK(match_structural(StructuralClaim{{"cylinder"}}, set).support == 0.0);
    // but an unclassified claim still gets its neutral half: the set is not empty
    CHECK(match_claim(classify_claim("looks fine"), set).support == 0.5);
    CHECK(match_claim(classify_claim("looks fine"), set).rationale ==
          MatchRationale::FallbackUnclassified);
}

TEST_CASE("match_checklist preserves order and fills claim indices") {
    const ConstraintSet set = fixture_set();
    std::vector<StepRecord> steps;
    steps.push_back({1, "", "the cylinder base radius is 3 cm"});
    steps.push_back({2, "", "hence something follows"});
    steps.push_back({3, "", "the figure is composed of a cylinder and a cone"});
    const auto claims = extract_checklist(steps);
    REQUIRE(claims.size() == 3);

    const auto results = match_checklist(claims, set);
    REQUIRE(results.size() == 3);
    CHECK(results[0].claim_index == 0);
    CHECK(results[1].claim_index == 1);
    CHECK(results[2].claim_index == 2);
    CHECK(results[0].support == 0.95);
    CHECK(results[1].support == 0.5);
    // claim parts {figure, cylinder, cone} vs fact parts {cylinder, cone}
    CHECK(results[2].support == doctest::Approx(0.94 * 2.0 / 3.0));
}

TEST_CASE("supports always land in [0, 1]") {
    Rng rng(2024);
    const char* entities[] = {"cylinder base radius", "cone height", "edge AB", "angle 1"};
    const char* attrs[] = {"length", "angle", "count"};

    for (int iter = 0; iter < 200; ++iter) {
        ConstraintSet set;
        const std::size_t n = rng.bounded(4);
        for (std::size_t i = 0; i < n; ++i) {
            const double conf = static_cast<double>(rng.bounded(101)) / 100.0;
            switch (rng.bounded(3)) {
                case 0:
                    set.constraints.push_back(numeric_fact(entities[rng.bounded(4)],
                                                           attrs[rng.bounded(3)],
                                                           static_cast<double>(rng.bounded(20)),
                                                           std::nullopt, conf));
                    break;
                case 1:
                    set.constraints.push_back(relation_fact(
                        RelationType::Equal, {entities[rng.bounded(4)], entities[rng.bounded(4)],
                                              entities[rng.bounded(4)]},
                        conf));
                    break;
                default:
                    set.constraints.push_back(
                        structure_fact(StructureType::Composite,
                                       {entities[rng.bounded(4)], entities[rng.bounded(4)]}, conf));
            }
        }

        std::vector<ChecklistClaim> claims;
        claims.push_back(classify_claim("the cone height is 4"));
        claims.push_back(classify_claim("edge AB = angle 1"));
        claims.push_back(classify_claim("the figure is composed of a cylinder and a cone"));
        claims.push_back(classify_claim("mysterious remark"));
        for (const auto& r : match_checklist(claims, set)) {
            CHECK(r.support >= 0.0);
            CHECK(r.support <= 1.0);
        }
    }
}

TEST_CASE("adding evidence never lowers relation or structure support") {
    Rng rng(77);
    const char* labels[] = {"AB", "CD", "EF", "angle 1", "angle 2"};
    for (int iter = 0; iter < 100; ++iter) {
        ConstraintSet set;
        const std::size_t n = rng.bounded(3);
        for (std::size_t i = 0; i < n; ++i)
            set.constraints.push_back(relation_fact(
                RelationType::Equal, {labels[rng.bounded(5)], labels[rng.bounded(5)]},
                static_cast<double>(rng.bounded(101)) / 100.0));

        const RelationalClaim claim{RelationType::Equal,
                                    {labels[rng.bounded(5)], labels[rng.bounded(5)]}};
        const double before = match_relation(claim, set).support;

        ConstraintSet bigger = set;
        bigger.constraints.push_back(relation_fact(
            RelationType::Equal, {labels[rng.bounded(5)], labels[rng.bounded(5)]},
            static_cast<double>(rng.bounded(101)) / 100.0));
        const double after = match_relation(claim, bigger).support;
        CHECK(after >= before);
    }
}
