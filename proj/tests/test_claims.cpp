#include <doctest.h>

#include <string>
#include <vector>

#include "evpv/claims.hpp"

using namespace evpv;

TEST_CASE("bare measurements classify as numeric claims") {
    const ChecklistClaim c = classify_claim("the radius is 2");
    REQUIRE(c.type() == ClaimType::Numeric);
    const auto* n = c.numeric();
    CHECK(n->entity == "the radius");
    CHECK(n->value == 2.0);
    CHECK(n->attribute == "length");
    CHECK_FALSE(n->unit.has_value());
    CHECK(c.raw == "the radius is 2");
}

TEST_CASE("numeric claims pick up units and infer attributes") {
    SUBCASE("length unit, trailing period stripped") {
        const ChecklistClaim c = classify_claim("the height is 4 cm.");
        REQUIRE(c.type() == ClaimType::Numeric);
        CHECK(c.numeric()->value == 4.0);
        REQUIRE(c.numeric()->unit.has_value());
        CHECK(*c.numeric()->unit == "cm");
        CHECK(c.numeric()->attribute == "length");
    }
    SUBCASE("angle unit wins over entity wording") {
        const ChecklistClaim c = classify_claim("angle CAD = 65 degrees");
        REQUIRE(c.type() == ClaimType::Numeric);
        CHECK(c.numeric()->entity == "angle CAD");
        CHECK(c.numeric()->value == 65.0);
        CHECK(*c.numeric()->unit == "degrees");
        CHECK(c.numeric()->attribute == "angle");
    }
    SUBCASE("angle keyword in the entity") {
        const ChecklistClaim c = classify_claim("the marked angle is 30");
        REQUIRE(c.type() == ClaimType::Numeric);
        CHECK(c.numeric()->attribute == "angle");
    }
    SUBCASE("count keyword in the entity") {
        const ChecklistClaim c = classify_claim("the point count is 5");
        REQUIRE(c.type() == ClaimType::Numeric);
        CHECK(c.numeric()->attribute == "count");
    }
    SUBCASE("decimal and negative values") {
        CHECK(classify_claim("the edge measures 4.2 cm").numeric()->value == 4.2);
        const ChecklistClaim c = classify_claim("sharp corner at x = -2");
        REQUIRE(c.type() == ClaimType::Numeric);
        CHECK(c.numeric()->entity == "sharp corner at x");
        CHECK(c.numeric()->value == -2.0);
    }
}

TEST_CASE("an equality against a bare number is a measurement, not a relation") {
    // "= 65 degrees" must not produce an equal-relation with a numeric operand
    const ChecklistClaim c = classify_claim("x = 3");
    REQUIRE(c.type() == ClaimType::Numeric);
    CHECK(c.numeric()->entity == "x");
    CHECK(c.numeric()->value == 3.0);
}

TEST_CASE("symbolic relations classify with both operands") {
    const ChecklistClaim c = classify_claim("AB \xE2\x8A\xA5 CD");
    REQUIRE(c.type() == ClaimType::Relational);
    CHECK(c.relational()->type == RelationType::Perpendicular);
    CHECK(c.relational()->entities == std::vector<std::string>{"AB", "CD"});
}

TEST_CASE("worded relations strip copulas and fillers") {
    SUBCASE("perpendicular ... to") {
        const ChecklistClaim c = classify_claim("AB is perpendicular to CD");
        REQUIRE(c.type() == ClaimType::Relational);
        CHECK(c.relational()->type == RelationType::Perpendicular);
        CHECK(c.relational()->entities == std::vector<std::string>{"AB", "CD"});
    }
    SUBCASE("orthogonal is a synonym") {
        const ChecklistClaim c = classify_claim("AB is orthogonal to CD");
        REQUIRE(c.type() == ClaimType::Relational);
        CHECK(c.relational()->type == RelationType::Perpendicular);
    }
    SUBCASE("comparison with than") {
        const ChecklistClaim c = classify_claim("AB is larger than CD");
        REQUIRE(c.type() == ClaimType::Relational);
        CHECK(c.relational()->type == RelationType::Greater);
        CHECK(c.relational()->entities == std::vector<std::string>{"AB", "CD"});
    }
    SUBCASE("trailing keyword lists the operands on the left") {
        const ChecklistClaim c = classify_claim("AB and CD are parallel");
        REQUIRE(c.type() == ClaimType::Relational);
        CHECK(c.relational()->type == RelationType::Parallel);
        CHECK(c.relational()->entities == std::vector<std::string>{"AB", "CD"});
    }
}

TEST_CASE("chained equalities keep every operand") {
    const ChecklistClaim c = classify_claim("angle 1 = angle 2 = angle 3");
    REQUIRE(c.type() == ClaimType::Relational);
    CHECK(c.relational()->type == RelationType::Equal);
    CHECK(c.relational()->entities ==
          std::vector<std::string>{"angle 1", "angle 2", "angle 3"});
}

TEST_CASE("plain segment equality") {
    const ChecklistClaim c = classify_claim("AD = BC");
    REQUIRE(c.type() == ClaimType::Relational);
    CHECK(c.relational()->type == RelationType::Equal);
    CHECK(c.relational()->entities == std::vector<std::string>{"AD", "BC"});
}

TEST_CASE("attachment phrases classify as structural claims") {
    const ChecklistClaim c = classify_claim("the left part is attached by a cylinder");
    REQUIRE(c.type() == ClaimType::Structural);
    CHECK(c.structural()->parts == std::vector<std::string>{"left part", "cylinder"});
}

TEST_CASE("composed-of lists every component with canonical labels") {
    const ChecklistClaim c =
        classify_claim("the triangle is composed of angle 1, angle 2 and angle 3");
    REQUIRE(c.type() == ClaimType::Structural);
    // labels are canonical token order, not surface order
    CHECK(c.structural()->parts ==
          std::vector<std::string>{"triangle", "1 angle", "2 angle", "3 angle"});
}

TEST_CASE("'on top of' is structural, not the incident relation") {
    const ChecklistClaim c = classify_claim("the cone is on top of the cylinder");
    REQUIRE(c.type() == ClaimType::Structural);
    CHECK(c.structural()->parts == std::vector<std::string>{"cone", "cylinder"});
}

TEST_CASE("'on' outside the idiom still reads as incidence") {
    const ChecklistClaim c = classify_claim("point P is on line AB");
    REQUIRE(c.type() == ClaimType::Relational);
    CHECK(c.relational()->type == RelationType::Incident);
    CHECK(c.relational()->entities == std::vector<std::string>{"point P", "line AB"});
}

TEST_CASE("untypable declarations fall through to unclassified") {
    CHECK(classify_claim("hence x must be positive").type() == ClaimType::Unclassified);
    CHECK(classify_claim("the triangle is equilateral").type() == ClaimType::Unclassified);
    CHECK(classify_claim("42").type() == ClaimType::Unclassified);
    CHECK(classify_claim("").type() == ClaimType::Unclassified);
    const ChecklistClaim c = classify_claim("the figure looks symmetric");
    CHECK(c.type() == ClaimType::Unclassified);
    CHECK(c.raw == "the figure looks symmetric");
    CHECK(c.numeric() == nullptr);
    CHECK(c.relational() == nullptr);
    CHECK(c.structural() == nullptr);
}

TEST_CASE("synonym table lookup is case-insensitive and extensible") {
    const SynonymTable& builtin = SynonymTable::builtin();
    CHECK(builtin.lookup("orthogonal") == RelationType::Perpendicular);
    CHECK(builtin.lookup("Orthogonal") == RelationType::Perpendicular);
    CHECK(builtin.lookup("\xE2\x8A\xA5") == RelationType::Perpendicular);
    CHECK(builtin.lookup("same") == RelationType::Equal);
    CHECK_FALSE(builtin.lookup("touches").has_value());

    SynonymTable table;  // starts from the builtin entries
    CHECK(table.lookup("parallel") == RelationType::Parallel);
    table.add("Touches", RelationType::Adjacent);
    CHECK(table.lookup("touches") == RelationType::Adjacent);

    const ChecklistClaim c = classify_claim("AB touches CD", table);
    REQUIRE(c.type() == ClaimType::Relational);
    CHECK(c.relational()->type == RelationType::Adjacent);
    CHECK(c.relational()->entities == std::vector<std::string>{"AB", "CD"});

    // the builtin table does not know the added synonym
    CHECK(classify_claim("AB touches CD").type() == ClaimType::Unclassified);
}

TEST_CASE("extract_checklist keeps one claim per declaring step, in order") {
    std::vector<StepRecord> steps;
    steps.push_back({1, "look at the figure", std::nullopt});
    steps.push_back({2, "read the radius", "the radius is 2"});
    steps.push_back({3, "empty declaration means non-visual", ""});
    steps.push_back({4, "note the perpendicularity", "AB \xE2\x8A\xA5 CD"});
    steps.push_back({5, "conclude", std::nullopt});

    const auto claims = extract_checklist(steps);
    REQUIRE(claims.size() == 2);
    CHECK(claims[0].origin_step == 2);
    CHECK(claims[0].type() == ClaimType::Numeric);
    CHECK(claims[1].origin_step == 4);
    CHECK(claims[1].type() == ClaimType::Relational);
}

TEST_CASE("classification never throws on odd text") {
    const char* weird[] = {
        "== = ==",
        "   ",
        "((((",
        "is is is",
        "part",
        "composed of",
        "\xE2\x8A\xA5",
        "-5",
        "the the the",
    };
    for (const char* w : weird) {
        const ChecklistClaim c = classify_claim(w);
        CHECK(c.raw == w);  // raw text always preserved
    }
}
