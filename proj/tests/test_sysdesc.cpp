#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "duio/errors.hpp"
#include "duio/sysdesc.hpp"

using namespace duio;

TEST_CASE("platoon description round-trips identically") {
    const SystemDescription d = platoon_description();
    CHECK_NOTHROW(d.validate());
    const std::string text = serialize_system(d);
    const SystemDescription back = parse_system(text);
    CHECK(back == d);
    // And a second trip over the serialized form is byte-identical.
    CHECK(serialize_system(back) == text);
}

TEST_CASE("round trip survives awkward floating-point values") {
    SystemDescription d = platoon_description();
    d.A(0, 0) = 0.1;                    // not exactly representable
    d.A(1, 1) = 1.0 / 3.0;
    d.B(2, 0) = -1.2345678901234567e-13;
    d.u_bar_max = 2.0000000000000004;
    CHECK(parse_system(serialize_system(d)) == d);
}

TEST_CASE("comments and whitespace are tolerated") {
    std::string text = serialize_system(platoon_description());
    text = "# leading comment\n" + text + "\n# trailing comment\n";
    CHECK(parse_system(text) == platoon_description());
}

TEST_CASE("weighted graphs are rejected") {
    SystemDescription d = platoon_description();
    d.adjacency(0, 1) = d.adjacency(1, 0) = 0.5;
    CHECK_THROWS_WITH_AS(d.validate(),
                         doctest::Contains("weighted"), ValidationError);
    CHECK_THROWS_AS(parse_system(serialize_system(d)), ValidationError);
}

TEST_CASE("disconnected graphs are rejected naming Assumption 1") {
    SystemDescription d = platoon_description();
    d.adjacency.setZero();
    CHECK_THROWS_WITH_AS(d.validate(),
                         doctest::Contains("Assumption 1"), ValidationError);
}

TEST_CASE("shape and index validation") {
    {
        SystemDescription d = platoon_description();
        d.nodes[0].known_cols = {7};
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    {
        SystemDescription d = platoon_description();
        d.nodes[0].known_cols = {0, 0};
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    {
        SystemDescription d = platoon_description();
        d.nodes[0].known_cols = {0, 1, 2, 3};  // nothing unknown left
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    {
        SystemDescription d = platoon_description();
        d.A = Mat::Zero(3, 3);
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    {
        SystemDescription d = platoon_description();
        d.u_bar_max = 0.0;
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
    {
        SystemDescription d = platoon_description();
        d.x0 = Vec::Zero(3);
        CHECK_THROWS_AS(d.validate(), ValidationError);
    }
}

TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS(parse_system("garbage"), ValidationError);
    CHECK_THROWS_AS(parse_system(""), ValidationError);
    CHECK_THROWS_AS(parse_system("duio-system 2\n"), ValidationError);

    std::string truncated = serialize_system(platoon_description());
    truncated.resize(truncated.size() / 2);
    CHECK_THROWS_AS(parse_system(truncated), ValidationError);

    std::string trailing = serialize_system(platoon_description()) + "\nextra";
    CHECK_THROWS_AS(parse_system(trailing), ValidationError);
}

TEST_CASE("node_specs build the complementary input split") {
    const SystemDescription d = platoon_description();
    const auto specs = d.node_specs();
    REQUIRE(specs.size() == 4);
    for (int i = 0; i < 4; ++i) {
        CHECK(specs[i].index == i);
        CHECK(specs[i].known_cols == std::vector<int>{i});
        CHECK(specs[i].unknown_cols.size() == 3);
        CHECK(specs[i].B_known.cols() == 1);
        CHECK(specs[i].B_unknown.cols() == 3);
        CHECK((specs[i].B_known - d.B.col(i)).norm() == 0.0);
        // Known and unknown columns together permute to the global B.
        Mat reassembled = Mat::Zero(d.n, d.m);
        reassembled.col(specs[i].known_cols[0]) = specs[i].B_known.col(0);
        for (std::size_t k = 0; k < specs[i].unknown_cols.size(); ++k)
            reassembled.col(specs[i].unknown_cols[k]) = specs[i].B_unknown.col(k);
        CHECK((reassembled - d.B).norm() == 0.0);
    }
}
