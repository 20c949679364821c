#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fiet/constructions.hpp"
#include "fiet/error.hpp"
#include "fiet/records.hpp"

using namespace fiet;

TEST_CASE("fIET records round-trip") {
    for (const auto& f : {make_fiet("-2 1", {"3/10", "7/10"}), glue_flip(golden_rotation()),
                          make_fiet("3 -1 2", {"0.25", "0.5", "0.25"}, Backend::parse("float:80"))}) {
        auto j = fiet_to_json(f);
        auto g = fiet_from_json_text(j.dump());
        CHECK(g.perm() == f.perm());
        CHECK(g.lengths().backend() == f.lengths().backend());
        CHECK(fiet_to_json(g).dump() == j.dump());
    }
    auto j = fiet_to_json(make_fiet("-2 1", {"3/10", "7/10"}));
    CHECK(j.dump() == R"({"perm":"-2 1","lengths":["3/10","7/10"],"backend":"rational"})");
    CHECK_THROWS_AS(fiet_from_json_text("{\"perm\": \"2 1\"}"), ParseError);
    CHECK_THROWS_AS(fiet_from_json_text("not json"), ParseError);
    CHECK_THROWS_AS(fiet_from_json_text(R"({"perm":"2 1","lengths":[1,2]})"), ParseError);
}

TEST_CASE("paths as JSON lines") {
    auto p = parse_permutation("3 2 1");
    Case cases[] = {Case::A, Case::B, Case::A, Case::B, Case::A, Case::B};
    auto path = path_from_cases(p, cases);
    auto text = path_to_jsonl(path);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
    CHECK(text.rfind(R"({"case":"A","winner":)", 0) == 0);
    auto back = path_from_jsonl(text);
    REQUIRE(back.size() == path.size());
    CHECK(back.induction_matrix() == path.induction_matrix());
    CHECK(path_to_jsonl(back) == text);

    // The first arrow does not end where it starts.
    auto first = text.substr(0, text.find('\n') + 1);
    CHECK_THROWS_AS(path_from_jsonl(first + first), ChainMismatch);
    CHECK_THROWS_AS(path_from_jsonl(""), ParseError);
}
