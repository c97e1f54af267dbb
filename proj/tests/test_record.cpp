#include <catch2/catch.hpp>

#include "patmap/record.hpp"
#include "test_support.hpp"

using namespace patmap;

namespace {

std::string line(const std::string& id, const std::string& classes,
                 const std::string& extra = "") {
    return "{\"id\":\"" + id + "\",\"date\":\"2016-01-15\",\"cpc4\":[" + classes +
           "],\"cited\":[\"u1\"]" + extra + "}\n";
}

}  // namespace

TEST_CASE("class codes are deduplicated and uppercased", "[record]") {
    auto result = parse_corpus(line("p1", "\"a61k\",\"A61K\",\"C07D\""));
    REQUIRE(result.records.size() == 1);
    REQUIRE(result.records[0].classes == std::vector<std::string>{"A61K", "C07D"});
    REQUIRE(result.warnings.empty());
}

TEST_CASE("empty input parses to an empty corpus", "[record]") {
    auto result = parse_corpus(std::string{});
    REQUIRE(result.records.empty());
    REQUIRE(result.warnings.empty());
}

TEST_CASE("lenient mode skips malformed lines with a warning", "[record]") {
    const std::string text = line("p1", "\"A61K\"") + "not json at all\n" + line("p2", "\"C07D\"");
    auto result = parse_corpus(text, ParseMode::lenient);
    REQUIRE(result.records.size() == 2);
    REQUIRE(result.warnings.size() == 1);
    REQUIRE(result.warnings[0].line == 2);
}

TEST_CASE("strict mode reports the offending line number", "[record]") {
    const std::string text = line("p1", "\"A61K\"") + "{\"id\":\"p2\"}\n";
    REQUIRE_THROWS_WITH(parse_corpus(text, ParseMode::strict), Catch::Contains("line 2"));
}

TEST_CASE("duplicate patent ids are an error in both modes", "[record]") {
    const std::string text = line("p1", "\"A61K\"") + line("p1", "\"C07D\"");
    REQUIRE_THROWS_WITH(parse_corpus(text, ParseMode::lenient), Catch::Contains("duplicate"));
    REQUIRE_THROWS_WITH(parse_corpus(text, ParseMode::strict), Catch::Contains("duplicate"));
}

TEST_CASE("records with no valid class codes are skipped and counted", "[record]") {
    const std::string text = line("p1", "\"NOPE\",\"123\"") + line("p2", "\"A61K\"");
    auto result = parse_corpus(text);
    REQUIRE(result.records.size() == 1);
    REQUIRE(result.records[0].id == "p2");
    REQUIRE(result.warnings.size() == 1);
}

TEST_CASE("invalid dates are malformed", "[record]") {
    auto bad = parse_corpus("{\"id\":\"p1\",\"date\":\"2016-02-30\",\"cpc4\":[\"A61K\"]}\n");
    REQUIRE(bad.records.empty());
    REQUIRE(bad.warnings.size() == 1);
    auto leap = parse_corpus("{\"id\":\"p1\",\"date\":\"2016-02-29\",\"cpc4\":[\"A61K\"]}\n");
    REQUIRE(leap.records.size() == 1);
}

TEST_CASE("optional fields survive a round trip", "[record]") {
    auto result = parse_corpus(line("p1", "\"A61K\"",
                                    ",\"assignee\":\"Novartis AG\",\"city\":\"Basel\","
                                    "\"country\":\"CH\""));
    REQUIRE(result.records.size() == 1);
    const auto& r = result.records[0];
    REQUIRE(r.assignee == "Novartis AG");
    REQUIRE(r.city == "Basel");
    REQUIRE(r.country == "CH");
}

TEST_CASE("parse(serialize(corpus)) round-trips", "[record]") {
    std::mt19937_64 rng(7);
    auto scheme = testsupport::make_scheme(20);
    for (int trial = 0; trial < 10; ++trial) {
        auto corpus = testsupport::random_corpus(rng, scheme, 30);
        if (trial % 2 == 0) {
            corpus[0].assignee = "Acme, \"Inc\"";
            corpus[0].city = "Boston";
            corpus[0].country = "US";
        }
        auto parsed = parse_corpus(serialize_corpus(corpus), ParseMode::strict);
        REQUIRE(parsed.records == corpus);
        REQUIRE(parsed.warnings.empty());
    }
}

TEST_CASE("empty filter matches everything", "[record]") {
    std::mt19937_64 rng(8);
    auto scheme = testsupport::make_scheme(10);
    auto corpus = testsupport::random_corpus(rng, scheme, 25);
    REQUIRE(filter_corpus(corpus, RecordFilter{}) == corpus);
}

TEST_CASE("city filter is exact and case-insensitive", "[record]") {
    std::vector<PatentRecord> corpus(3);
    corpus[0] = {"p1", {2016, 1, 1}, {"A61K"}, {}, std::nullopt, "Boston", "US"};
    corpus[1] = {"p2", {2016, 1, 2}, {"A61K"}, {}, std::nullopt, "BOSTON", "US"};
    corpus[2] = {"p3", {2016, 1, 3}, {"A61K"}, {}, std::nullopt, "Eindhoven", "NL"};

    RecordFilter f;
    f.city = "boston";
    auto got = filter_corpus(corpus, f);
    REQUIRE(got.size() == 2);
    REQUIRE(got[0].id == "p1");
    REQUIRE(got[1].id == "p2");
}

TEST_CASE("date range excluding all records yields an empty list", "[record]") {
    std::mt19937_64 rng(9);
    auto scheme = testsupport::make_scheme(10);
    auto corpus = testsupport::random_corpus(rng, scheme, 10);
    RecordFilter f;
    f.date_range = DateRange{{1900, 1, 1}, {1900, 12, 31}};
    REQUIRE(filter_corpus(corpus, f).empty());
}

TEST_CASE("assignee filter is a case-insensitive substring match", "[record]") {
    std::vector<PatentRecord> corpus(2);
    corpus[0] = {"p1", {2016, 1, 1}, {"A61K"}, {}, "Novartis AG", std::nullopt, std::nullopt};
    corpus[1] = {"p2", {2016, 1, 2}, {"A61K"}, {}, "Merck & Co", std::nullopt, std::nullopt};
    RecordFilter f;
    f.assignee_substring = "novartis";
    auto got = filter_corpus(corpus, f);
    REQUIRE(got.size() == 1);
    REQUIRE(got[0].id == "p1");
}

TEST_CASE("filter is idempotent", "[record]") {
    std::mt19937_64 rng(10);
    auto scheme = testsupport::make_scheme(10);
    auto corpus = testsupport::random_corpus(rng, scheme, 40);
    for (size_t i = 0; i < corpus.size(); i += 3) corpus[i].city = "Boston";

    RecordFilter f;
    f.city = "Boston";
    f.date_range = DateRange{{1995, 1, 1}, {2010, 12, 31}};
    auto once = filter_corpus(corpus, f);
    REQUIRE(filter_corpus(once, f) == once);
}

TEST_CASE("validation reports codes missing from the scheme", "[record]") {
    auto scheme = patmap::ClassScheme(
        std::vector<std::pair<std::string, std::string>>{{"A61K", "medical"}, {"C07D", "organic"}});

    SECTION("all codes known: empty report") {
        auto result = parse_corpus(line("p1", "\"A61K\",\"C07D\""));
        auto v = validate_against_scheme(result.records, scheme);
        REQUIRE(v.unknown.empty());
        REQUIRE(v.dropped_records == 0);
        REQUIRE(v.corpus == result.records);
    }

    SECTION("one unknown code is reported and dropped in lenient mode") {
        auto result = parse_corpus(line("p1", "\"A61K\",\"Z99Z\""));
        auto v = validate_against_scheme(result.records, scheme);
        REQUIRE(v.unknown.size() == 1);
        REQUIRE(v.unknown[0].code == "Z99Z");
        REQUIRE(v.unknown[0].patent_id == "p1");
        REQUIRE(v.corpus[0].classes == std::vector<std::string>{"A61K"});
    }

    SECTION("strict mode names the code and patent id") {
        auto result = parse_corpus(line("p1", "\"Z99Z\""));
        REQUIRE_THROWS_WITH(validate_against_scheme(result.records, scheme, ParseMode::strict),
                            Catch::Contains("Z99Z") && Catch::Contains("p1"));
    }

    SECTION("record whose only class is unknown is dropped and counted") {
        auto result = parse_corpus(line("p1", "\"Z99Z\"") + line("p2", "\"A61K\""));
        auto v = validate_against_scheme(result.records, scheme);
        REQUIRE(v.dropped_records == 1);
        REQUIRE(v.corpus.size() == 1);
        REQUIRE(v.corpus[0].id == "p2");
    }

    SECTION("after strict validation every class is in the scheme") {
        std::mt19937_64 rng(11);
        auto big_scheme = testsupport::make_scheme(15);
        auto corpus = testsupport::random_corpus(rng, big_scheme, 30);
        auto v = validate_against_scheme(corpus, big_scheme, ParseMode::strict);
        for (const auto& r : v.corpus)
            for (const auto& c : r.classes) REQUIRE(big_scheme.ordinal(c).has_value());
    }
}

TEST_CASE("scheme rejects duplicates and malformed codes", "[record]") {
    using Entries = std::vector<std::pair<std::string, std::string>>;
    REQUIRE_THROWS_AS(ClassScheme(Entries{{"A61K", "x"}, {"a61k", "y"}}), Error);
    REQUIRE_THROWS_AS(ClassScheme(Entries{{"AB1K", "x"}}), Error);
}

TEST_CASE("section labels take the leading letter", "[record]") {
    auto scheme = patmap::ClassScheme(
        std::vector<std::pair<std::string, std::string>>{{"A61K", ""}, {"H01L", ""}, {"Y02E", ""}});
    REQUIRE(section_labels(scheme) == std::vector<std::string>{"A", "H", "Y"});
}
