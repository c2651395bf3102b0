#include <doctest.h>

#include <algorithm>
#include <string>
#include <vector>

#include "subsearch/parser.hpp"

using namespace subsearch;

namespace {

bool has_issue(const ParseReport& report, IssueCode code) {
    return std::any_of(report.issues.begin(), report.issues.end(),
                       [code](const Issue& issue) { return issue.code == code; });
}

const char* kParallelTrace =
    "<think> Compare the two banks. </think>\n"
    "<search> how many branches does CITIC bank have ## How many branches does UniCredit have </search>\n"
    "<information> Doc 1(Title: \"CITIC\") about 773 branches. ## Doc 1(Title: \"UniCredit\") about 8500 branches. </information>\n"
    "<think> CITIC has fewer. </think>\n"
    "<answer> UniCredit </answer>";

} // namespace

TEST_CASE("well-formed parallel trace sets both flags") {
    auto report = parse_trace(kParallelTrace, "Which bank has more branches?");
    CHECK(report.f_format);
    CHECK(report.f_retrieval);
    CHECK(report.issues.empty());
    REQUIRE(report.trace.turns.size() == 5);
    CHECK(report.trace.turns[1].subqueries.size() == 2);
    CHECK(report.trace.turns[2].doc_groups.size() == 2);
    CHECK(report.trace.answer == "UniCredit");
}

TEST_CASE("bare answer without a leading think fails the sequence rule") {
    auto report = parse_trace("<answer> Beijing </answer>", "q");
    CHECK_FALSE(report.f_format);
    CHECK_FALSE(report.f_retrieval);
    CHECK(has_issue(report, IssueCode::BadTurnSequence));
    CHECK(report.trace.answer == "Beijing");
}

TEST_CASE("misaligned information demotes retrieval but not format") {
    std::string raw =
        "<think> t </think>\n"
        "<search> a ## b </search>\n"
        "<information> Doc 1(Title: \"only\") one group here </information>\n"
        "<think> t </think>\n"
        "<answer> x </answer>";
    auto report = parse_trace(raw, "q");
    CHECK(report.f_format);
    CHECK_FALSE(report.f_retrieval);
    CHECK(has_issue(report, IssueCode::MisalignedInformation));
}

TEST_CASE("no search means no retrieval flag") {
    auto report = parse_trace("<think> recall </think>\n<answer> 42 </answer>", "q");
    CHECK(report.f_format);
    CHECK_FALSE(report.f_retrieval);
}

TEST_CASE("split_subqueries trims, drops empties, keeps order") {
    CHECK(split_subqueries("a ## b") == std::vector<std::string>{"a", "b"});
    CHECK(split_subqueries("only one query") == std::vector<std::string>{"only one query"});
    CHECK(split_subqueries(" x ## ## y ") == std::vector<std::string>{"x", "y"});
    CHECK(split_subqueries("").empty());
    CHECK(split_subqueries(" ## ").empty());
}

TEST_CASE("tag pathologies are structural issues") {
    SUBCASE("unclosed tag") {
        auto r = parse_trace("<think> never closed", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::UnclosedTag));
    }
    SUBCASE("unopened close tag") {
        auto r = parse_trace("</think> <answer> x </answer>", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::UnopenedCloseTag));
    }
    SUBCASE("mismatched close tag") {
        auto r = parse_trace("<think> a </search>", "q");
        CHECK_FALSE(r.f_format);
    }
    SUBCASE("nested same-kind tag") {
        auto r = parse_trace("<think> a <think> b </think> <answer> x </answer>", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::NestedTag));
    }
    SUBCASE("empty search") {
        auto r = parse_trace("<think> t </think>\n<search>   </search>\n"
                             "<information> Doc 1(Title: \"t\") b </information>\n"
                             "<think> t </think>\n<answer> x </answer>",
                             "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::EmptySearch));
    }
}

TEST_CASE("answer multiplicity rules") {
    SUBCASE("missing answer") {
        auto r = parse_trace("<think> only thinking </think>", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::MissingAnswer));
        CHECK_FALSE(r.trace.answer.has_value());
    }
    SUBCASE("multiple answers") {
        auto r = parse_trace("<think> t </think><answer> a </answer><answer> b </answer>", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::MultipleAnswers));
    }
    SUBCASE("answer not last") {
        auto r = parse_trace("<think> t </think><answer> a </answer><think> trailing </think>", "q");
        CHECK_FALSE(r.f_format);
        CHECK(has_issue(r, IssueCode::AnswerNotLast));
    }
}

TEST_CASE("stray text is cosmetic, more than three subqueries advisory") {
    std::string raw =
        "<think> t </think>\nconnective prose\n"
        "<search> a ## b ## c ## d </search>\n"
        "<information> x ## y ## z ## w </information>\n"
        "<think> t </think>\n<answer> fine </answer>";
    auto report = parse_trace(raw, "q");
    CHECK(report.f_format);
    CHECK(report.f_retrieval);
    CHECK(has_issue(report, IssueCode::StrayText));
    CHECK(has_issue(report, IssueCode::TooManySubqueries));
    CHECK(issue_severity(IssueCode::StrayText) == IssueSeverity::Cosmetic);
    CHECK(issue_severity(IssueCode::TooManySubqueries) == IssueSeverity::Advisory);
}

TEST_CASE("issue code names are the stable kebab-case contract") {
    CHECK(issue_code_name(IssueCode::UnclosedTag) == "unclosed-tag");
    CHECK(issue_code_name(IssueCode::BadTurnSequence) == "bad-turn-sequence");
    CHECK(issue_code_name(IssueCode::MisalignedInformation) == "misaligned-information");
    CHECK(issue_code_name(IssueCode::TooManySubqueries) == "too-many-subqueries");
    CHECK(issue_severity(IssueCode::MisalignedInformation) == IssueSeverity::Retrieval);
    CHECK(issue_severity(IssueCode::UnclosedTag) == IssueSeverity::Structural);
}

TEST_CASE("information parsing keeps empty groups for alignment") {
    auto groups = parse_information_content("Doc 1(Title: \"a\") body ## ");
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].size() == 1);
    CHECK(groups[1].empty());
}

TEST_CASE("doc markers accept quoted and bare titles") {
    auto groups = parse_information_content(
        "Doc 1(Title: \"Dennis Allen (criminal)\") quoted body Doc 2(Title: UniCredit) bare body");
    REQUIRE(groups.size() == 1);
    REQUIRE(groups[0].size() == 2);
    CHECK(groups[0][0].title == "Dennis Allen (criminal)");
    CHECK(groups[0][0].body == "quoted body");
    CHECK(groups[0][0].doc_id == "1");
    CHECK(groups[0][1].title == "UniCredit");
    CHECK(groups[0][1].body == "bare body");
    CHECK(groups[0][1].doc_id == "2");
}

TEST_CASE("text before the first doc marker becomes a title-less doc") {
    auto groups = parse_information_content("loose preamble Doc 1(Title: \"t\") body");
    REQUIRE(groups.size() == 1);
    REQUIRE(groups[0].size() == 2);
    CHECK(groups[0][0].title.empty());
    CHECK(groups[0][0].body == "loose preamble");
}

TEST_CASE("parse is pure: identical input gives identical reports") {
    auto a = parse_trace(kParallelTrace, "q");
    auto b = parse_trace(kParallelTrace, "q");
    CHECK(a == b);
}

TEST_CASE("subquery and doc-group counts agree whenever retrieval holds") {
    auto report = parse_trace(kParallelTrace, "q");
    REQUIRE(report.f_retrieval);
    std::size_t subqueries = 0, groups = 0;
    for (const auto& turn : report.trace.turns) {
        subqueries += turn.subqueries.size();
        for ([[maybe_unused]] const auto& g : turn.doc_groups) ++groups;
    }
    CHECK(subqueries == groups);
}
