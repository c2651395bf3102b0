#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "subsearch/trace.hpp"

namespace subsearch {

// Stable issue codes; the kebab-case names from issue_code_name() are part
// of the public contract.
enum class IssueCode {
    UnclosedTag,
    UnopenedCloseTag,
    MismatchedCloseTag,
    NestedTag,
    BadTurnSequence,
    MissingAnswer,
    MultipleAnswers,
    AnswerNotLast,
    EmptySearch,
    MisalignedInformation,
    StrayText,
    TooManySubqueries,
};

enum class IssueSeverity { Structural, Retrieval, Cosmetic, Advisory };

std::string_view issue_code_name(IssueCode code);
IssueSeverity issue_severity(IssueCode code);

struct Issue {
    std::size_t position = 0; // byte offset into the raw text
    IssueCode code = IssueCode::StrayText;
    std::string message;

    bool operator==(const Issue&) const = default;
};

// Best-effort parse result. f_format == true guarantees no structural issue
// was recorded; f_retrieval additionally requires at least one search with
// aligned information groups throughout.
struct ParseReport {
    ReasoningTrace trace;
    bool f_format = false;
    bool f_retrieval = false;
    std::vector<Issue> issues;

    bool has_structural_issue() const;
    bool operator==(const ParseReport&) const = default;
};

// Total function over arbitrary bytes: never throws, always yields a report.
ParseReport parse_trace(std::string_view raw, std::string_view question);

// Split on the literal "##", trim each piece, drop empties, keep order.
std::vector<std::string> split_subqueries(std::string_view search_content);

// Information content -> doc groups: split on "##", then each group's
// documents by their "Doc N(Title: ...)" markers. Titles may be quoted or
// bare; bodies run to the next marker. Parsed docs carry positional ids and
// score 0.
std::vector<DocGroup> parse_information_content(std::string_view content);

} // namespace subsearch
