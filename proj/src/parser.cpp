#include "subsearch/parser.hpp"

#include <algorithm>
#include <array>
#include <optional>

namespace subsearch {

namespace {

constexpr std::string_view kWhitespace = " \t\r\n\v\f";

std::string_view trim_view(std::string_view s) {
    const auto first = s.find_first_not_of(kWhitespace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kWhitespace);
    return s.substr(first, last - first + 1);
}

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

std::string excerpt(std::string_view s, std::size_t limit = 32) {
    std::string out;
    for (char c : s.substr(0, limit)) out.push_back((c == '\n' || c == '\r') ? ' ' : c);
    if (s.size() > limit) out += "...";
    return out;
}

std::string_view tag_name(TurnKind kind) {
    switch (kind) {
    case TurnKind::Think: return "think";
    case TurnKind::Search: return "search";
    case TurnKind::Information: return "information";
    case TurnKind::Answer: return "answer";
    }
    return "?";
}

struct TagLiteral {
    std::string_view text;
    TurnKind kind;
    bool is_close;
};

constexpr std::array<TagLiteral, 8> kTagLiterals{{
    {"<think>", TurnKind::Think, false},
    {"</think>", TurnKind::Think, true},
    {"<search>", TurnKind::Search, false},
    {"</search>", TurnKind::Search, true},
    {"<information>", TurnKind::Information, false},
    {"</information>", TurnKind::Information, true},
    {"<answer>", TurnKind::Answer, false},
    {"</answer>", TurnKind::Answer, true},
}};

struct TagToken {
    TurnKind kind = TurnKind::Think;
    bool is_close = false;
    std::size_t pos = 0; // byte offset of '<'
    std::size_t end = 0; // one past '>'
};

std::vector<TagToken> scan_tags(std::string_view raw) {
    std::vector<TagToken> tokens;
    std::size_t i = 0;
    while (i < raw.size()) {
        if (raw[i] != '<') {
            ++i;
            continue;
        }
        bool matched = false;
        for (const TagLiteral& tag : kTagLiterals) {
            if (raw.compare(i, tag.text.size(), tag.text) == 0) {
                tokens.push_back({tag.kind, tag.is_close, i, i + tag.text.size()});
                i += tag.text.size();
                matched = true;
                break;
            }
        }
        if (!matched) ++i;
    }
    return tokens;
}

struct Region {
    TurnKind kind = TurnKind::Think;
    std::size_t open_pos = 0;
    std::size_t content_start = 0;
    std::size_t content_end = 0;
};

// Splits a doc group's text into documents by their "Doc N(Title: ...)"
// markers. Leading text before the first marker becomes a title-less doc.
DocGroup parse_doc_group(std::string_view group) {
    struct Marker {
        std::size_t pos;         // start of "Doc"
        std::size_t title_start; // after "(Title:" and optional spaces
    };
    std::vector<Marker> markers;
    std::size_t i = 0;
    while (i + 4 < group.size()) {
        if (group.compare(i, 4, "Doc ") != 0 ||
            (i > 0 && is_ascii_alnum(static_cast<unsigned char>(group[i - 1])))) {
            ++i;
            continue;
        }
        std::size_t j = i + 4;
        while (j < group.size() && group[j] == ' ') ++j;
        const std::size_t digits_start = j;
        while (j < group.size() && group[j] >= '0' && group[j] <= '9') ++j;
        if (j == digits_start || group.compare(j, 7, "(Title:") != 0) {
            ++i;
            continue;
        }
        j += 7;
        while (j < group.size() && group[j] == ' ') ++j;
        markers.push_back({i, j});
        i = j;
    }

    DocGroup docs;
    auto push_doc = [&docs](std::string_view title, std::string_view body) {
        RetrievedDoc doc;
        doc.doc_id = std::to_string(docs.size() + 1);
        doc.title = std::string(trim_view(title));
        doc.body = std::string(trim_view(body));
        doc.score = 0.0;
        docs.push_back(std::move(doc));
    };

    if (markers.empty()) {
        const std::string_view rest = trim_view(group);
        if (!rest.empty()) push_doc("", rest);
        return docs;
    }

    const std::string_view leading = trim_view(group.substr(0, markers.front().pos));
    if (!leading.empty()) push_doc("", leading);

    for (std::size_t m = 0; m < markers.size(); ++m) {
        const std::size_t segment_end = (m + 1 < markers.size()) ? markers[m + 1].pos : group.size();
        std::size_t p = markers[m].title_start;
        std::string_view title;
        std::size_t body_start = segment_end;
        if (p < segment_end && group[p] == '"') {
            const std::size_t close_quote = group.find('"', p + 1);
            if (close_quote != std::string_view::npos && close_quote < segment_end) {
                title = group.substr(p + 1, close_quote - p - 1);
                const std::size_t paren = group.find(')', close_quote + 1);
                body_start = (paren != std::string_view::npos && paren < segment_end)
                                 ? paren + 1
                                 : segment_end;
            } else {
                title = group.substr(p + 1, segment_end - p - 1);
            }
        } else {
            const std::size_t paren = group.find(')', p);
            if (paren != std::string_view::npos && paren < segment_end) {
                title = group.substr(p, paren - p);
                body_start = paren + 1;
            } else {
                title = group.substr(p, segment_end - p);
            }
        }
        push_doc(title, group.substr(body_start, segment_end - body_start));
    }
    return docs;
}

} // namespace

std::string_view issue_code_name(IssueCode code) {
    switch (code) {
    case IssueCode::UnclosedTag: return "unclosed-tag";
    case IssueCode::UnopenedCloseTag: return "unopened-close-tag";
    case IssueCode::MismatchedCloseTag: return "mismatched-close-tag";
    case IssueCode::NestedTag: return "nested-tag";
    case IssueCode::BadTurnSequence: return "bad-turn-sequence";
    case IssueCode::MissingAnswer: return "missing-answer";
    case IssueCode::MultipleAnswers: return "multiple-answers";
    case IssueCode::AnswerNotLast: return "answer-not-last";
    case IssueCode::EmptySearch: return "empty-search";
    case IssueCode::MisalignedInformation: return "misaligned-information";
    case IssueCode::StrayText: return "stray-text";
    case IssueCode::TooManySubqueries: return "too-many-subqueries";
    }
    return "unknown";
}

IssueSeverity issue_severity(IssueCode code) {
    switch (code) {
    case IssueCode::UnclosedTag:
    case IssueCode::UnopenedCloseTag:
    case IssueCode::MismatchedCloseTag:
    case IssueCode::NestedTag:
    case IssueCode::BadTurnSequence:
    case IssueCode::MissingAnswer:
    case IssueCode::MultipleAnswers:
    case IssueCode::AnswerNotLast:
    case IssueCode::EmptySearch: return IssueSeverity::Structural;
    case IssueCode::MisalignedInformation: return IssueSeverity::Retrieval;
    case IssueCode::StrayText: return IssueSeverity::Cosmetic;
    case IssueCode::TooManySubqueries: return IssueSeverity::Advisory;
    }
    return IssueSeverity::Structural;
}

bool ParseReport::has_structural_issue() const {
    return std::any_of(issues.begin(), issues.end(), [](const Issue& issue) {
        return issue_severity(issue.code) == IssueSeverity::Structural;
    });
}

std::vector<std::string> split_subqueries(std::string_view search_content) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t delim = search_content.find("##", start);
        const std::string_view piece =
            search_content.substr(start, (delim == std::string_view::npos ? search_content.size()
                                                                          : delim) -
                                             start);
        const std::string_view trimmed = trim_view(piece);
        if (!trimmed.empty()) out.emplace_back(trimmed);
        if (delim == std::string_view::npos) break;
        start = delim + 2;
    }
    return out;
}

std::vector<DocGroup> parse_information_content(std::string_view content) {
    std::vector<DocGroup> groups;
    std::size_t start = 0;
    while (true) {
        const std::size_t delim = content.find("##", start);
        const std::string_view piece =
            content.substr(start,
                           (delim == std::string_view::npos ? content.size() : delim) - start);
        groups.push_back(parse_doc_group(piece)); // empty pieces keep alignment
        if (delim == std::string_view::npos) break;
        start = delim + 2;
    }
    return groups;
}

ParseReport parse_trace(std::string_view raw, std::string_view question) {
    ParseReport report;
    report.trace.question = std::string(question);

    auto add_issue = [&report](std::size_t pos, IssueCode code, std::string message) {
        report.issues.push_back(Issue{pos, code, std::move(message)});
    };

    // --- pair open/close tags into content regions, with recovery ---
    std::vector<Region> regions;
    std::optional<Region> open;
    std::size_t last_end = 0;

    auto note_gap = [&](std::size_t from, std::size_t to) {
        const std::string_view gap = raw.substr(from, to - from);
        const auto first = gap.find_first_not_of(kWhitespace);
        if (first == std::string_view::npos) return;
        add_issue(from + first, IssueCode::StrayText,
                  "text outside tags: \"" + excerpt(trim_view(gap)) + "\"");
    };

    for (const TagToken& token : scan_tags(raw)) {
        if (!open) {
            note_gap(last_end, token.pos);
            if (token.is_close) {
                add_issue(token.pos, IssueCode::UnopenedCloseTag,
                          "</" + std::string(tag_name(token.kind)) + "> without a matching open tag");
            } else {
                open = Region{token.kind, token.pos, token.end, 0};
            }
            last_end = token.end;
            continue;
        }
        if (token.is_close) {
            if (token.kind == open->kind) {
                open->content_end = token.pos;
                regions.push_back(*open);
                open.reset();
                last_end = token.end;
            } else {
                add_issue(token.pos, IssueCode::MismatchedCloseTag,
                          "</" + std::string(tag_name(token.kind)) + "> inside <" +
                              std::string(tag_name(open->kind)) + ">; treated as content");
            }
        } else {
            if (token.kind == open->kind) {
                add_issue(token.pos, IssueCode::NestedTag,
                          "nested <" + std::string(tag_name(token.kind)) + ">; treated as content");
            } else {
                add_issue(open->open_pos, IssueCode::UnclosedTag,
                          "<" + std::string(tag_name(open->kind)) + "> never closed before <" +
                              std::string(tag_name(token.kind)) + ">");
                open->content_end = token.pos;
                regions.push_back(*open);
                open = Region{token.kind, token.pos, token.end, 0};
                last_end = token.end;
            }
        }
    }
    if (open) {
        add_issue(open->open_pos, IssueCode::UnclosedTag,
                  "<" + std::string(tag_name(open->kind)) + "> never closed");
        open->content_end = raw.size();
        regions.push_back(*open);
    } else {
        note_gap(last_end, raw.size());
    }

    // --- regions -> turns ---
    for (const Region& region : regions) {
        const std::string_view content =
            raw.substr(region.content_start, region.content_end - region.content_start);
        Turn turn;
        turn.kind = region.kind;
        switch (region.kind) {
        case TurnKind::Think:
        case TurnKind::Answer: turn.content = std::string(trim_view(content)); break;
        case TurnKind::Search:
            turn.subqueries = split_subqueries(content);
            if (turn.subqueries.empty()) {
                add_issue(region.open_pos, IssueCode::EmptySearch,
                          "<search> holds no subquery after trimming");
            } else if (turn.subqueries.size() > 3) {
                add_issue(region.open_pos, IssueCode::TooManySubqueries,
                          "search holds " + std::to_string(turn.subqueries.size()) +
                              " subqueries; at most 3 encouraged");
            }
            break;
        case TurnKind::Information: turn.doc_groups = parse_information_content(content); break;
        }
        report.trace.turns.push_back(std::move(turn));
    }

    const auto& turns = report.trace.turns;

    // --- answer presence / uniqueness / finality ---
    std::vector<std::size_t> answer_idx;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (turns[i].kind == TurnKind::Answer) answer_idx.push_back(i);
    }
    if (answer_idx.empty()) {
        add_issue(raw.size(), IssueCode::MissingAnswer, "no <answer> turn");
    } else {
        report.trace.answer = turns[answer_idx.back()].content;
        if (answer_idx.size() > 1) {
            add_issue(regions[answer_idx[1]].open_pos, IssueCode::MultipleAnswers,
                      std::to_string(answer_idx.size()) + " <answer> turns");
        }
        if (answer_idx.back() + 1 != turns.size()) {
            add_issue(regions[answer_idx.back()].open_pos, IssueCode::AnswerNotLast,
                      "<answer> is not the final turn");
        }
    }

    // --- turn-sequence shape: (Think, [Search, Information]?)*, Think, Answer ---
    enum class SeqState { ExpectThink, AfterThink, ExpectInfo, Done };
    SeqState state = SeqState::ExpectThink;
    bool sequence_broken = false;
    for (std::size_t i = 0; i < turns.size() && !sequence_broken && state != SeqState::Done; ++i) {
        const TurnKind kind = turns[i].kind;
        const std::size_t pos = regions[i].open_pos;
        switch (state) {
        case SeqState::ExpectThink:
            if (kind == TurnKind::Think) {
                state = SeqState::AfterThink;
            } else {
                add_issue(pos, IssueCode::BadTurnSequence,
                          "expected <think>, found <" + std::string(tag_name(kind)) + ">");
                sequence_broken = true;
            }
            break;
        case SeqState::AfterThink:
            if (kind == TurnKind::Think) {
                state = SeqState::AfterThink;
            } else if (kind == TurnKind::Search) {
                state = SeqState::ExpectInfo;
            } else if (kind == TurnKind::Answer) {
                state = SeqState::Done;
            } else {
                add_issue(pos, IssueCode::BadTurnSequence,
                          "<information> without a preceding <search>");
                sequence_broken = true;
            }
            break;
        case SeqState::ExpectInfo:
            if (kind == TurnKind::Information) {
                state = SeqState::ExpectThink;
            } else {
                add_issue(pos, IssueCode::BadTurnSequence,
                          "<search> must be followed by <information>, found <" +
                              std::string(tag_name(kind)) + ">");
                sequence_broken = true;
            }
            break;
        case SeqState::Done: break;
        }
    }
    // A non-Done final state needs no extra issue: either no <answer> exists
    // (MissingAnswer above) or the machine already reported the break.

    // --- search/information group alignment ---
    std::size_t search_count = 0;
    std::size_t misaligned = 0;
    for (std::size_t i = 0; i < turns.size(); ++i) {
        if (turns[i].kind != TurnKind::Search) continue;
        ++search_count;
        if (i + 1 < turns.size() && turns[i + 1].kind == TurnKind::Information) {
            const std::size_t want = turns[i].subqueries.size();
            const std::size_t got = turns[i + 1].doc_groups.size();
            if (want != got) {
                ++misaligned;
                add_issue(regions[i + 1].open_pos, IssueCode::MisalignedInformation,
                          "information holds " + std::to_string(got) + " doc groups for " +
                              std::to_string(want) + " subqueries");
            }
        }
    }

    report.f_format = !report.has_structural_issue();
    report.f_retrieval = report.f_format && search_count >= 1 && misaligned == 0;
    return report;
}

} // namespace subsearch
