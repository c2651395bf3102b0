#include "subsearch/wire.hpp"

namespace subsearch {

std::string escape_hash_separator(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        // Output-aware: a '#' that would extend a '#' already emitted gets a
        // space first, so runs like "####" can never re-form a "##".
        if (c == '#' && !out.empty() && out.back() == '#') out.push_back(' ');
        out.push_back(c);
    }
    return out;
}

namespace {

// Truncates to at most `budget` bytes without splitting a UTF-8 sequence.
std::string truncate_utf8(std::string text, std::size_t budget) {
    if (text.size() <= budget) return text;
    std::size_t cut = budget;
    while (cut > 0 && (static_cast<unsigned char>(text[cut]) & 0xC0) == 0x80) --cut;
    text.resize(cut);
    return text;
}

std::string render_group(const DocGroup& group) {
    std::string out;
    for (std::size_t i = 0; i < group.size(); ++i) {
        if (i > 0) out += ' ';
        out += "Doc " + std::to_string(i + 1) + "(Title: \"" +
               escape_hash_separator(group[i].title) + "\")";
        const std::string body = escape_hash_separator(group[i].body);
        if (!body.empty()) out += " " + body;
    }
    return out;
}

} // namespace

std::string render_information(const std::vector<DocGroup>& groups,
                               std::size_t group_char_budget) {
    std::string out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g > 0) out += " ## ";
        std::string rendered = render_group(groups[g]);
        if (group_char_budget > 0) rendered = truncate_utf8(std::move(rendered), group_char_budget);
        out += rendered;
    }
    return out;
}

namespace {

std::string tagged(std::string_view tag, std::string_view content) {
    std::string out;
    out += "<";
    out += tag;
    out += ">";
    if (content.empty()) {
        out += " ";
    } else {
        out += " ";
        out += content;
        out += " ";
    }
    out += "</";
    out += tag;
    out += ">";
    return out;
}

std::string join_subqueries(const std::vector<std::string>& subqueries) {
    std::string out;
    for (std::size_t i = 0; i < subqueries.size(); ++i) {
        if (i > 0) out += " ## ";
        out += escape_hash_separator(subqueries[i]);
    }
    return out;
}

} // namespace

std::string render_trace(const ReasoningTrace& trace, std::size_t group_char_budget) {
    std::string out;
    for (const Turn& turn : trace.turns) {
        if (!out.empty()) out += "\n";
        switch (turn.kind) {
        case TurnKind::Think: out += tagged("think", turn.content); break;
        case TurnKind::Search: out += tagged("search", join_subqueries(turn.subqueries)); break;
        case TurnKind::Information:
            out += tagged("information", render_information(turn.doc_groups, group_char_budget));
            break;
        case TurnKind::Answer: out += tagged("answer", turn.content); break;
        }
    }
    return out;
}

} // namespace subsearch
