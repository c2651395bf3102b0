#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "subsearch/trace.hpp"

namespace subsearch {

// Breaks every "##" by inserting a space between adjacent '#' bytes, so the
// output never contains the group separator. Lossy by design (no unescape).
std::string escape_hash_separator(std::string_view text);

// Renders doc groups in wire format: docs as `Doc N(Title: "<title>") <body>`
// joined by single spaces, groups joined by " ## ". Titles and bodies go
// through escape_hash_separator. group_char_budget > 0 truncates each
// rendered group to that many bytes (at a UTF-8 boundary).
std::string render_information(const std::vector<DocGroup>& groups,
                               std::size_t group_char_budget = 0);

// Canonical tagged rendering of a trace, one turn per line. Re-parsing the
// output of a parsed trace yields the identical trace. group_char_budget is
// forwarded to render_information (harness observation budget); 0 disables.
std::string render_trace(const ReasoningTrace& trace, std::size_t group_char_budget = 0);

} // namespace subsearch
