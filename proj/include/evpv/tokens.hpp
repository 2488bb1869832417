#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace evpv {

// Canonical token form used everywhere labels are compared: lowercase,
// split on non-alphanumeric bytes (multi-byte UTF-8 symbols survive as
// their own tokens), stopwords removed, result sorted + deduplicated.
std::vector<std::string> canonicalize_tokens(std::string_view label);

// Canonical label: canonical tokens rejoined with single spaces.
// "The Left  Part" and "left part" collapse to the same string.
std::string canonical_label(std::string_view label);

// Jaccard similarity of two canonical token sets (sorted unique vectors).
// Both empty -> 0.0.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Union of canonical tokens over several labels.
std::vector<std::string> token_union(const std::vector<std::string>& labels);

}  // namespace evpv
