#include "evpv/tokens.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace evpv {

namespace {

const std::array<std::string_view, 4> kStopwords = {"the", "a", "an", "of"};

bool is_stopword(const std::string& tok) {
    return std::find(kStopwords.begin(), kStopwords.end(), tok) != kStopwords.end();
}

// ASCII alphanumerics are token bytes; so is anything >= 0x80, which keeps
// UTF-8 sequences (e.g. the perpendicular sign) intact as opaque tokens.
bool is_token_byte(unsigned char c) {
    return std::isalnum(c) || c >= 0x80;
}

}  // namespace

std::vector<std::string> canonicalize_tokens(std::string_view label) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !is_stopword(cur)) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : label) {
        if (is_token_byte(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string canonical_label(std::string_view label) {
    std::string out;
    for (const auto& tok : canonicalize_tokens(label)) {
        if (!out.empty()) out.push_back(' ');
        out += tok;
    }
    return out;
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() && b.empty()) return 0.0;
    std::size_t inter = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia == *ib) {
            ++inter, ++ia, ++ib;
        } else if (*ia < *ib) {
            ++ia;
        } else {
            ++ib;
        }
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<std::string> token_union(const std::vector<std::string>& labels) {
    std::vector<std::string> out;
    for (const auto& l : labels) {
        auto toks = canonicalize_tokens(l);
        out.insert(out.end(), toks.begin(), toks.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace evpv
