#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace ktower {

/// Finite sequence of symbols. Partition names use symbols 1..k; odometer digits use 0..p-1.
using Word = std::vector<int>;

/// Digit string when every symbol is a single digit, otherwise comma-separated integers.
inline std::string word_to_string(const Word& w) {
    bool compact = true;
    for (int s : w) compact = compact && s >= 0 && s <= 9;
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!compact && i) out += ',';
        out += std::to_string(w[i]);
    }
    // a lone multi-digit symbol keeps a trailing comma so it does not read back as digits
    if (!compact && w.size() == 1) out += ',';
    return out;
}

inline Word parse_word(std::string_view text) {
    Word w;
    if (text.find(',') == std::string_view::npos) {
        for (char c : text) {
            require(c >= '0' && c <= '9', "malformed word '" + std::string(text) + "'");
            w.push_back(c - '0');
        }
        return w;
    }
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string_view::npos) end = text.size();
        auto tok = text.substr(start, end - start);
        if (tok.empty() && end == text.size() && w.size() == 1) break;
        require(!tok.empty(), "malformed word '" + std::string(text) + "'");
        int v = 0;
        for (char c : tok) {
            require(c >= '0' && c <= '9', "malformed word '" + std::string(text) + "'");
            v = v * 10 + (c - '0');
        }
        w.push_back(v);
        start = end + 1;
    }
    return w;
}

inline Word repeat(const Word& w, std::size_t times) {
    Word out;
    out.reserve(w.size() * times);
    for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
    return out;
}

inline Word constant_word(int symbol, std::size_t length) { return Word(length, symbol); }

inline Word concat(Word a, const Word& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline bool contains_factor(const Word& haystack, const Word& needle) {
    if (needle.size() > haystack.size()) return false;
    for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i)
        if (std::equal(needle.begin(), needle.end(), haystack.begin() + static_cast<std::ptrdiff_t>(i))) return true;
    return false;
}

} // namespace ktower
