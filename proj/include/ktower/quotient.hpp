#pragma once

#include <set>

#include "detectors.hpp"
#include "errors.hpp"
#include "symbolic.hpp"

namespace ktower {

/// Symbol used for the collapsed class; ordinary symbols are 1..k.
inline constexpr int collapsed_symbol = 0;

/// Window quotient by the closure of the given words: each word of min_words of length n
/// is sent to 0^n, every other word is kept, and mass moves along with the words.
inline SymbolicApprox quotient_min_closure(const SymbolicApprox& approx, const std::set<Word>& min_words) {
    require(is_subword_closed(min_words), "quotient_min_closure: min_words is not closed under subwords");
    SymbolicApprox out;
    out.k = approx.k;
    out.window = approx.window;
    for (const auto& [w, r] : approx.rho) {
        if (min_words.count(w)) out.rho[Word(w.size(), collapsed_symbol)] += r;
        else out.rho[w] += r;
    }
    return out;
}

} // namespace ktower
