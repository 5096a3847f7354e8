#pragma once

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "propmatch/detail/text.hpp"

namespace propmatch {

inline constexpr std::size_t kStringSimilarityCount = 8;

// Classic DP edit distance (unit costs), two-row variant.
inline std::size_t levenshtein_distance(std::string_view a,
                                        std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    std::vector<std::size_t> prev(b.size() + 1), curr(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        curr[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t subst =
                prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            curr[j] = std::min({prev[j] + 1, curr[j - 1] + 1, subst});
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

inline double jaro_similarity(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    const std::size_t max_len = std::max(a.size(), b.size());
    const std::size_t window = max_len / 2 == 0 ? 0 : max_len / 2 - 1;
    std::vector<bool> a_matched(a.size(), false), b_matched(b.size(), false);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(b.size(), i + window + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            if (b_matched[j] || a[i] != b[j]) continue;
            a_matched[i] = b_matched[j] = true;
            ++matches;
            break;
        }
    }
    if (matches == 0) return 0.0;
    std::size_t transpositions = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a_matched[i]) continue;
        while (!b_matched[j]) ++j;
        if (a[i] != b[j]) ++transpositions;
        ++j;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(transpositions) / 2.0;
    return (m / static_cast<double>(a.size()) +
            m / static_cast<double>(b.size()) + (m - t) / m) /
           3.0;
}

inline std::size_t common_prefix_length(std::string_view a,
                                        std::string_view b) {
    const std::size_t n = std::min(a.size(), b.size());
    std::size_t i = 0;
    while (i < n && a[i] == b[i]) ++i;
    return i;
}

// Winkler prefix boost: scale 0.1, prefix capped at 4, applied
// unconditionally.
inline double jaro_winkler_similarity(std::string_view a,
                                      std::string_view b) {
    const double j = jaro_similarity(a, b);
    const double prefix = static_cast<double>(
        std::min<std::size_t>(common_prefix_length(a, b), 4));
    return j + prefix * 0.1 * (1.0 - j);
}

inline double token_set_jaccard(std::string_view a, std::string_view b) {
    auto toks_a = detail::whitespace_tokens(a);
    auto toks_b = detail::whitespace_tokens(b);
    std::set<std::string_view> sa(toks_a.begin(), toks_a.end());
    std::set<std::string_view> sb(toks_b.begin(), toks_b.end());
    if (sa.empty() && sb.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& t : sa) inter += sb.count(t);
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) /
                                static_cast<double>(uni);
}

// Jaccard over the distinct character trigrams of the string padded with two
// boundary markers (byte 0x01) on each side.
inline double trigram_jaccard(std::string_view a, std::string_view b) {
    auto trigrams = [](std::string_view s) {
        std::string padded;
        padded.reserve(s.size() + 4);
        padded.append(2, '\x01');
        padded.append(s);
        padded.append(2, '\x01');
        std::set<std::string> grams;
        for (std::size_t i = 0; i + 3 <= padded.size(); ++i)
            grams.insert(padded.substr(i, 3));
        return grams;
    };
    const auto ga = trigrams(a);
    const auto gb = trigrams(b);
    std::size_t inter = 0;
    for (const auto& g : ga) inter += gb.count(g);
    const std::size_t uni = ga.size() + gb.size() - inter;
    return uni == 0 ? 1.0 : static_cast<double>(inter) /
                                static_cast<double>(uni);
}

inline std::size_t longest_common_substring_length(std::string_view a,
                                                   std::string_view b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0), curr(b.size() + 1, 0);
    std::size_t best = 0;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : 0;
            best = std::max(best, curr[j]);
        }
        std::swap(prev, curr);
    }
    return best;
}

// The eight name-similarity features, in frozen slot order. Both names are
// lowercased and trimmed first; every metric is symmetric and in [0, 1], and
// two empty names score 1.0 everywhere.
inline std::array<double, kStringSimilarityCount> string_similarities(
    std::string_view name_a, std::string_view name_b) {
    const std::string a = detail::lowercase(detail::trim(name_a));
    const std::string b = detail::lowercase(detail::trim(name_b));
    std::array<double, kStringSimilarityCount> out{};
    const std::size_t max_len = std::max(a.size(), b.size());
    out[0] = max_len == 0
                 ? 1.0
                 : 1.0 - static_cast<double>(levenshtein_distance(a, b)) /
                             static_cast<double>(max_len);
    out[1] = jaro_similarity(a, b);
    out[2] = jaro_winkler_similarity(a, b);
    out[3] = token_set_jaccard(a, b);
    out[4] = trigram_jaccard(a, b);
    out[5] = max_len == 0
                 ? 1.0
                 : static_cast<double>(longest_common_substring_length(a, b)) /
                       static_cast<double>(max_len);
    out[6] = max_len == 0
                 ? 1.0
                 : static_cast<double>(common_prefix_length(a, b)) /
                       static_cast<double>(max_len);
    out[7] = a == b ? 1.0 : 0.0;
    return out;
}

inline const std::array<const char*, kStringSimilarityCount>&
string_similarity_names() {
    static const std::array<const char*, kStringSimilarityCount> names = {
        "levenshtein_norm", "jaro",        "jaro_winkler",
        "token_jaccard",    "trigram_jaccard", "lcs_norm",
        "common_prefix_norm", "exact_equal",
    };
    return names;
}

}  // namespace propmatch
