#include <catch2/catch_amalgamated.hpp>

#include "propmatch/detail/random.hpp"
#include "propmatch/string_similarity.hpp"
#include "support/oracles.hpp"

using namespace propmatch;

namespace {

std::string random_word(propmatch::detail::Rng& rng, std::size_t max_len) {
    static const std::string alphabet = "abcdefgh ";
    std::string s;
    const std::size_t len = rng.next_index(max_len + 1);
    for (std::size_t i = 0; i < len; ++i)
        s.push_back(alphabet[rng.next_index(alphabet.size())]);
    return s;
}

}  // namespace

TEST_CASE("identical names score 1.0 everywhere", "[string_similarity]") {
    const auto sims = string_similarities("abc", "abc");
    for (double v : sims) CHECK(v == 1.0);

    const auto empty = string_similarities("", "");
    for (double v : empty) CHECK(v == 1.0);
}

TEST_CASE("kitten/sitting normalized Levenshtein", "[string_similarity]") {
    const auto sims = string_similarities("kitten", "sitting");
    CHECK(sims[0] == Catch::Approx(1.0 - 3.0 / 7.0));
    CHECK(oracles::edit_distance("kitten", "sitting") == 3);
}

TEST_CASE("names are lowercased and trimmed before comparison",
          "[string_similarity]") {
    CHECK(string_similarities("  MegaPixel ", "megapixel")[7] == 1.0);
    CHECK(string_similarities("ABC", "abc")[0] == 1.0);
}

TEST_CASE("dissimilar names score low, verified per metric",
          "[string_similarity]") {
    const std::string a = "camera resolution";
    const std::string b = "megapixel";
    const auto sims = string_similarities(a, b);

    CHECK(sims[0] == Catch::Approx(1.0 - static_cast<double>(oracles::edit_distance(
                                             a, b)) /
                                             a.size()));
    CHECK(sims[1] == Catch::Approx(oracles::jaro(a, b)));
    CHECK(sims[2] == Catch::Approx(oracles::jaro_winkler(a, b)));
    CHECK(sims[3] == Catch::Approx(oracles::token_jaccard(a, b)));
    CHECK(sims[4] == Catch::Approx(oracles::trigram_jaccard(a, b)));
    CHECK(sims[5] ==
          Catch::Approx(static_cast<double>(oracles::longest_common_substring(
                            a, b)) /
                        a.size()));
    CHECK(sims[6] == Catch::Approx(static_cast<double>(oracles::common_prefix(
                                       a, b)) /
                                   a.size()));
    CHECK(sims[7] == 0.0);
    for (double v : sims) CHECK(v < 0.6);
}

TEST_CASE("all metrics agree with oracles on random pairs",
          "[string_similarity]") {
    propmatch::detail::Rng rng(20250811);
    for (int i = 0; i < 1000; ++i) {
        const std::string raw_a = random_word(rng, 20);
        const std::string raw_b = random_word(rng, 20);
        const std::string a(propmatch::detail::lowercase(
            propmatch::detail::trim(raw_a)));
        const std::string b(propmatch::detail::lowercase(
            propmatch::detail::trim(raw_b)));
        const auto sims = string_similarities(raw_a, raw_b);
        const std::size_t max_len = std::max(a.size(), b.size());

        // slot 1: exact agreement with the DP oracle, as an identity on
        // rationals
        const double expected_lev =
            max_len == 0 ? 1.0
                         : 1.0 - static_cast<double>(oracles::edit_distance(
                                     a, b)) /
                                     static_cast<double>(max_len);
        REQUIRE(sims[0] == expected_lev);

        REQUIRE(sims[1] == Catch::Approx(oracles::jaro(a, b)).margin(1e-12));
        REQUIRE(sims[2] ==
                Catch::Approx(oracles::jaro_winkler(a, b)).margin(1e-12));
        REQUIRE(sims[3] ==
                Catch::Approx(oracles::token_jaccard(a, b)).margin(1e-12));
        REQUIRE(sims[4] ==
                Catch::Approx(oracles::trigram_jaccard(a, b)).margin(1e-12));
    }
}

TEST_CASE("metrics are symmetric and bounded", "[string_similarity]") {
    propmatch::detail::Rng rng(99);
    for (int i = 0; i < 300; ++i) {
        const std::string a = random_word(rng, 12);
        const std::string b = random_word(rng, 12);
        const auto ab = string_similarities(a, b);
        const auto ba = string_similarities(b, a);
        for (std::size_t k = 0; k < kStringSimilarityCount; ++k) {
            REQUIRE(ab[k] == ba[k]);
            REQUIRE(ab[k] >= 0.0);
            REQUIRE(ab[k] <= 1.0);
        }
    }
}

TEST_CASE("one-empty-name edge cases", "[string_similarity]") {
    const auto sims = string_similarities("", "abc");
    CHECK(sims[0] == 0.0);   // levenshtein: 3 edits over max len 3
    CHECK(sims[1] == 0.0);   // jaro
    CHECK(sims[3] == 0.0);   // token jaccard
    CHECK(sims[4] == 0.0);   // trigram jaccard
    CHECK(sims[5] == 0.0);   // lcs
    CHECK(sims[6] == 0.0);   // prefix
    CHECK(sims[7] == 0.0);   // equality
}
