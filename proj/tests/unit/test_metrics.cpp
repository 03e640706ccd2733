#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "elink/metrics.hpp"

using namespace elink;

namespace {

// Full-matrix Wagner-Fischer.
std::size_t levenshtein_matrix(const std::u32string& x, const std::u32string& y) {
    std::vector<std::vector<std::size_t>> d(x.size() + 1, std::vector<std::size_t>(y.size() + 1));
    for (std::size_t i = 0; i <= x.size(); ++i) d[i][0] = i;
    for (std::size_t k = 0; k <= y.size(); ++k) d[0][k] = k;
    for (std::size_t i = 1; i <= x.size(); ++i)
        for (std::size_t k = 1; k <= y.size(); ++k)
            d[i][k] = std::min({d[i - 1][k] + 1, d[i][k - 1] + 1, d[i - 1][k - 1] + (x[i - 1] == y[k - 1] ? 0u : 1u)});
    return d[x.size()][y.size()];
}

std::u32string random_string(std::mt19937_64& rng, std::size_t max_len, const std::u32string& alphabet) {
    std::uniform_int_distribution<std::size_t> len(0, max_len), pick(0, alphabet.size() - 1);
    std::u32string s(len(rng), U' ');
    for (auto& c : s) c = alphabet[pick(rng)];
    return s;
}

const std::u32string kAlphabet = U"ABCDEHMRT \u00C9\u00E9\u4E2D";

std::vector<Comparator> string_comparators() {
    return {{ComparatorKind::levenshtein_normalized}, {ComparatorKind::jaro}, {ComparatorKind::jaro_winkler},
            {ComparatorKind::exact}};
}

}  // namespace

TEST(Levenshtein, ClassicExamples) {
    EXPECT_EQ(levenshtein(std::string_view("kitten"), std::string_view("sitting")), 3u);
    EXPECT_EQ(levenshtein(std::string_view("abc"), std::string_view("abc")), 0u);
    EXPECT_EQ(levenshtein(std::string_view(""), std::string_view("abc")), 3u);
    EXPECT_EQ(levenshtein(std::string_view("flaw"), std::string_view("lawn")), 2u);
}

TEST(Levenshtein, CountsCodePoints) {
    // One substitution, even though the UTF-8 encodings differ in length.
    EXPECT_EQ(levenshtein(std::string_view("caf\xC3\xA9"), std::string_view("cafe")), 1u);
}

TEST(Levenshtein, AgreesWithFullMatrix) {
    std::mt19937_64 rng(31);
    for (int k = 0; k < 2000; ++k) {
        const auto x = random_string(rng, 12, kAlphabet), y = random_string(rng, 12, kAlphabet);
        ASSERT_EQ(levenshtein(x, y), levenshtein_matrix(x, y));
    }
}

TEST(LevenshteinSimilarity, Normalized) {
    EXPECT_EQ(levenshtein_similarity(U"abc", U"abc"), 1.0);
    EXPECT_EQ(levenshtein_similarity(U"", U""), 1.0);
    EXPECT_EQ(levenshtein_similarity(U"", U"abc"), 0.0);
    EXPECT_DOUBLE_EQ(levenshtein_similarity(U"kitten", U"sitting"), 1.0 - 3.0 / 7.0);
}

TEST(JaroWinkler, MarthaHandComputation) {
    // 6 matches, the T/H swap is one transposition, common prefix MAR.
    const double m = 6, t = 1, len = 6;
    const double j = (m / len + m / len + (m - t) / m) / 3.0;
    const double jw = j + 3 * 0.1 * (1 - j);
    EXPECT_NEAR(jaro(U"MARTHA", U"MARHTA"), j, 1e-15);
    EXPECT_NEAR(jaro_winkler(std::string_view("MARTHA"), std::string_view("MARHTA")), jw, 1e-15);
    EXPECT_NEAR(jaro_winkler(std::string_view("MARTHA"), std::string_view("MARHTA")), 0.9611, 1e-4);
}

TEST(JaroWinkler, OtherTextbookValues) {
    // DWAYNE/DUANE: m = 4, t = 0, prefix 1. DIXON/DICKSONX: m = 4, t = 0, prefix 2.
    const double dj = (4.0 / 6 + 4.0 / 5 + 1.0) / 3.0;
    EXPECT_NEAR(jaro(U"DWAYNE", U"DUANE"), dj, 1e-15);
    EXPECT_NEAR(jaro_winkler(U"DWAYNE", U"DUANE"), dj + 0.1 * (1 - dj), 1e-15);
    const double xj = (4.0 / 5 + 4.0 / 8 + 1.0) / 3.0;
    EXPECT_NEAR(jaro_winkler(U"DIXON", U"DICKSONX"), xj + 0.2 * (1 - xj), 1e-15);
}

TEST(JaroWinkler, PrefixCapped) {
    EXPECT_NEAR(jaro_winkler(U"ABCDEFGH", U"ABCDEFGX"), jaro(U"ABCDEFGH", U"ABCDEFGX") + 0.4 * (1 - jaro(U"ABCDEFGH", U"ABCDEFGX")), 1e-15);
}

TEST(Jaro, EmptyAndDisjoint) {
    EXPECT_EQ(jaro(U"", U""), 1.0);
    EXPECT_EQ(jaro(U"", U"A"), 0.0);
    EXPECT_EQ(jaro(U"ABC", U"XYZ"), 0.0);
}

TEST(Comparators, SymmetryIdentityRange) {
    std::mt19937_64 rng(32);
    const auto comps = string_comparators();
    for (int k = 0; k < 10000; ++k) {
        const auto x = random_string(rng, 10, kAlphabet), y = random_string(rng, 10, kAlphabet);
        for (const auto& c : comps) {
            const double xy = c(x, y), yx = c(y, x);
            ASSERT_EQ(xy, yx) << to_string(c.kind);
            ASSERT_GE(xy, 0.0);
            ASSERT_LE(xy, 1.0);
            ASSERT_EQ(c(x, x), 1.0) << to_string(c.kind);
        }
        ASSERT_GE(jaro_winkler(x, y), jaro(x, y));
    }
}

TEST(Levenshtein, TriangleInequality) {
    std::mt19937_64 rng(33);
    for (int k = 0; k < 10000; ++k) {
        const auto x = random_string(rng, 8, kAlphabet), y = random_string(rng, 8, kAlphabet),
                   z = random_string(rng, 8, kAlphabet);
        ASSERT_LE(levenshtein(x, z), levenshtein(x, y) + levenshtein(y, z));
        ASSERT_EQ(levenshtein(x, y), levenshtein(y, x));
        ASSERT_EQ(levenshtein(x, x), 0u);
    }
}

TEST(Comparators, AdversarialInputsStayInRange) {
    const std::u32string long_a(5000, U'A');
    std::u32string long_b = long_a;
    long_b[2500] = U'B';
    for (const auto& c : string_comparators()) {
        for (const auto& [x, y] : std::vector<std::pair<std::u32string, std::u32string>>{
                 {U"", U""}, {U"", U"X"}, {long_a, long_b}, {U"\u4E2D\u6587", U"\u6587\u4E2D"}}) {
            const double v = c(x, y);
            ASSERT_GE(v, 0.0);
            ASSERT_LE(v, 1.0);
        }
    }
}

TEST(Compare, ExactAndNormalization) {
    const Comparator exact{ComparatorKind::exact};
    EXPECT_EQ(compare(exact, "16", "17"), 0.0);
    EXPECT_EQ(compare(exact, "  main   street ", "MAIN STREET"), 1.0);
    EXPECT_EQ(compare(Comparator{ComparatorKind::levenshtein_normalized}, "abc", "abc"), 1.0);
    EXPECT_EQ(compare(exact, "caf\xC3\xA9", "CAF\xC3\x89"), 1.0);
    EXPECT_EQ(compare(exact, "a\xC2\xA0" "b", "A B"), 1.0);
}

TEST(Compare, NumericDifference) {
    Comparator num{ComparatorKind::absolute_difference_normalized};
    num.difference_cap = 10.0;
    EXPECT_DOUBLE_EQ(compare(num, "16", "17"), 0.9);
    EXPECT_DOUBLE_EQ(compare(num, "33", "36"), 0.7);
    EXPECT_EQ(compare(num, "1", "100"), 0.0);
    EXPECT_EQ(compare(num, " 42 ", "+42"), 1.0);
    EXPECT_DOUBLE_EQ(compare(num, 2.5, 5.0), 0.75);
    EXPECT_THROW(compare(num, "12", "twelve"), UsageError);
    EXPECT_THROW(compare(Comparator{ComparatorKind::jaro}, 1.0, 2.0), UsageError);
}

TEST(Comparator, ParseKind) {
    for (auto k : {ComparatorKind::levenshtein_normalized, ComparatorKind::jaro, ComparatorKind::jaro_winkler,
                   ComparatorKind::exact, ComparatorKind::absolute_difference_normalized})
        EXPECT_EQ(parse_comparator_kind(to_string(k)), k);
    EXPECT_THROW(parse_comparator_kind("soundex"), UsageError);
}

TEST(Comparator, ValidateParameters) {
    Comparator c;
    c.prefix_scale = 0.3;
    EXPECT_THROW(c.validate(), UsageError);
    Comparator d{ComparatorKind::absolute_difference_normalized};
    d.difference_cap = 0.0;
    EXPECT_THROW(d.validate(), UsageError);
}

TEST(Utf8, DecodeEncodeRoundTrip) {
    const std::string s = "A\xC3\xA9\xE4\xB8\xAD\xF0\x9F\x98\x80";
    const auto u = decode_utf8(s);
    ASSERT_EQ(u.size(), 4u);
    EXPECT_EQ(u[3], U'\U0001F600');
    EXPECT_EQ(encode_utf8(u), s);
    EXPECT_EQ(decode_utf8("\xFF"), std::u32string(1, U'\uFFFD'));
}
