#pragma once

// Field comparators. Every comparator maps a pair of field values to a
// similarity in [0,1] with 1 meaning identical. Strings are compared as
// sequences of Unicode code points after normalization.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "elink/errors.hpp"

namespace elink {

// Decodes UTF-8 into code points. Malformed sequences become U+FFFD.
inline std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            cp = b0;
            len = 1;
        } else if ((b0 & 0xE0) == 0xC0) {
            cp = b0 & 0x1F;
            len = 2;
        } else if ((b0 & 0xF0) == 0xE0) {
            cp = b0 & 0x0F;
            len = 3;
        } else if ((b0 & 0xF8) == 0xF0) {
            cp = b0 & 0x07;
            len = 4;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (std::size_t k = 1; ok && k < len; ++k) {
            const auto bk = static_cast<unsigned char>(s[i + k]);
            if ((bk & 0xC0) != 0x80) ok = false;
            else cp = (cp << 6) | (bk & 0x3F);
        }
        // Reject overlong forms, surrogates and out-of-range values.
        if (ok) {
            static constexpr char32_t min_for_len[] = {0, 0, 0x80, 0x800, 0x10000};
            if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
        }
        if (!ok) {
            out.push_back(U'\uFFFD');
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

struct Normalization {
    bool uppercase = true;
    bool trim = true;
    bool collapse_whitespace = true;

    friend bool operator==(const Normalization&, const Normalization&) = default;
};

namespace detail {

inline bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
           c == U'\u00A0';
}

// ASCII and Latin-1 letters only; other scripts pass through unchanged.
inline char32_t to_upper(char32_t c) {
    if (c >= U'a' && c <= U'z') return c - 0x20;
    if (c >= 0xE0 && c <= 0xFE && c != 0xF7) return c - 0x20;
    return c;
}

}  // namespace detail

inline std::u32string normalize(std::u32string_view s, const Normalization& n) {
    std::u32string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char32_t c : s) {
        if (n.collapse_whitespace && detail::is_space(c)) {
            pending_space = true;
            continue;
        }
        if (pending_space) {
            if (!(n.trim && out.empty())) out.push_back(U' ');
            pending_space = false;
        }
        out.push_back(n.uppercase ? detail::to_upper(c) : c);
    }
    if (pending_space && !n.trim) out.push_back(U' ');
    if (n.trim && !n.collapse_whitespace) {
        std::size_t b = 0, e = out.size();
        while (b < e && detail::is_space(out[b])) ++b;
        while (e > b && detail::is_space(out[e - 1])) --e;
        out = out.substr(b, e - b);
    }
    return out;
}

inline std::u32string normalize(std::string_view utf8, const Normalization& n) {
    return normalize(decode_utf8(utf8), n);
}

inline std::size_t levenshtein(std::u32string_view x, std::u32string_view y) {
    if (x.size() < y.size()) std::swap(x, y);
    std::vector<std::size_t> row(y.size() + 1);
    for (std::size_t k = 0; k <= y.size(); ++k) row[k] = k;
    for (std::size_t i = 1; i <= x.size(); ++i) {
        std::size_t diag = row[0];
        row[0] = i;
        for (std::size_t k = 1; k <= y.size(); ++k) {
            const std::size_t up = row[k];
            const std::size_t sub = diag + (x[i - 1] == y[k - 1] ? 0 : 1);
            row[k] = std::min({up + 1, row[k - 1] + 1, sub});
            diag = up;
        }
    }
    return row[y.size()];
}

inline std::size_t levenshtein(std::string_view x, std::string_view y) {
    return levenshtein(decode_utf8(x), decode_utf8(y));
}

// 1 - d / max(|x|, |y|); two empty strings are identical.
inline double levenshtein_similarity(std::u32string_view x, std::u32string_view y) {
    const std::size_t longest = std::max(x.size(), y.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(x, y)) / static_cast<double>(longest);
}

inline double jaro(std::u32string_view x, std::u32string_view y) {
    // Greedy matching depends on argument order; fix the order so the
    // similarity is symmetric.
    if (y < x) std::swap(x, y);
    if (x.empty() && y.empty()) return 1.0;
    if (x.empty() || y.empty()) return 0.0;

    const std::size_t longest = std::max(x.size(), y.size());
    const std::size_t window = longest / 2 > 0 ? longest / 2 - 1 : 0;

    std::vector<char> x_matched(x.size(), 0), y_matched(y.size(), 0);
    std::size_t matches = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t lo = i > window ? i - window : 0;
        const std::size_t hi = std::min(i + window + 1, y.size());
        for (std::size_t k = lo; k < hi; ++k) {
            if (!y_matched[k] && x[i] == y[k]) {
                x_matched[i] = y_matched[k] = 1;
                ++matches;
                break;
            }
        }
    }
    if (matches == 0) return 0.0;

    std::size_t out_of_order = 0;
    for (std::size_t i = 0, k = 0; i < x.size(); ++i) {
        if (!x_matched[i]) continue;
        while (!y_matched[k]) ++k;
        if (x[i] != y[k]) ++out_of_order;
        ++k;
    }
    const double m = static_cast<double>(matches);
    const double t = static_cast<double>(out_of_order / 2);
    return (m / static_cast<double>(x.size()) + m / static_cast<double>(y.size()) + (m - t) / m) / 3.0;
}

inline constexpr double kWinklerPrefixScale = 0.1;
inline constexpr std::size_t kWinklerPrefixCap = 4;

inline double jaro_winkler(std::u32string_view x, std::u32string_view y,
                           double prefix_scale = kWinklerPrefixScale,
                           std::size_t prefix_cap = kWinklerPrefixCap) {
    const double j = jaro(x, y);
    std::size_t prefix = 0;
    const std::size_t limit = std::min({x.size(), y.size(), prefix_cap});
    while (prefix < limit && x[prefix] == y[prefix]) ++prefix;
    return j + static_cast<double>(prefix) * prefix_scale * (1.0 - j);
}

inline double jaro_winkler(std::string_view x, std::string_view y) {
    return jaro_winkler(decode_utf8(x), decode_utf8(y));
}

enum class ComparatorKind { levenshtein_normalized, jaro, jaro_winkler, exact, absolute_difference_normalized };

inline std::string_view to_string(ComparatorKind k) {
    switch (k) {
        case ComparatorKind::levenshtein_normalized: return "levenshtein_normalized";
        case ComparatorKind::jaro: return "jaro";
        case ComparatorKind::jaro_winkler: return "jaro_winkler";
        case ComparatorKind::exact: return "exact";
        case ComparatorKind::absolute_difference_normalized: return "absolute_difference_normalized";
    }
    return "?";
}

inline ComparatorKind parse_comparator_kind(std::string_view s) {
    for (auto k : {ComparatorKind::levenshtein_normalized, ComparatorKind::jaro,
                   ComparatorKind::jaro_winkler, ComparatorKind::exact,
                   ComparatorKind::absolute_difference_normalized}) {
        if (to_string(k) == s) return k;
    }
    throw UsageError("unknown comparator '" + std::string(s) + "'");
}

inline double parse_number(std::u32string_view s) {
    std::string ascii;
    ascii.reserve(s.size());
    for (char32_t c : s) {
        if (c > 0x7F) throw UsageError("numeric comparator applied to non-numeric value '" + encode_utf8(s) + "'");
        ascii.push_back(static_cast<char>(c));
    }
    std::string_view v = ascii;
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    if (!v.empty() && v.front() == '+') v.remove_prefix(1);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
        throw UsageError("numeric comparator applied to non-numeric value '" + ascii + "'");
    return out;
}

struct Comparator {
    ComparatorKind kind = ComparatorKind::jaro_winkler;
    double prefix_scale = kWinklerPrefixScale;
    std::size_t prefix_cap = kWinklerPrefixCap;
    double difference_cap = 10.0;  // absolute_difference_normalized only

    friend bool operator==(const Comparator&, const Comparator&) = default;

    void validate() const {
        if (!(prefix_scale >= 0.0) || prefix_scale * static_cast<double>(prefix_cap) > 1.0)
            throw UsageError("winkler prefix_scale * prefix_cap must lie in [0, 1]");
        if (!(difference_cap > 0.0) || !std::isfinite(difference_cap))
            throw UsageError("difference cap must be positive");
    }

    // Inputs are expected to be normalized already.
    double operator()(std::u32string_view x, std::u32string_view y) const {
        switch (kind) {
            case ComparatorKind::levenshtein_normalized: return levenshtein_similarity(x, y);
            case ComparatorKind::jaro: return jaro(x, y);
            case ComparatorKind::jaro_winkler: return jaro_winkler(x, y, prefix_scale, prefix_cap);
            case ComparatorKind::exact: return x == y ? 1.0 : 0.0;
            case ComparatorKind::absolute_difference_normalized:
                return compare_numbers(parse_number(x), parse_number(y));
        }
        return 0.0;
    }

    double compare_numbers(double x, double y) const {
        return 1.0 - std::min(std::fabs(x - y), difference_cap) / difference_cap;
    }
};

inline double compare(const Comparator& c, std::string_view x, std::string_view y,
                      const Normalization& n = {}) {
    return c(normalize(x, n), normalize(y, n));
}

inline double compare(const Comparator& c, double x, double y) {
    if (c.kind != ComparatorKind::absolute_difference_normalized)
        throw UsageError("numeric arguments require the absolute_difference_normalized comparator");
    return c.compare_numbers(x, y);
}

}  // namespace elink
