#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "propmatch/corpus.hpp"
#include "propmatch/embedding.hpp"
#include "propmatch/string_similarity.hpp"

namespace propmatch {

inline constexpr std::size_t kMetaFeatureCount = 28;
inline constexpr std::size_t kEmbeddingDimension = 300;
// 28 meta + 1 numeric + 300 value-embedding components.
inline constexpr std::size_t kInstanceFeatureCount = 329;
// 329 instance-feature means + 300 name-embedding components.
inline constexpr std::size_t kPropertyFeatureCount = 629;
// 629 absolute differences + 8 name string similarities.
inline constexpr std::size_t kPairFeatureCount = 637;

// Format meta-features of a single value, in frozen slot order:
//   0 char length          7 digit fraction      14 token count
//   1 digit count           8 letter fraction     15 numeric tokens
//   2 letter count           9 uppercase fraction  16 alphabetic tokens
//   3 uppercase count       10 lowercase fraction  17 mixed alnum tokens
//   4 lowercase count       11 whitespace fraction 18 other tokens
//   5 whitespace count      12 other fraction      19..22 token fractions
//   6 other count           13 distinct chars      23 mean / 24 max token len
//   25 purely-numeric flag  26 starts-with-digit   27 ends-with-digit
// Tokens here are maximal non-whitespace runs; a numeric token is optional
// sign, digits, at most one decimal point. The empty string maps to all
// zeros, and fractions with a zero denominator are 0.
inline std::array<double, kMetaFeatureCount> instance_meta_features(
    std::string_view value) {
    std::array<double, kMetaFeatureCount> f{};
    const double len = static_cast<double>(value.size());
    std::size_t digits = 0, letters = 0, upper = 0, lower = 0, spaces = 0;
    std::set<char> distinct;
    for (char c : value) {
        distinct.insert(c);
        if (detail::is_digit(c))
            ++digits;
        else if (detail::is_upper(c))
            ++upper, ++letters;
        else if (detail::is_lower(c))
            ++lower, ++letters;
        else if (detail::is_space(c))
            ++spaces;
    }
    const std::size_t other = value.size() - digits - letters - spaces;
    f[0] = len;
    f[1] = static_cast<double>(digits);
    f[2] = static_cast<double>(letters);
    f[3] = static_cast<double>(upper);
    f[4] = static_cast<double>(lower);
    f[5] = static_cast<double>(spaces);
    f[6] = static_cast<double>(other);
    if (!value.empty())
        for (std::size_t i = 0; i < 6; ++i) f[7 + i] = f[1 + i] / len;
    f[13] = static_cast<double>(distinct.size());

    const auto tokens = detail::whitespace_tokens(value);
    std::size_t numeric = 0, alphabetic = 0, mixed = 0, other_tokens = 0;
    std::size_t total_len = 0, max_len = 0;
    for (const auto& t : tokens) {
        total_len += t.size();
        max_len = std::max(max_len, t.size());
        if (detail::is_numeric_token(t)) {
            ++numeric;
            continue;
        }
        bool all_alnum = true, has_letter = false, has_digit = false;
        for (char c : t) {
            if (detail::is_letter(c))
                has_letter = true;
            else if (detail::is_digit(c))
                has_digit = true;
            else
                all_alnum = false;
        }
        if (all_alnum && has_letter && !has_digit)
            ++alphabetic;
        else if (all_alnum && has_letter && has_digit)
            ++mixed;
        else
            ++other_tokens;
    }
    f[14] = static_cast<double>(tokens.size());
    f[15] = static_cast<double>(numeric);
    f[16] = static_cast<double>(alphabetic);
    f[17] = static_cast<double>(mixed);
    f[18] = static_cast<double>(other_tokens);
    if (!tokens.empty()) {
        for (std::size_t i = 0; i < 4; ++i) f[19 + i] = f[15 + i] / f[14];
        f[23] = static_cast<double>(total_len) / f[14];
        f[24] = static_cast<double>(max_len);
    }

    const std::string_view trimmed = detail::trim(value);
    f[25] = detail::is_numeric_token(trimmed) ? 1.0 : 0.0;
    f[26] = !trimmed.empty() && detail::is_digit(trimmed.front()) ? 1.0 : 0.0;
    f[27] = !trimmed.empty() && detail::is_digit(trimmed.back()) ? 1.0 : 0.0;
    return f;
}

// The value itself when the trimmed string (after dropping comma thousands
// separators) is a plain decimal number, else 0. Parses that overflow to
// non-finite also yield 0.
inline double numeric_value_feature(std::string_view value) {
    std::string s(detail::trim(value));
    std::erase(s, ',');
    if (!detail::is_numeric_token(s)) return 0.0;
    const double parsed = std::strtod(s.c_str(), nullptr);
    return std::isfinite(parsed) ? parsed : 0.0;
}

// [meta(28) ; numeric(1) ; average value embedding(300)]
inline std::vector<double> instance_features(std::string_view value,
                                             const EmbeddingTable& table) {
    if (table.dimension() != kEmbeddingDimension)
        throw error("embedding table dimension must be " +
                    std::to_string(kEmbeddingDimension));
    std::vector<double> out;
    out.reserve(kInstanceFeatureCount);
    const auto meta = instance_meta_features(value);
    out.insert(out.end(), meta.begin(), meta.end());
    out.push_back(numeric_value_feature(value));
    const auto emb = average_embedding(table, tokenize(value));
    out.insert(out.end(), emb.begin(), emb.end());
    return out;
}

// [elementwise mean of instance features over all instances(329) ;
//  average name embedding(300)]
// Means run over instances in index order with compensated (Kahan) summation
// so parallel callers see one canonical result.
inline std::vector<double> property_features(const PropertyRef& ref,
                                             const Corpus& corpus,
                                             const EmbeddingTable& table) {
    const std::vector<std::string>& values = corpus.values_of(ref);
    std::vector<double> sum(kInstanceFeatureCount, 0.0);
    std::vector<double> comp(kInstanceFeatureCount, 0.0);
    for (const auto& value : values) {
        const std::vector<double> fv = instance_features(value, table);
        for (std::size_t i = 0; i < kInstanceFeatureCount; ++i) {
            const double y = fv[i] - comp[i];
            const double t = sum[i] + y;
            comp[i] = (t - sum[i]) - y;
            sum[i] = t;
        }
    }
    std::vector<double> out;
    out.reserve(kPropertyFeatureCount);
    const double n = static_cast<double>(values.size());
    for (std::size_t i = 0; i < kInstanceFeatureCount; ++i)
        out.push_back(sum[i] / n);
    const auto name_emb = average_embedding(table, tokenize(ref.name));
    out.insert(out.end(), name_emb.begin(), name_emb.end());
    return out;
}

// [|a - b|(629) ; string_similarities(name_a, name_b)(8)]
// Symmetric by construction: absolute differences plus symmetric metrics.
inline std::vector<double> pair_features(const std::vector<double>& a,
                                         const std::vector<double>& b,
                                         std::string_view name_a,
                                         std::string_view name_b) {
    if (a.size() != kPropertyFeatureCount || b.size() != kPropertyFeatureCount)
        throw error("pair_features expects two vectors of length " +
                    std::to_string(kPropertyFeatureCount));
    std::vector<double> out;
    out.reserve(kPairFeatureCount);
    for (std::size_t i = 0; i < kPropertyFeatureCount; ++i)
        out.push_back(std::abs(a[i] - b[i]));
    const auto sims = string_similarities(name_a, name_b);
    out.insert(out.end(), sims.begin(), sims.end());
    return out;
}

// Property features for every ref in the corpus, keyed by ref. Properties
// are independent, so extraction parallelizes across them; each property's
// own mean is sequential, keeping results identical for any job count.
inline std::map<PropertyRef, std::vector<double>> compute_property_features(
    const Corpus& corpus, const EmbeddingTable& table, unsigned jobs = 1) {
    const std::vector<PropertyRef> refs = corpus.refs();
    std::vector<std::vector<double>> rows(refs.size());
    detail::parallel_chunks(refs.size(), jobs,
                            [&](std::size_t begin, std::size_t end) {
                                for (std::size_t i = begin; i < end; ++i)
                                    rows[i] = property_features(refs[i],
                                                                corpus, table);
                            });
    std::map<PropertyRef, std::vector<double>> out;
    for (std::size_t i = 0; i < refs.size(); ++i)
        out.emplace(refs[i], std::move(rows[i]));
    return out;
}

struct FeatureSlot {
    std::size_t index;
    std::string level;  // "instance" | "property" | "pair"
    std::string name;
    std::string kind;   // "count" | "fraction" | "flag" | "value" |
                        // "embedding" | "similarity"
};

// Frozen, versioned description of every slot of the three vectors. The
// layout is part of the file-format contract; bump the version on any change.
struct FeatureIndexMap {
    std::string version;
    std::vector<FeatureSlot> entries;

    std::vector<FeatureSlot> level_entries(std::string_view level) const {
        std::vector<FeatureSlot> out;
        for (const auto& e : entries)
            if (e.level == level) out.push_back(e);
        return out;
    }

    nlohmann::json to_json() const {
        nlohmann::json slots = nlohmann::json::array();
        for (const auto& e : entries)
            slots.push_back({{"index", e.index},
                             {"level", e.level},
                             {"name", e.name},
                             {"kind", e.kind}});
        return {{"version", version}, {"entries", slots}};
    }
};

inline FeatureIndexMap feature_index_map() {
    static const std::array<std::pair<const char*, const char*>,
                            kMetaFeatureCount>
        meta = {{
            {"char_length", "count"},
            {"digit_count", "count"},
            {"letter_count", "count"},
            {"uppercase_count", "count"},
            {"lowercase_count", "count"},
            {"whitespace_count", "count"},
            {"other_char_count", "count"},
            {"digit_fraction", "fraction"},
            {"letter_fraction", "fraction"},
            {"uppercase_fraction", "fraction"},
            {"lowercase_fraction", "fraction"},
            {"whitespace_fraction", "fraction"},
            {"other_char_fraction", "fraction"},
            {"distinct_char_count", "count"},
            {"token_count", "count"},
            {"numeric_token_count", "count"},
            {"alphabetic_token_count", "count"},
            {"mixed_token_count", "count"},
            {"other_token_count", "count"},
            {"numeric_token_fraction", "fraction"},
            {"alphabetic_token_fraction", "fraction"},
            {"mixed_token_fraction", "fraction"},
            {"other_token_fraction", "fraction"},
            {"mean_token_length", "value"},
            {"max_token_length", "count"},
            {"purely_numeric_flag", "flag"},
            {"starts_with_digit_flag", "flag"},
            {"ends_with_digit_flag", "flag"},
        }};

    FeatureIndexMap map;
    map.version = "1";
    auto pad3 = [](std::size_t i) {
        std::string s = std::to_string(i);
        return std::string(3 - std::min<std::size_t>(3, s.size()), '0') + s;
    };

    std::vector<std::string> instance_names;
    for (std::size_t i = 0; i < kMetaFeatureCount; ++i) {
        instance_names.push_back(meta[i].first);
        map.entries.push_back({i, "instance", meta[i].first, meta[i].second});
    }
    instance_names.push_back("numeric_value");
    map.entries.push_back({kMetaFeatureCount, "instance", "numeric_value",
                           "value"});
    for (std::size_t i = 0; i < kEmbeddingDimension; ++i) {
        instance_names.push_back("value_embedding_" + pad3(i));
        map.entries.push_back({kMetaFeatureCount + 1 + i, "instance",
                               instance_names.back(), "embedding"});
    }

    std::vector<std::string> property_names;
    for (std::size_t i = 0; i < kInstanceFeatureCount; ++i) {
        property_names.push_back("avg_" + instance_names[i]);
        const std::string kind =
            map.entries[i].kind == "embedding" ? "embedding" : "value";
        map.entries.push_back({i, "property", property_names.back(), kind});
    }
    for (std::size_t i = 0; i < kEmbeddingDimension; ++i) {
        property_names.push_back("name_embedding_" + pad3(i));
        map.entries.push_back({kInstanceFeatureCount + i, "property",
                               property_names.back(), "embedding"});
    }

    for (std::size_t i = 0; i < kPropertyFeatureCount; ++i)
        map.entries.push_back(
            {i, "pair", "absdiff_" + property_names[i], "value"});
    for (std::size_t i = 0; i < kStringSimilarityCount; ++i)
        map.entries.push_back({kPropertyFeatureCount + i, "pair",
                               string_similarity_names()[i], "similarity"});
    return map;
}

// --- exports ---------------------------------------------------------------

// JSON Lines, one {"ref": {...}, "features": [...]} object per property, in
// canonical ref order.
inline void write_property_features_jsonl(
    const std::string& path, const Corpus& corpus,
    const std::map<PropertyRef, std::vector<double>>& features) {
    std::ofstream out = detail::open_output(path);
    for (const auto& [ref, values] : corpus.index()) {
        const auto it = features.find(ref);
        if (it == features.end()) throw error("missing features for a ref");
        nlohmann::json obj{{"ref", ref_to_json(ref)},
                           {"features", it->second}};
        out << obj.dump() << '\n';
    }
}

// JSON Lines, one {"pair": {"a": {...}, "b": {...}}, "features": [...]} per
// candidate pair, in canonical pair order.
inline void write_pair_features_jsonl(
    const std::string& path, const std::vector<RefPair>& pairs,
    const std::map<PropertyRef, std::vector<double>>& features) {
    std::ofstream out = detail::open_output(path);
    for (const auto& [a, b] : pairs) {
        const auto fa = features.find(a);
        const auto fb = features.find(b);
        if (fa == features.end() || fb == features.end())
            throw error("missing features for a pair endpoint");
        nlohmann::json obj{
            {"pair", {{"a", ref_to_json(a)}, {"b", ref_to_json(b)}}},
            {"features", pair_features(fa->second, fb->second, a.name,
                                       b.name)}};
        out << obj.dump() << '\n';
    }
}

inline constexpr char kMatrixMagic[4] = {'P', 'M', 'F', 'M'};
inline constexpr std::uint32_t kMatrixFormatVersion = 1;

// Binary matrix: 16-byte header (magic "PMFM", u32 version, u32 rows,
// u32 cols), then row-major little-endian float64.
inline void write_feature_matrix(const std::string& path,
                                 const std::vector<std::vector<double>>& rows,
                                 std::size_t cols) {
    std::ofstream out = detail::open_output(path);
    out.write(kMatrixMagic, 4);
    detail::write_u32(out, kMatrixFormatVersion);
    detail::write_u32(out, static_cast<std::uint32_t>(rows.size()));
    detail::write_u32(out, static_cast<std::uint32_t>(cols));
    for (const auto& row : rows) {
        if (row.size() != cols)
            throw error("feature matrix row has inconsistent width");
        for (double v : row) detail::write_f64(out, v);
    }
    if (!out) throw error("failed writing feature matrix: " + path);
}

inline std::vector<std::vector<double>> read_feature_matrix(
    const std::string& path) {
    std::ifstream in = detail::open_input(path);
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMatrixMagic, 4) != 0)
        throw error("not a feature matrix file: " + path);
    const std::uint32_t version = detail::read_u32(in, "matrix version");
    if (version != kMatrixFormatVersion)
        throw error("unsupported feature matrix version " +
                    std::to_string(version));
    const std::uint32_t n_rows = detail::read_u32(in, "matrix rows");
    const std::uint32_t n_cols = detail::read_u32(in, "matrix cols");
    std::vector<std::vector<double>> rows(n_rows,
                                          std::vector<double>(n_cols));
    for (auto& row : rows)
        for (double& v : row) v = detail::read_f64(in, "matrix cell");
    return rows;
}

}  // namespace propmatch
