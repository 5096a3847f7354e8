#pragma once

#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "propmatch/detail/io.hpp"
#include "propmatch/detail/text.hpp"

namespace propmatch {

// Pre-trained word-embedding table. Immutable after load; lookups of unknown
// tokens yield the all-zeros vector. Entries are stored as float32 (vector
// files carry ~7 significant digits); arithmetic downstream is double.
class EmbeddingTable {
public:
    EmbeddingTable() = default;

    static EmbeddingTable from_vectors(
        std::size_t dimension,
        std::unordered_map<std::string, std::vector<float>> vectors) {
        EmbeddingTable t;
        t.dimension_ = dimension;
        for (const auto& [token, vec] : vectors)
            if (vec.size() != dimension)
                throw error("embedding for \"" + token +
                            "\" has wrong dimension");
        t.vectors_ = std::move(vectors);
        return t;
    }

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return vectors_.size(); }

    // Stored vector for the lowercase token, else all zeros. Total: never
    // fails, always returns a vector of length dimension().
    std::vector<double> lookup(std::string_view token) const {
        std::vector<double> out(dimension_, 0.0);
        const std::vector<float>* v = find(detail::lowercase(token));
        if (v)
            for (std::size_t i = 0; i < dimension_; ++i) out[i] = (*v)[i];
        return out;
    }

    bool contains(std::string_view token) const {
        return find(detail::lowercase(token)) != nullptr;
    }

    // Internal no-copy lookup; expects an already-lowercased token.
    const std::vector<float>* find(const std::string& token) const {
        auto it = vectors_.find(token);
        return it == vectors_.end() ? nullptr : &it->second;
    }

private:
    std::size_t dimension_ = 0;
    std::unordered_map<std::string, std::vector<float>> vectors_;
};

// Lowercases and segments text into tokens: whitespace separates, and within
// a chunk any punctuation separates too, except a decimal point flanked by
// digits ("2.8" is one token, "28mm" is one token, "f/2.8," gives f and 2.8).
// Standalone punctuation is dropped. Bytes >= 0x80 are kept as word bytes.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::string lowered = detail::lowercase(text);
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            out.push_back(current);
            current.clear();
        }
    };
    for (std::size_t i = 0; i < lowered.size(); ++i) {
        char c = lowered[i];
        bool word_byte = detail::is_alnum(c) ||
                         static_cast<unsigned char>(c) >= 0x80;
        if (!word_byte && c == '.' && i > 0 && i + 1 < lowered.size() &&
            detail::is_digit(lowered[i - 1]) &&
            detail::is_digit(lowered[i + 1]))
            word_byte = true;
        if (word_byte)
            current.push_back(c);
        else
            flush();
    }
    flush();
    return out;
}

// Elementwise mean of lookups over all tokens. Unknown tokens contribute
// their zero vectors to the mean; an empty token list yields the zero vector.
inline std::vector<double> average_embedding(
    const EmbeddingTable& table, const std::vector<std::string>& tokens) {
    std::vector<double> acc(table.dimension(), 0.0);
    if (tokens.empty()) return acc;
    for (const auto& token : tokens) {
        const std::vector<float>* v = table.find(detail::lowercase(token));
        if (!v) continue;
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += (*v)[i];
    }
    const double n = static_cast<double>(tokens.size());
    for (double& x : acc) x /= n;
    return acc;
}

// Text vector format: one entry per line, token followed by D decimal floats,
// space-separated, no header. The file is streamed; the optional allow-list
// prunes rows whose token is not listed (pruning never changes any computed
// feature because unlisted tokens are never looked up by the caller).
inline EmbeddingTable load_embeddings(
    const std::string& path,
    std::optional<std::size_t> expected_dimension = {},
    const std::unordered_set<std::string>* allow_list = nullptr) {
    std::unordered_map<std::string, std::vector<float>> vectors;
    std::size_t dimension = 0;
    bool first = true;
    detail::for_each_line(path, [&](std::size_t lineno,
                                    const std::string& line) {
        if (line.empty()) return;
        const std::size_t sep = line.find(' ');
        if (sep == std::string::npos || sep == 0)
            throw error(path + ":" + std::to_string(lineno) +
                        ": expected token followed by vector components");
        std::string token = line.substr(0, sep);

        std::vector<float> vec;
        if (!first) vec.reserve(dimension);
        const char* p = line.c_str() + sep;
        const char* line_end = line.c_str() + line.size();
        while (p < line_end) {
            while (p < line_end && *p == ' ') ++p;
            if (p >= line_end) break;
            char* end = nullptr;
            float v = std::strtof(p, &end);
            if (end == p || (end < line_end && *end != ' '))
                throw error(path + ":" + std::to_string(lineno) +
                            ": non-numeric vector component");
            vec.push_back(v);
            p = end;
        }
        if (vec.empty())
            throw error(path + ":" + std::to_string(lineno) +
                        ": row has no vector components");
        if (first) {
            dimension = vec.size();
            first = false;
            if (expected_dimension && dimension != *expected_dimension)
                throw error(path + ": dimension " + std::to_string(dimension) +
                            " does not match expected " +
                            std::to_string(*expected_dimension));
        } else if (vec.size() != dimension) {
            throw error(path + ":" + std::to_string(lineno) + ": row has " +
                        std::to_string(vec.size()) + " components, expected " +
                        std::to_string(dimension));
        }
        if (allow_list && !allow_list->count(token)) return;
        vectors[std::move(token)] = std::move(vec);
    });
    if (first) throw error("empty embedding file: " + path);
    return EmbeddingTable::from_vectors(dimension, std::move(vectors));
}

}  // namespace propmatch
