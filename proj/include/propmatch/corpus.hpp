#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "propmatch/detail/hash.hpp"
#include "propmatch/detail/io.hpp"
#include "propmatch/detail/text.hpp"

namespace propmatch {

// One observed (property, entity, value) tuple, tied to its source and
// entity class. Values are kept verbatim; all normalization happens in
// feature extraction.
struct PropertyInstance {
    std::string source;
    std::string cls;
    std::string entity;
    std::string property;
    std::string value;
};

// Global property identity. Two refs are equal iff all three fields are
// equal; the same name in two sources is two distinct properties.
struct PropertyRef {
    std::string source;
    std::string cls;
    std::string name;

    auto operator<=>(const PropertyRef&) const = default;
};

using RefPair = std::pair<PropertyRef, PropertyRef>;

// Canonical unordered-pair representation: lexicographic on
// (source, class, name) so downstream outputs are order-independent.
inline RefPair canonical_pair(PropertyRef a, PropertyRef b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

struct LabeledPair {
    PropertyRef a;
    PropertyRef b;
    bool label = false;
};

// PropertyRef -> reference-property identifier. Two refs from different
// sources match iff they map to the same reference property.
class AlignmentTable {
public:
    AlignmentTable() = default;
    explicit AlignmentTable(std::map<PropertyRef, std::string> entries)
        : entries_(std::move(entries)) {}

    const std::map<PropertyRef, std::string>& entries() const {
        return entries_;
    }

    const std::string* reference_of(const PropertyRef& ref) const {
        auto it = entries_.find(ref);
        return it == entries_.end() ? nullptr : &it->second;
    }

    std::size_t size() const { return entries_.size(); }

private:
    std::map<PropertyRef, std::string> entries_;
};

// Immutable, indexed view of a multi-source instance collection.
class Corpus {
public:
    // Validates, applies the optional per-(source, class) entity cap (first N
    // distinct entities in input order), and groups instances by property.
    static Corpus from_instances(std::vector<PropertyInstance> instances,
                                 std::optional<std::size_t> entity_cap = {}) {
        if (entity_cap && *entity_cap == 0)
            throw error("entity cap must be positive");
        Corpus c;
        std::map<std::pair<std::string, std::string>, std::set<std::string>>
            entities_seen;
        for (auto& inst : instances) {
            if (entity_cap) {
                auto& seen = entities_seen[{inst.source, inst.cls}];
                if (!seen.count(inst.entity)) {
                    if (seen.size() >= *entity_cap) continue;
                    seen.insert(inst.entity);
                }
            }
            PropertyRef ref{inst.source, inst.cls, inst.property};
            c.index_[std::move(ref)].push_back(inst.value);
            c.sources_.insert(inst.source);
            c.classes_.insert(inst.cls);
            c.instances_.push_back(std::move(inst));
        }
        if (c.instances_.empty()) throw error("empty corpus");
        c.fingerprint_ = c.compute_fingerprint();
        return c;
    }

    const std::vector<PropertyInstance>& instances() const {
        return instances_;
    }
    const std::map<PropertyRef, std::vector<std::string>>& index() const {
        return index_;
    }
    const std::set<std::string>& sources() const { return sources_; }
    const std::set<std::string>& classes() const { return classes_; }

    bool contains(const PropertyRef& ref) const {
        return index_.count(ref) > 0;
    }

    const std::vector<std::string>& values_of(const PropertyRef& ref) const {
        auto it = index_.find(ref);
        if (it == index_.end())
            throw error("unknown property: (" + ref.source + ", " + ref.cls +
                        ", " + ref.name + ")");
        return it->second;
    }

    std::vector<PropertyRef> refs() const {
        std::vector<PropertyRef> out;
        out.reserve(index_.size());
        for (const auto& [ref, values] : index_) out.push_back(ref);
        return out;
    }

    std::uint64_t fingerprint() const { return fingerprint_; }

private:
    std::uint64_t compute_fingerprint() const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        auto add = [&h](const std::string& s) {
            h = detail::fnv1a64(s, h);
            h = detail::fnv1a64("\x1f", h);
        };
        for (const auto& i : instances_) {
            add(i.source);
            add(i.cls);
            add(i.entity);
            add(i.property);
            add(i.value);
        }
        return h;
    }

    std::vector<PropertyInstance> instances_;
    std::map<PropertyRef, std::vector<std::string>> index_;
    std::set<std::string> sources_;
    std::set<std::string> classes_;
    std::uint64_t fingerprint_ = 0;
};

namespace detail {

inline nlohmann::json parse_jsonl_object(const std::string& path,
                                         std::size_t lineno,
                                         const std::string& line) {
    nlohmann::json obj = nlohmann::json::parse(line, nullptr, false);
    if (obj.is_discarded() || !obj.is_object())
        throw error(path + ":" + std::to_string(lineno) +
                    ": not a JSON object");
    return obj;
}

inline std::string required_string(const nlohmann::json& obj, const char* key,
                                   const std::string& path,
                                   std::size_t lineno) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw error(path + ":" + std::to_string(lineno) + ": missing field \"" +
                    key + "\"");
    if (!it->is_string())
        throw error(path + ":" + std::to_string(lineno) + ": field \"" + key +
                    "\" is not a string");
    return it->get<std::string>();
}

inline void require_non_blank(const std::string& v, const char* key,
                              const std::string& path, std::size_t lineno) {
    if (is_blank(v))
        throw error(path + ":" + std::to_string(lineno) + ": field \"" + key +
                    "\" is empty");
}

}  // namespace detail

// Instance file: JSON Lines, one object per line:
//   {"source": str, "class": str, "entity": str, "property": str, "value": str}
inline Corpus load_corpus(const std::string& path,
                          std::optional<std::size_t> entity_cap = {}) {
    std::vector<PropertyInstance> instances;
    detail::for_each_line(path, [&](std::size_t lineno,
                                    const std::string& line) {
        if (detail::is_blank(line)) return;
        nlohmann::json obj = detail::parse_jsonl_object(path, lineno, line);
        PropertyInstance inst;
        inst.source = detail::required_string(obj, "source", path, lineno);
        inst.cls = detail::required_string(obj, "class", path, lineno);
        inst.entity = detail::required_string(obj, "entity", path, lineno);
        inst.property = detail::required_string(obj, "property", path, lineno);
        inst.value = detail::required_string(obj, "value", path, lineno);
        detail::require_non_blank(inst.source, "source", path, lineno);
        detail::require_non_blank(inst.cls, "class", path, lineno);
        detail::require_non_blank(inst.entity, "entity", path, lineno);
        detail::require_non_blank(inst.property, "property", path, lineno);
        instances.push_back(std::move(inst));
    });
    if (instances.empty()) throw error("empty corpus: " + path);
    return Corpus::from_instances(std::move(instances), entity_cap);
}

// Alignment file: JSON Lines:
//   {"source": str, "class": str, "property": str, "reference": str}
// Identical duplicates are deduplicated; conflicting duplicates are an error.
inline AlignmentTable load_alignments(const std::string& path) {
    std::map<PropertyRef, std::string> entries;
    detail::for_each_line(path, [&](std::size_t lineno,
                                    const std::string& line) {
        if (detail::is_blank(line)) return;
        nlohmann::json obj = detail::parse_jsonl_object(path, lineno, line);
        PropertyRef ref;
        ref.source = detail::required_string(obj, "source", path, lineno);
        ref.cls = detail::required_string(obj, "class", path, lineno);
        ref.name = detail::required_string(obj, "property", path, lineno);
        std::string reference =
            detail::required_string(obj, "reference", path, lineno);
        detail::require_non_blank(ref.source, "source", path, lineno);
        detail::require_non_blank(ref.cls, "class", path, lineno);
        detail::require_non_blank(ref.name, "property", path, lineno);
        detail::require_non_blank(reference, "reference", path, lineno);
        auto [it, inserted] = entries.emplace(std::move(ref), reference);
        if (!inserted && it->second != reference)
            throw error(path + ":" + std::to_string(lineno) +
                        ": conflicting reference for property (" +
                        it->first.source + ", " + it->first.cls + ", " +
                        it->first.name + "): \"" + it->second + "\" vs \"" +
                        reference + "\"");
    });
    return AlignmentTable(std::move(entries));
}

// Alignment entries whose PropertyRef does not occur in the corpus. Such
// entries are permitted; callers typically warn about them.
inline std::vector<PropertyRef> alignments_missing_from_corpus(
    const AlignmentTable& table, const Corpus& corpus) {
    std::vector<PropertyRef> missing;
    for (const auto& [ref, reference] : table.entries())
        if (!corpus.contains(ref)) missing.push_back(ref);
    return missing;
}

// Every unordered cross-source same-class pair of corpus properties aligned
// to the same reference property, in canonical order.
inline std::set<RefPair> ground_truth_pairs(const AlignmentTable& table,
                                            const Corpus& corpus) {
    std::map<std::pair<std::string, std::string>, std::vector<PropertyRef>>
        by_class_and_reference;
    for (const auto& [ref, reference] : table.entries())
        if (corpus.contains(ref))
            by_class_and_reference[{ref.cls, reference}].push_back(ref);
    std::set<RefPair> out;
    for (const auto& [key, refs] : by_class_and_reference) {
        for (std::size_t i = 0; i < refs.size(); ++i)
            for (std::size_t j = i + 1; j < refs.size(); ++j)
                if (refs[i].source != refs[j].source)
                    out.insert(canonical_pair(refs[i], refs[j]));
    }
    return out;
}

using SourceFilter =
    std::function<bool(const std::string&, const std::string&)>;

// All unordered cross-source same-class pairs, canonically ordered. The
// optional filter sees the two source identifiers of the canonical pair.
inline std::vector<RefPair> candidate_pairs(const Corpus& corpus,
                                            const SourceFilter& filter = {}) {
    std::map<std::string, std::vector<PropertyRef>> by_class;
    for (const auto& [ref, values] : corpus.index())
        by_class[ref.cls].push_back(ref);
    std::vector<RefPair> out;
    for (const auto& [cls, refs] : by_class) {
        // refs inherit the index's (source, class, name) order, so (i, j)
        // with i < j is already canonical.
        for (std::size_t i = 0; i < refs.size(); ++i) {
            for (std::size_t j = i + 1; j < refs.size(); ++j) {
                if (refs[i].source == refs[j].source) continue;
                if (filter && !filter(refs[i].source, refs[j].source))
                    continue;
                out.emplace_back(refs[i], refs[j]);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

// Explicit labeled-pair file (training sets exported/imported across
// domains): JSON Lines
//   {"a_source","a_class","a_property","b_source","b_class","b_property",
//    "label": bool}
inline std::vector<LabeledPair> load_labeled_pairs(const std::string& path) {
    std::vector<LabeledPair> out;
    detail::for_each_line(path, [&](std::size_t lineno,
                                    const std::string& line) {
        if (detail::is_blank(line)) return;
        nlohmann::json obj = detail::parse_jsonl_object(path, lineno, line);
        LabeledPair p;
        p.a.source = detail::required_string(obj, "a_source", path, lineno);
        p.a.cls = detail::required_string(obj, "a_class", path, lineno);
        p.a.name = detail::required_string(obj, "a_property", path, lineno);
        p.b.source = detail::required_string(obj, "b_source", path, lineno);
        p.b.cls = detail::required_string(obj, "b_class", path, lineno);
        p.b.name = detail::required_string(obj, "b_property", path, lineno);
        auto it = obj.find("label");
        if (it == obj.end() || !it->is_boolean())
            throw error(path + ":" + std::to_string(lineno) +
                        ": missing or non-boolean \"label\"");
        p.label = it->get<bool>();
        if (p.a.source == p.b.source)
            throw error(path + ":" + std::to_string(lineno) +
                        ": pair endpoints share source \"" + p.a.source +
                        "\"");
        out.push_back(std::move(p));
    });
    return out;
}

inline void write_labeled_pairs(const std::string& path,
                                const std::vector<LabeledPair>& pairs) {
    std::ofstream out = detail::open_output(path);
    for (const auto& p : pairs) {
        nlohmann::json obj{
            {"a_source", p.a.source},   {"a_class", p.a.cls},
            {"a_property", p.a.name},   {"b_source", p.b.source},
            {"b_class", p.b.cls},       {"b_property", p.b.name},
            {"label", p.label},
        };
        out << obj.dump() << '\n';
    }
}

inline nlohmann::json ref_to_json(const PropertyRef& ref) {
    return {{"source", ref.source}, {"class", ref.cls}, {"property", ref.name}};
}

}  // namespace propmatch
