#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace retrace {

// A runtime value: TRUE/FALSE, a bounded integer, or an enum literal.
// The variant order fixes the canonical cross-kind ordering used when
// sorting transitions: booleans < integers < enum literals.
using Value = std::variant<bool, std::int64_t, std::string>;

inline std::string value_to_string(const Value& v) {
    if (std::holds_alternative<bool>(v)) {
        return std::get<bool>(v) ? "TRUE" : "FALSE";
    }
    if (std::holds_alternative<std::int64_t>(v)) {
        return std::to_string(std::get<std::int64_t>(v));
    }
    return std::get<std::string>(v);
}

enum class DomainKind { Boolean, IntRange, EnumSet };

struct Domain {
    DomainKind kind = DomainKind::Boolean;
    std::int64_t lo = 0, hi = 0;        // IntRange
    std::vector<std::string> literals;  // EnumSet, declaration order

    static Domain boolean() { return Domain{DomainKind::Boolean, 0, 0, {}}; }
    static Domain int_range(std::int64_t lo, std::int64_t hi) {
        return Domain{DomainKind::IntRange, lo, hi, {}};
    }
    static Domain enum_set(std::vector<std::string> lits) {
        return Domain{DomainKind::EnumSet, 0, 0, std::move(lits)};
    }

    bool contains(const Value& v) const {
        switch (kind) {
            case DomainKind::Boolean:
                return std::holds_alternative<bool>(v);
            case DomainKind::IntRange:
                return std::holds_alternative<std::int64_t>(v) &&
                       std::get<std::int64_t>(v) >= lo && std::get<std::int64_t>(v) <= hi;
            case DomainKind::EnumSet:
                return std::holds_alternative<std::string>(v) &&
                       std::find(literals.begin(), literals.end(), std::get<std::string>(v)) !=
                           literals.end();
        }
        return false;
    }

    // Canonical enumeration order: FALSE,TRUE; lo..hi; declaration order.
    Value value_at(std::size_t i) const {
        switch (kind) {
            case DomainKind::Boolean: return i != 0;
            case DomainKind::IntRange: return lo + static_cast<std::int64_t>(i);
            case DomainKind::EnumSet: return literals[i];
        }
        return false;
    }

    std::vector<Value> values() const {
        std::vector<Value> out;
        for (std::size_t i = 0; i < size(); ++i) out.push_back(value_at(i));
        return out;
    }

    std::size_t size() const {
        switch (kind) {
            case DomainKind::Boolean: return 2;
            case DomainKind::IntRange: return static_cast<std::size_t>(hi - lo + 1);
            case DomainKind::EnumSet: return literals.size();
        }
        return 0;
    }

    std::string to_string() const {
        switch (kind) {
            case DomainKind::Boolean: return "BOOL";
            case DomainKind::IntRange: return std::to_string(lo) + ".." + std::to_string(hi);
            case DomainKind::EnumSet: {
                std::string s = "{ ";
                for (std::size_t i = 0; i < literals.size(); ++i) {
                    if (i) s += ", ";
                    s += literals[i];
                }
                s += " }";
                return s;
            }
        }
        return "?";
    }
};

// Structural equality; enum sets compare as sets.
inline bool same_domain(const Domain& a, const Domain& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case DomainKind::Boolean: return true;
        case DomainKind::IntRange: return a.lo == b.lo && a.hi == b.hi;
        case DomainKind::EnumSet: {
            auto la = a.literals, lb = b.literals;
            std::sort(la.begin(), la.end());
            std::sort(lb.begin(), lb.end());
            return la == lb;
        }
    }
    return false;
}

}  // namespace retrace
