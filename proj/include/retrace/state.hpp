#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "retrace/domain.hpp"

namespace retrace {

// Total valuation of a machine's variables. std::map keeps iteration in
// lexicographic key order, which the serializers and sorters rely on.
struct State {
    std::map<std::string, Value> vals;

    bool operator==(const State& o) const { return vals == o.vals; }
    bool operator!=(const State& o) const { return vals != o.vals; }
    bool operator<(const State& o) const { return vals < o.vals; }

    const Value* find(const std::string& name) const {
        auto it = vals.find(name);
        return it == vals.end() ? nullptr : &it->second;
    }

    std::string to_string() const {
        std::ostringstream os;
        os << '{';
        bool first = true;
        for (const auto& [k, v] : vals) {
            if (!first) os << ", ";
            first = false;
            os << k << "=" << value_to_string(v);
        }
        os << '}';
        return os.str();
    }
};

using ArgMap = std::map<std::string, Value>;

inline std::string args_to_string(const ArgMap& args) {
    std::ostringstream os;
    os << '(';
    bool first = true;
    for (const auto& [k, v] : args) {
        if (!first) os << ", ";
        first = false;
        os << k << "=" << value_to_string(v);
    }
    os << ')';
    return os.str();
}

struct Transition {
    std::string event;
    ArgMap args;
    State post;

    bool operator==(const Transition& o) const {
        return event == o.event && args == o.args && post == o.post;
    }
    bool operator<(const Transition& o) const {
        if (event != o.event) return event < o.event;
        if (args != o.args) return args < o.args;
        return post < o.post;
    }

    std::string to_string() const {
        return event + (args.empty() ? "" : args_to_string(args)) + " -> " + post.to_string();
    }
};

}  // namespace retrace

template <>
struct std::hash<retrace::State> {
    std::size_t operator()(const retrace::State& s) const {
        std::size_t h = 0;
        std::hash<std::string> hs;
        for (const auto& [k, v] : s.vals) {
            h = h * 1000003u + hs(k);
            h = h * 1000003u + std::hash<retrace::Value>{}(v);
        }
        return h;
    }
};
