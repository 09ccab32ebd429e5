#pragma once

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "retrace/ast.hpp"
#include "retrace/state.hpp"

namespace retrace {

// An ordered list of transitions, INITIALISATION first.
struct RecordedTrace {
    std::string machine;
    std::vector<Transition> transitions;

    bool empty_or_init_only() const { return transitions.size() <= 1; }
};

// Derived from the concrete machine's REFINES annotations: which concrete
// events mirror which abstract event, and which refine the invisible no-op.
struct RefinementMap {
    std::map<std::string, std::set<std::string>> alt;
    std::set<std::string> skip;

    bool refines(const std::string& abstract_event, const std::string& concrete_event) const {
        auto it = alt.find(abstract_event);
        return it != alt.end() && it->second.count(concrete_event) > 0;
    }
};

class TraceIoError : public std::runtime_error {
public:
    explicit TraceIoError(const std::string& msg) : std::runtime_error(msg) {}
};

inline nlohmann::json value_to_json(const Value& v) {
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "TRUE" : "FALSE";
    if (std::holds_alternative<std::int64_t>(v)) return std::get<std::int64_t>(v);
    return std::get<std::string>(v);
}

inline Value value_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "TRUE") return true;
        if (s == "FALSE") return false;
        return s;
    }
    throw TraceIoError("unsupported value in trace file: " + j.dump());
}

inline nlohmann::json trace_to_json(const RecordedTrace& t,
                                    const RefinementMap* map = nullptr) {
    nlohmann::json j;
    j["machine"] = t.machine;
    j["transitions"] = nlohmann::json::array();
    for (const auto& tr : t.transitions) {
        nlohmann::json jt;
        jt["event"] = tr.event;
        jt["args"] = nlohmann::json::object();
        for (const auto& [k, v] : tr.args) jt["args"][k] = value_to_json(v);
        jt["post"] = nlohmann::json::object();
        for (const auto& [k, v] : tr.post.vals) jt["post"][k] = value_to_json(v);
        j["transitions"].push_back(std::move(jt));
    }
    if (map) {
        nlohmann::json jm;
        jm["alt"] = nlohmann::json::object();
        for (const auto& [a, cs] : map->alt) {
            jm["alt"][a] = nlohmann::json::array();
            for (const auto& c : cs) jm["alt"][a].push_back(c);
        }
        jm["skip"] = nlohmann::json::array();
        for (const auto& s : map->skip) jm["skip"].push_back(s);
        j["refinement"] = std::move(jm);
    }
    return j;
}

struct LoadedTrace {
    RecordedTrace trace;
    std::optional<RefinementMap> refinement;  // present on refine solutions
};

inline LoadedTrace trace_from_json(const nlohmann::json& j) {
    LoadedTrace out;
    if (!j.is_object() || !j.contains("machine") || !j.contains("transitions")) {
        throw TraceIoError("trace file must be an object with machine and transitions");
    }
    out.trace.machine = j.at("machine").get<std::string>();
    for (const auto& jt : j.at("transitions")) {
        Transition tr;
        tr.event = jt.at("event").get<std::string>();
        // animator-style initialisation names map onto the canonical one
        if (tr.event == "$initialise_machine") tr.event = kInitEventName;
        if (jt.contains("args")) {
            for (auto it = jt.at("args").begin(); it != jt.at("args").end(); ++it) {
                tr.args[it.key()] = value_from_json(it.value());
            }
        }
        for (auto it = jt.at("post").begin(); it != jt.at("post").end(); ++it) {
            tr.post.vals[it.key()] = value_from_json(it.value());
        }
        out.trace.transitions.push_back(std::move(tr));
    }
    if (j.contains("refinement")) {
        RefinementMap m;
        const auto& jm = j.at("refinement");
        for (auto it = jm.at("alt").begin(); it != jm.at("alt").end(); ++it) {
            for (const auto& c : it.value()) {
                m.alt[it.key()].insert(c.get<std::string>());
            }
        }
        for (const auto& s : jm.at("skip")) m.skip.insert(s.get<std::string>());
        out.refinement = std::move(m);
    }
    return out;
}

// Byte-stable serialization: nlohmann::json orders object keys
// lexicographically, and we pin the indentation.
inline std::string trace_to_text(const RecordedTrace& t, const RefinementMap* map = nullptr) {
    return trace_to_json(t, map).dump(2) + "\n";
}

inline void write_trace_file(const std::string& path, const RecordedTrace& t,
                             const RefinementMap* map = nullptr) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw TraceIoError("cannot open '" + path + "' for writing");
    f << trace_to_text(t, map);
}

inline LoadedTrace read_trace_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw TraceIoError("cannot open '" + path + "'");
    try {
        nlohmann::json j;
        f >> j;
        return trace_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw TraceIoError("malformed trace file '" + path + "': " + e.what());
    }
}

// Restriction of a trace to one machine's vocabulary: posts keep only the
// machine's variables, args keep only the named event's parameters.
inline RecordedTrace project_trace_to(const Machine& m, const RecordedTrace& t) {
    RecordedTrace out;
    out.machine = m.name;
    const auto vars = m.variable_names();
    for (const auto& tr : t.transitions) {
        Transition p;
        p.event = tr.event;
        if (const Event* ev = m.find_event(tr.event)) {
            for (const auto& param : ev->params) {
                auto it = tr.args.find(param.name);
                if (it != tr.args.end()) p.args[param.name] = it->second;
            }
        }
        for (const auto& [k, v] : tr.post.vals) {
            if (vars.count(k)) p.post.vals[k] = v;
        }
        out.transitions.push_back(std::move(p));
    }
    return out;
}

}  // namespace retrace
