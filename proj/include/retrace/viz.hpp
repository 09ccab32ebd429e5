#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "retrace/trace.hpp"

namespace retrace {

enum class LinkKind { Refines, SkipPlaceholder, StutterPlaceholder };

struct DiagramBox {
    std::string event;  // empty for placeholders
    std::vector<std::pair<std::string, std::string>> args;     // name, rendered value
    std::vector<std::pair<std::string, std::string>> changes;  // var, rendered new value
    bool placeholder = false;
    LinkKind placeholder_kind = LinkKind::Refines;
};

struct DiagramLink {
    std::size_t abstract_index;
    std::size_t concrete_index;
    LinkKind kind;
};

// Two horizontal lanes: the abstract trace (with placeholders where the
// concrete trace inserted behavior) and the concrete solution. Every concrete
// box carries exactly one cross link.
struct TraceDiagram {
    std::vector<DiagramBox> abstract_lane;
    std::vector<DiagramBox> concrete_lane;
    std::vector<DiagramLink> links;
    std::optional<std::size_t> stuck_abstract_index;  // set on partial (failed) alignments
};

class DiagramError : public std::runtime_error {
public:
    explicit DiagramError(const std::string& msg) : std::runtime_error(msg) {}
};

namespace detail {

inline DiagramBox make_box(const Transition& tr, const State* prev) {
    DiagramBox box;
    box.event = tr.event;
    for (const auto& [k, v] : tr.args) box.args.emplace_back(k, value_to_string(v));
    for (const auto& [k, v] : tr.post.vals) {
        const Value* old = prev ? prev->find(k) : nullptr;
        if (!old || !(*old == v)) box.changes.emplace_back(k, value_to_string(v));
    }
    return box;
}

inline State restrict_to(const State& s, const std::set<std::string>& names) {
    State out;
    for (const auto& n : names) {
        if (const Value* v = s.find(n)) out.vals[n] = *v;
    }
    return out;
}

}  // namespace detail

// Aligns a solution against the abstract trace it was produced from. The
// abstract variable set is read off the recorded abstract posts; progress is
// recognized by the abstract projection reaching the next recorded state.
inline TraceDiagram build_diagram(const RecordedTrace& abstract, const RecordedTrace& solution,
                                  const RefinementMap& map) {
    if (abstract.transitions.empty() || solution.transitions.empty() ||
        abstract.transitions.front().event != kInitEventName ||
        solution.transitions.front().event != kInitEventName) {
        throw DiagramError("both traces must start with INITIALISATION");
    }
    std::set<std::string> abs_vars;
    for (const auto& [k, v] : abstract.transitions.front().post.vals) abs_vars.insert(k);

    TraceDiagram d;
    d.concrete_lane.push_back(detail::make_box(solution.transitions.front(), nullptr));
    d.abstract_lane.push_back(detail::make_box(abstract.transitions.front(), nullptr));
    d.links.push_back({0, 0, LinkKind::Refines});

    std::size_t ai = 1;  // next abstract transition to place
    for (std::size_t ci = 1; ci < solution.transitions.size(); ++ci) {
        const Transition& tr = solution.transitions[ci];
        const State& pre = solution.transitions[ci - 1].post;
        State proj_pre = detail::restrict_to(pre, abs_vars);
        State proj_post = detail::restrict_to(tr.post, abs_vars);

        bool progress = false;
        if (ai < abstract.transitions.size() && map.refines(abstract.transitions[ai].event,
                                                            tr.event)) {
            State wanted = detail::restrict_to(abstract.transitions[ai].post, abs_vars);
            progress = proj_post == wanted;
        }
        d.concrete_lane.push_back(
            detail::make_box(tr, &solution.transitions[ci - 1].post));
        if (progress) {
            d.abstract_lane.push_back(detail::make_box(
                abstract.transitions[ai], &abstract.transitions[ai - 1].post));
            d.links.push_back({d.abstract_lane.size() - 1, ci, LinkKind::Refines});
            ++ai;
            continue;
        }
        bool still = proj_post == proj_pre;
        if (still && map.skip.count(tr.event)) {
            DiagramBox ph;
            ph.placeholder = true;
            ph.placeholder_kind = LinkKind::SkipPlaceholder;
            d.abstract_lane.push_back(std::move(ph));
            d.links.push_back({d.abstract_lane.size() - 1, ci, LinkKind::SkipPlaceholder});
            continue;
        }
        if (still && ai < abstract.transitions.size() &&
            map.refines(abstract.transitions[ai].event, tr.event)) {
            DiagramBox ph;
            ph.placeholder = true;
            ph.placeholder_kind = LinkKind::StutterPlaceholder;
            d.abstract_lane.push_back(std::move(ph));
            d.links.push_back({d.abstract_lane.size() - 1, ci, LinkKind::StutterPlaceholder});
            continue;
        }
        throw DiagramError("solution transition " + std::to_string(ci) + " (" + tr.event +
                           ") cannot be aligned with the abstract trace");
    }
    // a partial solution leaves abstract work unplaced; mark the stuck step
    if (ai < abstract.transitions.size()) {
        d.stuck_abstract_index = d.abstract_lane.size();
        for (; ai < abstract.transitions.size(); ++ai) {
            d.abstract_lane.push_back(detail::make_box(
                abstract.transitions[ai], &abstract.transitions[ai - 1].post));
        }
    }
    return d;
}

namespace detail {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string box_label(const DiagramBox& b) {
    if (b.placeholder) {
        return b.placeholder_kind == LinkKind::SkipPlaceholder ? "<skip>" : "<stutter>";
    }
    std::ostringstream os;
    os << b.event;
    if (!b.args.empty()) {
        os << '(';
        for (std::size_t i = 0; i < b.args.size(); ++i) {
            if (i) os << ", ";
            os << b.args[i].first << '=' << b.args[i].second;
        }
        os << ')';
    }
    for (const auto& [var, val] : b.changes) {
        os << '\n' << var << " := " << val;
    }
    return os.str();
}

}  // namespace detail

// Deterministic graph-description output; node ids a0.., c0.. follow lane
// order, so equal diagrams serialize byte-identically.
inline std::string emit_dot(const TraceDiagram& d) {
    std::ostringstream os;
    os << "digraph trace_refinement {\n";
    os << "  rankdir=LR;\n";
    os << "  node [shape=box, fontname=\"Helvetica\"];\n";
    os << "  subgraph cluster_abstract {\n    label=\"abstract\";\n";
    for (std::size_t i = 0; i < d.abstract_lane.size(); ++i) {
        os << "    a" << i << " [label=\"" << detail::dot_escape(
            detail::box_label(d.abstract_lane[i])) << "\"";
        if (d.abstract_lane[i].placeholder) os << ", style=dashed";
        if (d.stuck_abstract_index && *d.stuck_abstract_index == i) {
            os << ", style=filled, fillcolor=lightcoral";
        }
        os << "];\n";
    }
    for (std::size_t i = 0; i + 1 < d.abstract_lane.size(); ++i) {
        os << "    a" << i << " -> a" << i + 1 << ";\n";
    }
    os << "  }\n";
    os << "  subgraph cluster_concrete {\n    label=\"concrete\";\n";
    for (std::size_t i = 0; i < d.concrete_lane.size(); ++i) {
        os << "    c" << i << " [label=\"" << detail::dot_escape(
            detail::box_label(d.concrete_lane[i])) << "\"];\n";
    }
    for (std::size_t i = 0; i + 1 < d.concrete_lane.size(); ++i) {
        os << "    c" << i << " -> c" << i + 1 << ";\n";
    }
    os << "  }\n";
    for (const auto& link : d.links) {
        os << "  a" << link.abstract_index << " -> c" << link.concrete_index;
        switch (link.kind) {
            case LinkKind::Refines:
                os << " [dir=both, arrowhead=box, arrowtail=box, color=red, constraint=false]";
                break;
            case LinkKind::SkipPlaceholder:
            case LinkKind::StutterPlaceholder:
                os << " [dir=none, style=dashed, color=red, constraint=false]";
                break;
        }
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

}  // namespace retrace
