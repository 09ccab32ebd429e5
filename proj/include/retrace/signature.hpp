#pragma once

#include <string>
#include <vector>

#include "retrace/ast.hpp"

namespace retrace {

// Static shape of the refinement relation between two machines.
//   B mode: same event names, pointwise identical parameter lists, nothing new.
//   Event-B mode: every REFINES annotation targets an existing abstract event.
// Returns an empty list iff well-formed; never throws.
inline std::vector<Diagnostic> check_refinement_signature(const Machine& abstract,
                                                          const Machine& concrete,
                                                          RefinementMode mode) {
    std::vector<Diagnostic> diags;
    if (!concrete.refines || *concrete.refines != abstract.name) {
        diags.push_back({DiagCode::RefinesMismatch,
                         "machine '" + concrete.name + "' does not refine '" + abstract.name +
                             "'",
                         {}});
    }
    if (mode == RefinementMode::B) {
        for (const auto& ae : abstract.events) {
            const Event* ce = concrete.find_event(ae.name);
            if (!ce) {
                diags.push_back({DiagCode::MissingOperation,
                                 "abstract operation '" + ae.name +
                                     "' has no concrete counterpart",
                                 ae.pos});
                continue;
            }
            bool match = ae.params.size() == ce->params.size();
            for (std::size_t i = 0; match && i < ae.params.size(); ++i) {
                match = ae.params[i].name == ce->params[i].name &&
                        same_domain(ae.params[i].domain, ce->params[i].domain);
            }
            if (!match) {
                diags.push_back({DiagCode::SignatureMismatch,
                                 "operation '" + ae.name +
                                     "' changes its parameter list in the refinement",
                                 ce->pos});
            }
        }
        for (const auto& ce : concrete.events) {
            if (!abstract.find_event(ce.name)) {
                diags.push_back({DiagCode::ExtraOperation,
                                 "operation '" + ce.name + "' does not exist in '" +
                                     abstract.name + "'",
                                 ce.pos});
            }
        }
    }
    // dangling REFINES targets are meaningful in both modes
    for (const auto& ce : concrete.events) {
        for (const auto& target : ce.refines_events) {
            if (!abstract.find_event(target)) {
                diags.push_back({DiagCode::DanglingRefinesTarget,
                                 "event '" + ce.name + "' refines unknown abstract event '" +
                                     target + "'",
                                 ce.pos});
            }
        }
    }
    return diags;
}

}  // namespace retrace
