#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace retrace {

struct SourcePos {
    int line = 0;
    int column = 0;
};

enum class DiagCode {
    SyntaxError,
    UnknownIdentifier,
    TypeMismatch,
    DuplicateName,
    IncompleteInit,
    MissingOperation,
    ExtraOperation,
    SignatureMismatch,
    DanglingRefinesTarget,
    RefinesMismatch,
    VariableClash,
    ParameterClash,
    AssignmentClash,
    UnsupportedRefinement,
    UnrefinedAbstractEvent,
};

inline const char* diag_code_name(DiagCode c) {
    switch (c) {
        case DiagCode::SyntaxError: return "SyntaxError";
        case DiagCode::UnknownIdentifier: return "UnknownIdentifier";
        case DiagCode::TypeMismatch: return "TypeMismatch";
        case DiagCode::DuplicateName: return "DuplicateName";
        case DiagCode::IncompleteInit: return "IncompleteInit";
        case DiagCode::MissingOperation: return "MissingOperation";
        case DiagCode::ExtraOperation: return "ExtraOperation";
        case DiagCode::SignatureMismatch: return "SignatureMismatch";
        case DiagCode::DanglingRefinesTarget: return "DanglingRefinesTarget";
        case DiagCode::RefinesMismatch: return "RefinesMismatch";
        case DiagCode::VariableClash: return "VariableClash";
        case DiagCode::ParameterClash: return "ParameterClash";
        case DiagCode::AssignmentClash: return "AssignmentClash";
        case DiagCode::UnsupportedRefinement: return "UnsupportedRefinement";
        case DiagCode::UnrefinedAbstractEvent: return "UnrefinedAbstractEvent";
    }
    return "Unknown";
}

struct Diagnostic {
    DiagCode code;
    std::string message;
    SourcePos pos{};  // {0,0} when not tied to a source location
};

inline std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    if (d.pos.line > 0) {
        os << d.pos.line << ':' << d.pos.column << ": ";
    }
    os << diag_code_name(d.code) << ": " << d.message;
    return os.str();
}

inline std::string format_diagnostics(const std::vector<Diagnostic>& ds) {
    std::ostringstream os;
    for (const auto& d : ds) {
        os << format_diagnostic(d) << '\n';
    }
    return os.str();
}

inline bool has_code(const std::vector<Diagnostic>& ds, DiagCode c) {
    for (const auto& d : ds) {
        if (d.code == c) return true;
    }
    return false;
}

}  // namespace retrace
