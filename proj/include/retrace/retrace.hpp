#pragma once

// Umbrella header: trace refinement for finite-state guarded-command
// machines, strict (B-style) and stuttering-aware (Event-B-style).

#include "retrace/animate.hpp"
#include "retrace/ast.hpp"
#include "retrace/coupling.hpp"
#include "retrace/diagnostics.hpp"
#include "retrace/domain.hpp"
#include "retrace/eval.hpp"
#include "retrace/parser.hpp"
#include "retrace/printer.hpp"
#include "retrace/record.hpp"
#include "retrace/refine_b.hpp"
#include "retrace/refine_core.hpp"
#include "retrace/refine_eventb.hpp"
#include "retrace/report.hpp"
#include "retrace/signature.hpp"
#include "retrace/state.hpp"
#include "retrace/trace.hpp"
#include "retrace/viz.hpp"
