#pragma once

#include <string>

#include "deblur/nonblind.hpp"
#include "deblur/pipeline.hpp"

namespace deblur {

/// Applies a JSON object on top of the given parameter sets and
/// re-validates. Solver keys sit at the top level, non-blind keys in a
/// "nonblind" sub-object; unknown keys are rejected.
void apply_config_json(const std::string& json_text, SolverParams& solver,
                       NonBlindParams& nonblind);

/// Energy traces and timing of a finished run as a JSON document.
std::string trace_to_json(const DeblurResult& result);

}  // namespace deblur
