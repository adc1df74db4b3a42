#pragma once

#include <string>
#include <vector>

#include "dqbn/engine.hpp"

namespace dqbn {

// Timeline report as CSV. Fixed header "step,variable,state,backend,
// prior,posterior"; one row per step x tracked variable x state x
// requested backend, values printed with 17 significant digits; one
// trailing comment line "# rms_percent,<backend>,<variable>,<value>"
// per non-classical backend. Byte-identical for fixed seed and flags.
std::string timeline_csv(const DqbnModel& model, const TimelineResult& result,
                         const std::vector<Backend>& backends);

// Timeline report as a static SVG: one panel per tracked variable,
// grouped bars per step showing the state-0 prior (hatched lighter
// bar) and posterior per backend. Purely deterministic output.
std::string timeline_svg(const DqbnModel& model, const TimelineResult& result,
                         const std::vector<Backend>& backends);

}  // namespace dqbn
