#pragma once

#include <string>

#include "mlbs/model.hpp"

namespace mlbs {

// One row per used bus, one rectangle per trip on the time axis; service
// trips are filled per line, deadheads hatched. Returns a standalone SVG
// document.
std::string render_gantt(const Schedule& schedule, const ProblemInstance& instance);

void render_gantt_file(const Schedule& schedule, const ProblemInstance& instance,
                       const std::string& path);

}  // namespace mlbs
