#pragma once

#include <string>

#include "mlbs/model.hpp"

namespace mlbs {

// Instance files are UTF-8 JSON with top-level keys control_points, lines,
// timetables, deadhead_matrix, r_min, fleet_size, target_set_capacity,
// overrides. Load errors carry a JSON-pointer-style path to the bad field.
ProblemInstance load_instance(const std::string& path);
ProblemInstance parse_instance(const std::string& json_text);
std::string instance_to_json(const ProblemInstance& instance);
void save_instance(const ProblemInstance& instance, const std::string& path);

// Schedule export: trips plus the objective report.
std::string schedule_to_json(const ProblemInstance& instance,
                             const Schedule& schedule);
Schedule parse_schedule(const std::string& json_text);
Schedule load_schedule(const std::string& path);
void save_schedule(const ProblemInstance& instance, const Schedule& schedule,
                   const std::string& path);

// Scenario files: a bare JSON array of travel-time overrides, or an object
// with an "overrides" array (same shape as the instance key).
std::vector<TravelTimeOverride> parse_overrides(const std::string& json_text);
std::vector<TravelTimeOverride> load_overrides(const std::string& path);

// Write-temp-rename so partially written files are never observed.
void atomic_write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace mlbs
