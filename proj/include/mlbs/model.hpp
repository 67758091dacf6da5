#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlbs {

using Minute = int;  // minutes from midnight, one operating day [0, 1440)

constexpr Minute kDayMinutes = 1440;

struct ControlPoint {
  int id = 0;
  int initial_bus_count = 0;
};

// One directed line: departure CP -> terminal CP.
struct BusLine {
  int id = 0;
  int departure_cp = 0;
  int terminal_cp = 0;
  Minute base_travel_time = 0;
};

struct Timetable {
  int cp_id = 0;
  std::vector<Minute> departures;  // strictly increasing, in [0, 1440)
};

struct CombinedEntry {
  Minute minute = 0;
  int line_id = 0;
  int cp_id = 0;
};

struct CombinedTimetable {
  std::vector<CombinedEntry> entries;  // sorted by (minute, cp_id, line_id)
  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
};

// Travel-time perturbation: extra minutes on a line (or all lines when
// line_id < 0) for departures inside the half-open window [start, end).
struct TravelTimeOverride {
  int line_id = -1;  // -1 matches every line
  Minute window_start = 0;
  Minute window_end = kDayMinutes;
  Minute extra_minutes = 0;
};

class DeadheadMatrix {
 public:
  DeadheadMatrix() = default;
  DeadheadMatrix(std::vector<int> cp_ids, std::vector<Minute> cells);

  Minute at(int from_cp, int to_cp) const;
  const std::vector<int>& cp_ids() const { return cp_ids_; }
  Minute max_cell() const;

 private:
  int index_of(int cp_id) const;
  std::vector<int> cp_ids_;
  std::vector<Minute> cells_;  // row-major, square
};

struct ProblemInstance {
  std::vector<ControlPoint> control_points;
  std::vector<BusLine> lines;
  std::vector<Timetable> timetables;
  DeadheadMatrix deadhead_matrix;
  Minute r_min = 0;
  int fleet_size = 0;
  int target_set_capacity = 0;  // N_s
  std::vector<TravelTimeOverride> overrides;

  const BusLine* find_line(int line_id) const;
  const BusLine& line(int line_id) const;
  const ControlPoint* find_cp(int cp_id) const;
  // The unique line departing from cp_id; throws if absent.
  const BusLine& line_departing_from(int cp_id) const;
  int total_departures() const;
};

enum class TripKind { Service, Deadhead };

struct TripRecord {
  int bus_id = 0;
  TripKind kind = TripKind::Service;
  int line_id = -1;  // service trips only
  int from_cp = 0;
  int to_cp = 0;
  Minute depart = 0;
  Minute arrive = 0;
};

struct Schedule {
  std::vector<TripRecord> trips;
  // One slot per combined-timetable entry: covering bus id, or -1 if uncovered.
  std::vector<int> covered_by;
};

struct ObjectiveReport {
  int n_used = 0;         // N_u
  long deadhead_total = 0;  // T_d minutes
  int n_uncovered = 0;    // N_d

  bool operator==(const ObjectiveReport&) const = default;
  // Lexicographic (N_d, N_u, T_d): coverage first.
  bool lex_less(const ObjectiveReport& o) const;
  bool lex_less_equal(const ObjectiveReport& o) const;
};

struct Violation {
  int constraint = 0;  // 1..4 per problem constraints, 0 = internal consistency
  int bus_id = -1;
  std::string detail;
};

// Throws std::invalid_argument with a field-precise message when the instance
// breaks a structural invariant.
void check_instance(const ProblemInstance& instance);

CombinedTimetable merge_timetables(const ProblemInstance& instance);

// Base travel time plus every matching override whose half-open window
// [start, end) contains depart_minute.
Minute effective_travel_time(const ProblemInstance& instance, int line_id,
                             Minute depart_minute);

std::vector<Violation> validate_schedule(const ProblemInstance& instance,
                                         const Schedule& schedule);

ObjectiveReport compute_objectives(const ProblemInstance& instance,
                                   const Schedule& schedule);

}  // namespace mlbs
