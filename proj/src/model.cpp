#include "mlbs/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace mlbs {

DeadheadMatrix::DeadheadMatrix(std::vector<int> cp_ids, std::vector<Minute> cells)
    : cp_ids_(std::move(cp_ids)), cells_(std::move(cells)) {
  const std::size_t n = cp_ids_.size();
  if (cells_.size() != n * n) {
    throw std::invalid_argument("deadhead_matrix: expected " +
                                std::to_string(n * n) + " cells, got " +
                                std::to_string(cells_.size()));
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (cells_[i * n + i] != 0) {
      throw std::invalid_argument("deadhead_matrix: nonzero diagonal at cp " +
                                  std::to_string(cp_ids_[i]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (cells_[i * n + j] < 0) {
        throw std::invalid_argument("deadhead_matrix: negative cell (" +
                                    std::to_string(cp_ids_[i]) + "," +
                                    std::to_string(cp_ids_[j]) + ")");
      }
    }
  }
}

int DeadheadMatrix::index_of(int cp_id) const {
  for (std::size_t i = 0; i < cp_ids_.size(); ++i) {
    if (cp_ids_[i] == cp_id) return static_cast<int>(i);
  }
  throw std::out_of_range("deadhead_matrix: unknown cp " + std::to_string(cp_id));
}

Minute DeadheadMatrix::at(int from_cp, int to_cp) const {
  const int i = index_of(from_cp);
  const int j = index_of(to_cp);
  return cells_[static_cast<std::size_t>(i) * cp_ids_.size() + j];
}

Minute DeadheadMatrix::max_cell() const {
  Minute m = 0;
  for (Minute c : cells_) m = std::max(m, c);
  return m;
}

const BusLine* ProblemInstance::find_line(int line_id) const {
  for (const auto& l : lines) {
    if (l.id == line_id) return &l;
  }
  return nullptr;
}

const BusLine& ProblemInstance::line(int line_id) const {
  const BusLine* l = find_line(line_id);
  if (!l) throw std::invalid_argument("unknown line id " + std::to_string(line_id));
  return *l;
}

const ControlPoint* ProblemInstance::find_cp(int cp_id) const {
  for (const auto& c : control_points) {
    if (c.id == cp_id) return &c;
  }
  return nullptr;
}

const BusLine& ProblemInstance::line_departing_from(int cp_id) const {
  const BusLine* found = nullptr;
  for (const auto& l : lines) {
    if (l.departure_cp == cp_id) {
      if (found) {
        throw std::invalid_argument("cp " + std::to_string(cp_id) +
                                    " is the departure of more than one line");
      }
      found = &l;
    }
  }
  if (!found) {
    throw std::invalid_argument("cp " + std::to_string(cp_id) +
                                " is not the departure of any line");
  }
  return *found;
}

int ProblemInstance::total_departures() const {
  int n = 0;
  for (const auto& tt : timetables) n += static_cast<int>(tt.departures.size());
  return n;
}

void check_instance(const ProblemInstance& instance) {
  std::unordered_set<int> cp_ids;
  int initial_total = 0;
  for (const auto& cp : instance.control_points) {
    if (!cp_ids.insert(cp.id).second) {
      throw std::invalid_argument("control_points: duplicate id " +
                                  std::to_string(cp.id));
    }
    if (cp.initial_bus_count < 0) {
      throw std::invalid_argument("control_points: cp " + std::to_string(cp.id) +
                                  " has negative initial_bus_count");
    }
    initial_total += cp.initial_bus_count;
  }
  std::unordered_set<int> line_ids;
  for (const auto& l : instance.lines) {
    if (!line_ids.insert(l.id).second) {
      throw std::invalid_argument("lines: duplicate id " + std::to_string(l.id));
    }
    if (l.departure_cp == l.terminal_cp) {
      throw std::invalid_argument("lines: line " + std::to_string(l.id) +
                                  " departs and terminates at the same cp");
    }
    if (!cp_ids.count(l.departure_cp) || !cp_ids.count(l.terminal_cp)) {
      throw std::invalid_argument("lines: line " + std::to_string(l.id) +
                                  " references an unknown cp");
    }
    if (l.base_travel_time <= 0) {
      throw std::invalid_argument("lines: line " + std::to_string(l.id) +
                                  " has non-positive base_travel_time");
    }
  }
  for (const auto& tt : instance.timetables) {
    if (!cp_ids.count(tt.cp_id)) {
      throw std::invalid_argument("timetables: unknown cp " +
                                  std::to_string(tt.cp_id));
    }
    instance.line_departing_from(tt.cp_id);  // must be unique
    Minute prev = -1;
    for (Minute m : tt.departures) {
      if (m < 0 || m >= kDayMinutes) {
        throw std::invalid_argument("timetables: cp " + std::to_string(tt.cp_id) +
                                    " departure " + std::to_string(m) +
                                    " outside [0, 1440)");
      }
      if (m <= prev) {
        throw std::invalid_argument("timetables: cp " + std::to_string(tt.cp_id) +
                                    " departures not strictly increasing at " +
                                    std::to_string(m));
      }
      prev = m;
    }
  }
  // Zero is allowed: a degenerate fleet leaves every departure uncovered.
  if (instance.fleet_size < 0) {
    throw std::invalid_argument("fleet_size must be >= 0");
  }
  if (instance.target_set_capacity < 1) {
    throw std::invalid_argument("target_set_capacity must be >= 1");
  }
  if (instance.r_min < 0) {
    throw std::invalid_argument("r_min must be >= 0");
  }
  if (initial_total != instance.fleet_size) {
    throw std::invalid_argument(
        "sum of initial_bus_count (" + std::to_string(initial_total) +
        ") must equal fleet_size (" + std::to_string(instance.fleet_size) + ")");
  }
  for (const auto& ov : instance.overrides) {
    if (ov.line_id >= 0 && !line_ids.count(ov.line_id)) {
      throw std::invalid_argument("overrides: unknown line " +
                                  std::to_string(ov.line_id));
    }
    if (ov.window_end <= ov.window_start) {
      throw std::invalid_argument("overrides: empty window [" +
                                  std::to_string(ov.window_start) + "," +
                                  std::to_string(ov.window_end) + ")");
    }
  }
}

bool ObjectiveReport::lex_less(const ObjectiveReport& o) const {
  if (n_uncovered != o.n_uncovered) return n_uncovered < o.n_uncovered;
  if (n_used != o.n_used) return n_used < o.n_used;
  return deadhead_total < o.deadhead_total;
}

bool ObjectiveReport::lex_less_equal(const ObjectiveReport& o) const {
  return !o.lex_less(*this);
}

CombinedTimetable merge_timetables(const ProblemInstance& instance) {
  CombinedTimetable combined;
  for (const auto& tt : instance.timetables) {
    const BusLine& line = instance.line_departing_from(tt.cp_id);
    for (Minute m : tt.departures) {
      combined.entries.push_back({m, line.id, tt.cp_id});
    }
  }
  std::sort(combined.entries.begin(), combined.entries.end(),
            [](const CombinedEntry& a, const CombinedEntry& b) {
              return std::tie(a.minute, a.cp_id, a.line_id) <
                     std::tie(b.minute, b.cp_id, b.line_id);
            });
  return combined;
}

Minute effective_travel_time(const ProblemInstance& instance, int line_id,
                             Minute depart_minute) {
  const BusLine& line = instance.line(line_id);
  Minute t = line.base_travel_time;
  for (const auto& ov : instance.overrides) {
    if (ov.line_id >= 0 && ov.line_id != line_id) continue;
    if (depart_minute >= ov.window_start && depart_minute < ov.window_end) {
      t += ov.extra_minutes;
    }
  }
  return t;
}

namespace {

std::string mins(Minute m) { return std::to_string(m); }

}  // namespace

std::vector<Violation> validate_schedule(const ProblemInstance& instance,
                                         const Schedule& schedule) {
  std::vector<Violation> out;
  const CombinedTimetable combined = merge_timetables(instance);

  // Trip arithmetic and per-bus grouping.
  std::map<int, std::vector<const TripRecord*>> by_bus;
  for (const auto& trip : schedule.trips) {
    if (trip.arrive <= trip.depart) {
      out.push_back({0, trip.bus_id,
                     "trip departing " + mins(trip.depart) +
                         " arrives no later than it departs"});
      continue;
    }
    if (trip.kind == TripKind::Service) {
      const Minute tt = effective_travel_time(instance, trip.line_id, trip.depart);
      if (trip.arrive - trip.depart != tt) {
        out.push_back({0, trip.bus_id,
                       "service trip at " + mins(trip.depart) + " lasts " +
                           mins(trip.arrive - trip.depart) + ", expected " +
                           mins(tt)});
      }
      const BusLine& line = instance.line(trip.line_id);
      if (line.departure_cp != trip.from_cp || line.terminal_cp != trip.to_cp) {
        out.push_back({0, trip.bus_id,
                       "service trip at " + mins(trip.depart) +
                           " does not follow line " + std::to_string(trip.line_id)});
      }
    } else {
      const Minute k = instance.deadhead_matrix.at(trip.from_cp, trip.to_cp);
      if (trip.arrive - trip.depart != k) {
        out.push_back({0, trip.bus_id,
                       "deadhead at " + mins(trip.depart) + " lasts " +
                           mins(trip.arrive - trip.depart) + ", expected " +
                           mins(k)});
      }
    }
    by_bus[trip.bus_id].push_back(&trip);
  }

  for (auto& [bus_id, trips] : by_bus) {
    std::sort(trips.begin(), trips.end(),
              [](const TripRecord* a, const TripRecord* b) {
                return std::tie(a->depart, a->arrive) <
                       std::tie(b->depart, b->arrive);
              });
    // Arrival of the most recent *service* trip; deadheads between services
    // are judged against it (constraint 3).
    std::optional<Minute> last_service_arrival;
    Minute pending_deadhead = 0;
    for (std::size_t i = 0; i < trips.size(); ++i) {
      const TripRecord& cur = *trips[i];
      if (i > 0) {
        const TripRecord& prev = *trips[i - 1];
        if (cur.depart < prev.arrive) {
          out.push_back({1, bus_id,
                         "trip departing " + mins(cur.depart) +
                             " overlaps trip arriving " + mins(prev.arrive)});
        }
        if (prev.to_cp != cur.from_cp) {
          out.push_back({0, bus_id,
                         "trip departing " + mins(cur.depart) + " starts at cp " +
                             std::to_string(cur.from_cp) + " but bus was at cp " +
                             std::to_string(prev.to_cp)});
        }
      }
      if (cur.kind == TripKind::Deadhead) {
        pending_deadhead += cur.arrive - cur.depart;
        continue;
      }
      if (last_service_arrival) {
        const Minute gap = cur.depart - *last_service_arrival;
        if (pending_deadhead == 0) {
          if (gap < instance.r_min) {
            out.push_back({2, bus_id,
                           "rest of " + mins(gap) + " before departure " +
                               mins(cur.depart) + " is below r_min " +
                               mins(instance.r_min)});
          }
        } else {
          if (instance.r_min + pending_deadhead > gap) {
            out.push_back({3, bus_id,
                           "r_min + deadhead (" +
                               mins(instance.r_min + pending_deadhead) +
                               ") exceeds gap " + mins(gap) +
                               " before departure " + mins(cur.depart)});
          }
        }
      }
      last_service_arrival = cur.arrive;
      pending_deadhead = 0;
    }
  }

  // Coverage cross-check: a covered entry's bus must run that exact trip.
  for (std::size_t i = 0; i < schedule.covered_by.size(); ++i) {
    const int bus = schedule.covered_by[i];
    if (bus < 0) continue;
    if (i >= combined.size()) {
      out.push_back({0, bus, "covered_by longer than the combined timetable"});
      break;
    }
    const CombinedEntry& e = combined.entries[i];
    bool found = false;
    for (const TripRecord* t : by_bus[bus]) {
      if (t->kind == TripKind::Service && t->depart == e.minute &&
          t->from_cp == e.cp_id && t->line_id == e.line_id) {
        found = true;
        break;
      }
    }
    if (!found) {
      out.push_back({4, bus,
                     "entry " + std::to_string(i) + " (minute " + mins(e.minute) +
                         ", cp " + std::to_string(e.cp_id) +
                         ") marked covered but bus has no matching trip"});
    }
  }
  return out;
}

ObjectiveReport compute_objectives(const ProblemInstance& instance,
                                   const Schedule& schedule) {
  ObjectiveReport report;
  std::set<int> used;
  for (const auto& trip : schedule.trips) {
    if (trip.kind == TripKind::Service) {
      used.insert(trip.bus_id);
    } else {
      report.deadhead_total += trip.arrive - trip.depart;
    }
  }
  report.n_used = static_cast<int>(used.size());
  const int total = instance.total_departures();
  int covered = 0;
  for (int bus : schedule.covered_by) {
    if (bus >= 0) ++covered;
  }
  report.n_uncovered = total - covered;
  return report;
}

}  // namespace mlbs
