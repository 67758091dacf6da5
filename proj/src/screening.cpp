#include "mlbs/screening.hpp"

#include <algorithm>

namespace mlbs {

std::vector<CpFeatures> cp_features(const std::vector<BusStatus>& buses,
                                    const ProblemInstance& instance,
                                    const CombinedTimetable& combined,
                                    Minute now) {
  std::vector<CpFeatures> out;
  out.reserve(instance.control_points.size());
  for (const auto& cp : instance.control_points) {
    CpFeatures f;
    f.cp_id = cp.id;
    for (const auto& e : combined.entries) {
      if (e.cp_id != cp.id || e.minute < now) continue;
      ++f.n_long;
      if (e.minute < now + kShortTermWindow) ++f.n_short;
    }
    for (const auto& b : buses) {
      if (b.location != cp.id) continue;
      if (b.rest(now) >= instance.r_min) {
        ++f.n_avail;
        if (b.used) ++f.n_used;
      }
    }
    out.push_back(f);
  }
  return out;
}

void classify_buses(const std::vector<BusStatus>& buses,
                    const ProblemInstance& instance,
                    const CombinedEntry& current_entry, Minute now, Mode mode,
                    std::vector<int>* v_p_raw, std::vector<int>* v_q_raw) {
  v_p_raw->clear();
  v_q_raw->clear();
  for (const auto& b : buses) {
    if (b.location == kRunning) continue;
    const Minute rest = b.rest(now);
    if (b.location == current_entry.cp_id) {
      if (rest >= instance.r_min) v_p_raw->push_back(b.bus_id);
    } else if (mode == Mode::Offline) {
      const Minute k = instance.deadhead_matrix.at(b.location, current_entry.cp_id);
      if (k > 0 && rest > k + instance.r_min) v_q_raw->push_back(b.bus_id);
    }
  }
}

ScreeningResult build_target_set(const std::vector<BusStatus>& buses,
                                 const ProblemInstance& instance,
                                 const CombinedEntry& current_entry, Minute now,
                                 const std::vector<int>& v_p_raw,
                                 const std::vector<int>& v_q_raw, int n_s) {
  auto status_of = [&](int bus_id) -> const BusStatus& {
    for (const auto& b : buses) {
      if (b.bus_id == bus_id) return b;
    }
    throw std::invalid_argument("unknown bus id " + std::to_string(bus_id));
  };

  std::vector<int> used_p, unused_p, used_q, unused_q;
  for (int id : v_p_raw) (status_of(id).used ? used_p : unused_p).push_back(id);
  for (int id : v_q_raw) (status_of(id).used ? used_q : unused_q).push_back(id);

  std::sort(used_p.begin(), used_p.end(), [&](int a, int b) {
    const Minute ra = status_of(a).rest(now);
    const Minute rb = status_of(b).rest(now);
    if (ra != rb) return ra > rb;  // longest rest first
    return a < b;
  });
  std::sort(used_q.begin(), used_q.end(), [&](int a, int b) {
    const Minute ka =
        instance.deadhead_matrix.at(status_of(a).location, current_entry.cp_id);
    const Minute kb =
        instance.deadhead_matrix.at(status_of(b).location, current_entry.cp_id);
    if (ka != kb) return ka < kb;  // shortest deadhead first
    return a < b;
  });
  std::sort(unused_p.begin(), unused_p.end());
  std::sort(unused_q.begin(), unused_q.end());

  ScreeningResult result;
  result.v_p = used_p;
  result.v_p.insert(result.v_p.end(), unused_p.begin(), unused_p.end());
  result.v_q = used_q;
  result.v_q.insert(result.v_q.end(), unused_q.begin(), unused_q.end());

  for (const auto* group : {&used_p, &used_q, &unused_p, &unused_q}) {
    for (int id : *group) {
      if (static_cast<int>(result.target_set.size()) >= n_s) break;
      result.target_set.push_back(id);
    }
  }
  result.padding_count = n_s - static_cast<int>(result.target_set.size());
  result.target_set.resize(static_cast<std::size_t>(n_s), kSentinel);
  return result;
}

int state_dimension(int n_cps, int n_s) { return 5 * n_cps + 3 + 4 * n_s; }

namespace {

void append_cp_and_line_blocks(StateVector& s,
                               const std::vector<CpFeatures>& cps,
                               const ProblemInstance& instance,
                               const CombinedEntry& current_entry, Minute now) {
  (void)now;
  for (const auto& f : cps) {
    s.push_back(static_cast<double>(f.cp_id));
    s.push_back(static_cast<double>(f.n_long));
    s.push_back(static_cast<double>(f.n_short));
    s.push_back(static_cast<double>(f.n_avail));
    s.push_back(static_cast<double>(f.n_used));
  }
  const BusLine& line = instance.line(current_entry.line_id);
  s.push_back(static_cast<double>(line.departure_cp));
  s.push_back(static_cast<double>(line.terminal_cp));
  s.push_back(line.base_travel_time * kTimeScale);
}

void append_bus_features(StateVector& s, const BusStatus& b,
                         const ProblemInstance& instance,
                         const CombinedEntry& current_entry, Minute now) {
  s.push_back(b.used ? 1.0 : 0.0);
  if (b.location == kRunning) {
    s.push_back(0.0);
    s.push_back(-1.0);
    s.push_back(-1.0);
    return;
  }
  s.push_back(b.rest(now) * kTimeScale);
  s.push_back(static_cast<double>(b.location));
  const Minute k = b.location == current_entry.cp_id
                       ? 0
                       : instance.deadhead_matrix.at(b.location, current_entry.cp_id);
  s.push_back(k * kTimeScale);
}

}  // namespace

StateVector build_state(const std::vector<BusStatus>& buses,
                        const ProblemInstance& instance,
                        const std::vector<CpFeatures>& cps,
                        const CombinedEntry& current_entry, Minute now,
                        const ScreeningResult& screening) {
  StateVector s;
  s.reserve(state_dimension(static_cast<int>(cps.size()),
                            static_cast<int>(screening.target_set.size())));
  append_cp_and_line_blocks(s, cps, instance, current_entry, now);
  for (int id : screening.target_set) {
    if (id == kSentinel) {
      s.insert(s.end(), {-1.0, -1.0, -1.0, -1.0});
      continue;
    }
    auto it = std::find_if(buses.begin(), buses.end(),
                           [&](const BusStatus& b) { return b.bus_id == id; });
    append_bus_features(s, *it, instance, current_entry, now);
  }
  return s;
}

StateVector build_state_unscreened(const std::vector<BusStatus>& buses,
                                   const ProblemInstance& instance,
                                   const std::vector<CpFeatures>& cps,
                                   const CombinedEntry& current_entry,
                                   Minute now) {
  StateVector s;
  append_cp_and_line_blocks(s, cps, instance, current_entry, now);
  for (const auto& b : buses) {
    append_bus_features(s, b, instance, current_entry, now);
  }
  return s;
}

}  // namespace mlbs
