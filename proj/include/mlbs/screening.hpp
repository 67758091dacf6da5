#pragma once

#include <vector>

#include "mlbs/model.hpp"

namespace mlbs {

enum class Mode { Offline, Online };

constexpr int kRunning = -1;   // "location" of a bus that is mid-trip
constexpr int kSentinel = -1;  // empty target-set slot

struct BusStatus {
  int bus_id = 0;
  bool used = false;       // w_s^v
  int location = kRunning;  // cp id, or kRunning while mid-trip
  Minute last_arrival = 0;  // minute the bus finished its last trip/deadhead

  Minute rest(Minute now) const {
    return location == kRunning ? 0 : std::max(0, now - last_arrival);
  }
};

struct ScreeningResult {
  std::vector<int> v_p;        // eligible without deadhead, priority order
  std::vector<int> v_q;        // eligible with deadhead (offline only)
  std::vector<int> target_set;  // exactly N_s slots, kSentinel-padded
  int padding_count = 0;
};

struct CpFeatures {
  int cp_id = 0;
  int n_long = 0;   // n_l^c: departures from now to day end
  int n_short = 0;  // n_s^c: departures in [now, now + 300)
  int n_avail = 0;  // n_a^c: parked, rested buses
  int n_used = 0;   // n_o^c: used among n_avail
};

using StateVector = std::vector<double>;

constexpr Minute kShortTermWindow = 300;
constexpr double kTimeScale = 1.0 / 1440.0;

std::vector<CpFeatures> cp_features(const std::vector<BusStatus>& buses,
                                    const ProblemInstance& instance,
                                    const CombinedTimetable& combined,
                                    Minute now);

// Raw eligibility split. v_p: parked at the departure CP with rest >= r_min.
// v_q (offline only): parked elsewhere with rest > deadhead + r_min.
void classify_buses(const std::vector<BusStatus>& buses,
                    const ProblemInstance& instance,
                    const CombinedEntry& current_entry, Minute now, Mode mode,
                    std::vector<int>* v_p_raw, std::vector<int>* v_q_raw);

// Priority order: used v_p by descending rest, used v_q by ascending deadhead,
// then unused v_p, unused v_q by bus id; truncated/padded to n_s slots.
ScreeningResult build_target_set(const std::vector<BusStatus>& buses,
                                 const ProblemInstance& instance,
                                 const CombinedEntry& current_entry, Minute now,
                                 const std::vector<int>& v_p_raw,
                                 const std::vector<int>& v_q_raw, int n_s);

// CP block (5 per CP) + line block (3) + bus block (4 per target-set slot).
// Time-valued features are scaled by 1/1440; sentinel slots are all -1.
StateVector build_state(const std::vector<BusStatus>& buses,
                        const ProblemInstance& instance,
                        const std::vector<CpFeatures>& cps,
                        const CombinedEntry& current_entry, Minute now,
                        const ScreeningResult& screening);

// Screening-off ablation: the bus block covers the whole fleet in id order.
StateVector build_state_unscreened(const std::vector<BusStatus>& buses,
                                   const ProblemInstance& instance,
                                   const std::vector<CpFeatures>& cps,
                                   const CombinedEntry& current_entry,
                                   Minute now);

int state_dimension(int n_cps, int n_s);

}  // namespace mlbs
