#include "mlbs/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace mlbs {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::invalid_argument("instance: " + path + ": " + what);
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "/" + key, "missing");
  return *it;
}

int require_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

}  // namespace

ProblemInstance parse_instance(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("instance: not valid JSON: ") +
                                e.what());
  }
  ProblemInstance inst;

  const json& cps = require(j, "control_points", "");
  if (!cps.is_array()) fail("/control_points", "expected an array");
  for (std::size_t i = 0; i < cps.size(); ++i) {
    const std::string p = "/control_points/" + std::to_string(i);
    ControlPoint cp;
    cp.id = require_int(require(cps[i], "id", p), p + "/id");
    cp.initial_bus_count =
        require_int(require(cps[i], "initial_bus_count", p), p + "/initial_bus_count");
    inst.control_points.push_back(cp);
  }

  const json& lines = require(j, "lines", "");
  if (!lines.is_array()) fail("/lines", "expected an array");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string p = "/lines/" + std::to_string(i);
    BusLine l;
    l.id = require_int(require(lines[i], "id", p), p + "/id");
    l.departure_cp = require_int(require(lines[i], "departure_cp", p), p + "/departure_cp");
    l.terminal_cp = require_int(require(lines[i], "terminal_cp", p), p + "/terminal_cp");
    l.base_travel_time =
        require_int(require(lines[i], "base_travel_time", p), p + "/base_travel_time");
    inst.lines.push_back(l);
  }

  const json& tts = require(j, "timetables", "");
  if (!tts.is_array()) fail("/timetables", "expected an array");
  for (std::size_t i = 0; i < tts.size(); ++i) {
    const std::string p = "/timetables/" + std::to_string(i);
    Timetable tt;
    tt.cp_id = require_int(require(tts[i], "cp_id", p), p + "/cp_id");
    const json& deps = require(tts[i], "departures", p);
    if (!deps.is_array()) fail(p + "/departures", "expected an array");
    for (std::size_t k = 0; k < deps.size(); ++k) {
      tt.departures.push_back(
          require_int(deps[k], p + "/departures/" + std::to_string(k)));
    }
    inst.timetables.push_back(std::move(tt));
  }

  const json& dm = require(j, "deadhead_matrix", "");
  const json& dm_cps = require(dm, "cp_ids", "/deadhead_matrix");
  const json& dm_cells = require(dm, "minutes", "/deadhead_matrix");
  if (!dm_cps.is_array()) fail("/deadhead_matrix/cp_ids", "expected an array");
  if (!dm_cells.is_array()) fail("/deadhead_matrix/minutes", "expected an array");
  std::vector<int> cp_ids;
  for (std::size_t i = 0; i < dm_cps.size(); ++i) {
    cp_ids.push_back(require_int(dm_cps[i], "/deadhead_matrix/cp_ids/" + std::to_string(i)));
  }
  std::vector<Minute> cells;
  for (std::size_t i = 0; i < dm_cells.size(); ++i) {
    const json& row = dm_cells[i];
    const std::string p = "/deadhead_matrix/minutes/" + std::to_string(i);
    if (!row.is_array()) fail(p, "expected an array (matrix row)");
    for (std::size_t k = 0; k < row.size(); ++k) {
      cells.push_back(require_int(row[k], p + "/" + std::to_string(k)));
    }
  }
  try {
    inst.deadhead_matrix = DeadheadMatrix(std::move(cp_ids), std::move(cells));
  } catch (const std::invalid_argument& e) {
    fail("/deadhead_matrix", e.what());
  }

  inst.r_min = require_int(require(j, "r_min", ""), "/r_min");
  inst.fleet_size = require_int(require(j, "fleet_size", ""), "/fleet_size");
  inst.target_set_capacity =
      require_int(require(j, "target_set_capacity", ""), "/target_set_capacity");

  if (j.contains("overrides")) {
    const json& ovs = j["overrides"];
    if (!ovs.is_array()) fail("/overrides", "expected an array");
    for (std::size_t i = 0; i < ovs.size(); ++i) {
      const std::string p = "/overrides/" + std::to_string(i);
      TravelTimeOverride ov;
      ov.line_id = ovs[i].contains("line_id")
                       ? require_int(ovs[i]["line_id"], p + "/line_id")
                       : -1;
      ov.window_start = require_int(require(ovs[i], "window_start", p), p + "/window_start");
      ov.window_end = require_int(require(ovs[i], "window_end", p), p + "/window_end");
      ov.extra_minutes = require_int(require(ovs[i], "extra_minutes", p), p + "/extra_minutes");
      inst.overrides.push_back(ov);
    }
  }

  try {
    check_instance(inst);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  return inst;
}

std::string instance_to_json(const ProblemInstance& inst) {
  json j;
  j["control_points"] = json::array();
  for (const auto& cp : inst.control_points) {
    j["control_points"].push_back(
        {{"id", cp.id}, {"initial_bus_count", cp.initial_bus_count}});
  }
  j["lines"] = json::array();
  for (const auto& l : inst.lines) {
    j["lines"].push_back({{"id", l.id},
                          {"departure_cp", l.departure_cp},
                          {"terminal_cp", l.terminal_cp},
                          {"base_travel_time", l.base_travel_time}});
  }
  j["timetables"] = json::array();
  for (const auto& tt : inst.timetables) {
    j["timetables"].push_back({{"cp_id", tt.cp_id}, {"departures", tt.departures}});
  }
  const auto& ids = inst.deadhead_matrix.cp_ids();
  json rows = json::array();
  for (int from : ids) {
    json row = json::array();
    for (int to : ids) row.push_back(inst.deadhead_matrix.at(from, to));
    rows.push_back(std::move(row));
  }
  j["deadhead_matrix"] = {{"cp_ids", ids}, {"minutes", rows}};
  j["r_min"] = inst.r_min;
  j["fleet_size"] = inst.fleet_size;
  j["target_set_capacity"] = inst.target_set_capacity;
  j["overrides"] = json::array();
  for (const auto& ov : inst.overrides) {
    j["overrides"].push_back({{"line_id", ov.line_id},
                              {"window_start", ov.window_start},
                              {"window_end", ov.window_end},
                              {"extra_minutes", ov.extra_minutes}});
  }
  return j.dump(2) + "\n";
}

ProblemInstance load_instance(const std::string& path) {
  return parse_instance(read_file(path));
}

void save_instance(const ProblemInstance& instance, const std::string& path) {
  atomic_write_file(path, instance_to_json(instance));
}

std::string schedule_to_json(const ProblemInstance& instance,
                             const Schedule& schedule) {
  json j;
  j["trips"] = json::array();
  for (const auto& t : schedule.trips) {
    j["trips"].push_back(
        {{"bus_id", t.bus_id},
         {"kind", t.kind == TripKind::Service ? "service" : "deadhead"},
         {"line_id", t.line_id},
         {"from_cp", t.from_cp},
         {"to_cp", t.to_cp},
         {"depart", t.depart},
         {"arrive", t.arrive}});
  }
  j["covered_by"] = schedule.covered_by;
  const ObjectiveReport report = compute_objectives(instance, schedule);
  j["objectives"] = {{"n_used", report.n_used},
                     {"deadhead_total", report.deadhead_total},
                     {"n_uncovered", report.n_uncovered}};
  return j.dump(2) + "\n";
}

Schedule parse_schedule(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("schedule: not valid JSON: ") + e.what());
  }
  Schedule s;
  if (!j.contains("trips") || !j["trips"].is_array()) {
    throw std::invalid_argument("schedule: /trips: missing or not an array");
  }
  for (std::size_t i = 0; i < j["trips"].size(); ++i) {
    const json& t = j["trips"][i];
    const std::string p = "/trips/" + std::to_string(i);
    TripRecord r;
    r.bus_id = require_int(require(t, "bus_id", p), p + "/bus_id");
    const std::string kind = require(t, "kind", p).get<std::string>();
    if (kind == "service") {
      r.kind = TripKind::Service;
    } else if (kind == "deadhead") {
      r.kind = TripKind::Deadhead;
    } else {
      fail(p + "/kind", "expected \"service\" or \"deadhead\"");
    }
    r.line_id = require_int(require(t, "line_id", p), p + "/line_id");
    r.from_cp = require_int(require(t, "from_cp", p), p + "/from_cp");
    r.to_cp = require_int(require(t, "to_cp", p), p + "/to_cp");
    r.depart = require_int(require(t, "depart", p), p + "/depart");
    r.arrive = require_int(require(t, "arrive", p), p + "/arrive");
    s.trips.push_back(r);
  }
  if (j.contains("covered_by")) {
    for (const auto& v : j["covered_by"]) s.covered_by.push_back(v.get<int>());
  }
  return s;
}

std::vector<TravelTimeOverride> parse_overrides(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("overrides: not valid JSON: ") + e.what());
  }
  const json& ovs = j.is_array() ? j : require(j, "overrides", "");
  if (!ovs.is_array()) fail("/overrides", "expected an array");
  std::vector<TravelTimeOverride> out;
  for (std::size_t i = 0; i < ovs.size(); ++i) {
    const std::string p = "/overrides/" + std::to_string(i);
    TravelTimeOverride ov;
    ov.line_id = ovs[i].contains("line_id")
                     ? require_int(ovs[i]["line_id"], p + "/line_id")
                     : -1;
    ov.window_start = require_int(require(ovs[i], "window_start", p), p + "/window_start");
    ov.window_end = require_int(require(ovs[i], "window_end", p), p + "/window_end");
    ov.extra_minutes = require_int(require(ovs[i], "extra_minutes", p), p + "/extra_minutes");
    out.push_back(ov);
  }
  return out;
}

std::vector<TravelTimeOverride> load_overrides(const std::string& path) {
  return parse_overrides(read_file(path));
}

Schedule load_schedule(const std::string& path) {
  return parse_schedule(read_file(path));
}

void save_schedule(const ProblemInstance& instance, const Schedule& schedule,
                   const std::string& path) {
  atomic_write_file(path, schedule_to_json(instance, schedule));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void atomic_write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << contents;
    if (!out.good()) throw std::runtime_error("write failed for " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw std::runtime_error("rename failed for " + path);
  }
}

}  // namespace mlbs
