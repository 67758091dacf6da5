#include "mlbs/gantt.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <vector>

#include "mlbs/instance_io.hpp"

namespace mlbs {

namespace {

constexpr int kRowHeight = 22;
constexpr int kRowGap = 6;
constexpr int kMarginLeft = 70;
constexpr int kMarginTop = 40;
constexpr int kLegendHeight = 30;
constexpr double kPxPerMinute = 1.2;

std::string line_color(std::size_t index, std::size_t count) {
  const double hue = 360.0 * static_cast<double>(index) /
                     static_cast<double>(std::max<std::size_t>(count, 1));
  std::ostringstream ss;
  ss << "hsl(" << static_cast<int>(hue) << ",70%,55%)";
  return ss.str();
}

}  // namespace

std::string render_gantt(const Schedule& schedule, const ProblemInstance& instance) {
  for (const auto& t : schedule.trips) {
    if (t.kind == TripKind::Service && !instance.find_line(t.line_id)) {
      throw std::invalid_argument("render_gantt: schedule references line " +
                                  std::to_string(t.line_id) +
                                  " missing from the instance");
    }
  }

  std::map<int, std::vector<const TripRecord*>> by_bus;
  Minute t_min = kDayMinutes, t_max = 0;
  for (const auto& t : schedule.trips) {
    by_bus[t.bus_id].push_back(&t);
    t_min = std::min(t_min, t.depart);
    t_max = std::max(t_max, t.arrive);
  }
  if (by_bus.empty()) {
    t_min = 0;
    t_max = 60;
  }
  const Minute t0 = (t_min / 60) * 60;
  const Minute t1 = ((t_max + 59) / 60) * 60;

  std::map<int, std::string> colors;
  for (std::size_t i = 0; i < instance.lines.size(); ++i) {
    colors[instance.lines[i].id] = line_color(i, instance.lines.size());
  }

  const int width =
      kMarginLeft + static_cast<int>((t1 - t0) * kPxPerMinute) + 30;
  const int height = kMarginTop +
                     static_cast<int>(by_bus.size()) * (kRowHeight + kRowGap) +
                     kLegendHeight + 30;
  auto x_of = [&](Minute m) {
    return kMarginLeft + (m - t0) * kPxPerMinute;
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" "
         "patternTransform=\"rotate(45)\" patternUnits=\"userSpaceOnUse\">"
         "<rect width=\"6\" height=\"6\" fill=\"#dddddd\"/>"
         "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#555555\" "
         "stroke-width=\"2\"/></pattern></defs>\n";

  // Hour ticks.
  for (Minute m = t0; m <= t1; m += 60) {
    const double x = x_of(m);
    svg << "<line x1=\"" << x << "\" y1=\"" << kMarginTop - 8 << "\" x2=\"" << x
        << "\" y2=\"" << height - kLegendHeight - 20 << "\" stroke=\"#cccccc\"/>\n";
    svg << "<text x=\"" << x << "\" y=\"" << kMarginTop - 14
        << "\" font-size=\"10\" text-anchor=\"middle\">" << (m / 60) << ":"
        << (m % 60 < 10 ? "0" : "") << (m % 60) << "</text>\n";
  }

  int row = 0;
  for (const auto& [bus_id, trips] : by_bus) {
    const int y = kMarginTop + row * (kRowHeight + kRowGap);
    svg << "<text x=\"8\" y=\"" << y + kRowHeight - 6
        << "\" font-size=\"11\">bus " << bus_id << "</text>\n";
    for (const TripRecord* t : trips) {
      const double x = x_of(t->depart);
      const double w = (t->arrive - t->depart) * kPxPerMinute;
      const std::string fill = t->kind == TripKind::Deadhead
                                   ? std::string("url(#hatch)")
                                   : colors[t->line_id];
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
          << "\" height=\"" << kRowHeight << "\" fill=\"" << fill
          << "\" stroke=\"#333333\"/>\n";
    }
    ++row;
  }

  // Legend.
  double lx = kMarginLeft;
  const int ly = height - kLegendHeight - 5;
  for (const auto& l : instance.lines) {
    svg << "<rect x=\"" << lx << "\" y=\"" << ly
        << "\" width=\"14\" height=\"14\" fill=\"" << colors[l.id]
        << "\" stroke=\"#333333\"/>\n";
    svg << "<text x=\"" << lx + 18 << "\" y=\"" << ly + 11
        << "\" font-size=\"11\">line " << l.id << "</text>\n";
    lx += 80;
  }
  svg << "<rect x=\"" << lx << "\" y=\"" << ly
      << "\" width=\"14\" height=\"14\" fill=\"url(#hatch)\" stroke=\"#333333\"/>\n";
  svg << "<text x=\"" << lx + 18 << "\" y=\"" << ly + 11
      << "\" font-size=\"11\">deadhead</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

void render_gantt_file(const Schedule& schedule, const ProblemInstance& instance,
                       const std::string& path) {
  atomic_write_file(path, render_gantt(schedule, instance));
}

}  // namespace mlbs
