// Copyright 2026 The socnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

#include "socnav/cli.hpp"

namespace socnav::cli {

namespace {

constexpr double kPixelsPerMeter = 40.0;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string optional_num(const std::optional<double>& v, const char* format) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, format, *v);
  return buf;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

// Linear blend from blue at the start of the episode to red at the end.
std::string time_color(double f) {
  f = std::clamp(f, 0.0, 1.0);
  const auto mix = [f](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * f)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", mix(33, 178), mix(102, 24), mix(172, 43));
  return buf;
}

const char* class_color(encounters::EncounterClass c) {
  switch (c) {
    case encounters::EncounterClass::FrontalApproach: return "#e41a1c";
    case encounters::EncounterClass::Intersection: return "#377eb8";
    case encounters::EncounterClass::BlindCorner: return "#984ea3";
    case encounters::EncounterClass::PersonFollowing: return "#4daf4a";
    case encounters::EncounterClass::Other: return "#ff7f00";
  }
  return "#000000";
}

class Canvas {
 public:
  explicit Canvas(const world::OccupancyGrid& g) : height_m_(g.height() * g.resolution()) {}
  std::string x(double v) const { return num(v * kPixelsPerMeter); }
  std::string y(double v) const { return num((height_m_ - v) * kPixelsPerMeter); }
  std::string len(double v) const { return num(v * kPixelsPerMeter); }
  std::string point(Vec2 p) const { return x(p.x) + "," + y(p.y); }

 private:
  double height_m_;
};

}  // namespace

std::string format_table(const navmetrics::Summary& s, const encounters::EncounterReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "navigation: %d run(s), %d episode(s)\n", s.n_runs, s.n_episodes);
  os << line;
  const auto row = [&](const char* name, const navmetrics::MeanStd& m) {
    std::snprintf(line, sizeof line, "  %-14s %8.2f +- %.2f\n", name, m.mean, m.std);
    os << line;
  };
  row("success %", s.success_pct);
  row("spl %", s.spl_pct);
  row("h-collision %", s.h_collision_pct);
  row("timeout %", s.timeout_pct);
  os << '\n';
  std::snprintf(line, sizeof line, "%-16s %6s %8s %8s %8s %8s\n", "class", "count", "collided", "ESR %",
                "ALV m/s", "AD m");
  os << line;
  const auto stats_row = [&](std::string_view name, const encounters::ClassStats& c) {
    std::snprintf(line, sizeof line, "%-16.*s %6d %8d %8s %8s %8s\n", static_cast<int>(name.size()),
                  name.data(), c.count, c.collided, optional_num(c.esr, "%.2f").c_str(),
                  optional_num(c.alv, "%.3f").c_str(), optional_num(c.ad, "%.3f").c_str());
    os << line;
  };
  for (encounters::EncounterClass c : encounters::kAllClasses) stats_row(to_string(c), report.stats(c));
  stats_row("all", report.overall);
  return os.str();
}

std::string render_svg(const world::OccupancyGrid& grid, const sim::TrajectoryLog* log,
                       const std::vector<encounters::Encounter>& found, const std::string& metadata) {
  const Canvas cv(grid);
  const double w_m = grid.width() * grid.resolution();
  const double h_m = grid.height() * grid.resolution();
  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cv.len(w_m) << "\" height=\""
     << cv.len(h_m) << "\" viewBox=\"0 0 " << cv.len(w_m) << ' ' << cv.len(h_m) << "\">\n";
  os << "<metadata>" << xml_escape(metadata) << "</metadata>\n";
  os << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << cv.len(w_m) << "\" height=\""
     << cv.len(h_m) << "\" fill=\"#ffffff\"/>\n";

  // Occupied cells, merged into horizontal runs.
  const double res = grid.resolution();
  os << "<g class=\"map\" fill=\"#3a3a3a\">\n";
  for (int cy = 0; cy < grid.height(); ++cy) {
    int cx = 0;
    while (cx < grid.width()) {
      if (grid.free({cx, cy})) {
        ++cx;
        continue;
      }
      const int start = cx;
      while (cx < grid.width() && grid.occupied({cx, cy})) ++cx;
      os << "<rect x=\"" << cv.x(start * res) << "\" y=\"" << cv.y((cy + 1) * res) << "\" width=\""
         << cv.len((cx - start) * res) << "\" height=\"" << cv.len(res) << "\"/>\n";
    }
  }
  os << "</g>\n";

  if (log != nullptr) {
    const auto& recs = log->records;
    const double agent_r = log->config.physics.agent_radius;
    const double t_last = std::max(1, log->t_end);

    os << "<g class=\"encounters\" fill=\"none\" stroke-linecap=\"round\" stroke-opacity=\"0.35\">\n";
    for (const auto& e : found) {
      os << "<polyline class=\"encounter\" data-class=\"" << to_string(e.clazz) << "\" data-pedestrian=\""
         << e.pedestrian << "\" data-t1=\"" << e.t1 << "\" data-t2=\"" << e.t2 << "\" stroke=\""
         << class_color(e.clazz) << "\" stroke-width=\"" << cv.len(4 * agent_r) << "\" points=\"";
      for (int t = e.t1; t <= e.t2; ++t) {
        if (t > e.t1) os << ' ';
        os << cv.point(recs[static_cast<std::size_t>(t)].agent.position());
      }
      os << "\"/>\n";
    }
    os << "</g>\n";

    const std::size_t peds = recs.empty() ? 0 : recs.front().pedestrians.size();
    os << "<g class=\"pedestrians\" fill=\"none\" stroke=\"#8c8c8c\" stroke-width=\"1.5\">\n";
    for (std::size_t i = 0; i < peds; ++i) {
      os << "<polyline class=\"pedestrian\" data-id=\"" << i << "\" points=\"";
      for (std::size_t t = 0; t < recs.size(); ++t) {
        if (t > 0) os << ' ';
        os << cv.point(recs[t].pedestrians[i].position());
      }
      os << "\"/>\n";
    }
    os << "</g>\n";

    os << "<g class=\"agent\" stroke-width=\"2\">\n";
    for (std::size_t t = 1; t < recs.size(); ++t) {
      const Vec2 a = recs[t - 1].agent.position();
      const Vec2 b = recs[t].agent.position();
      os << "<line x1=\"" << cv.x(a.x) << "\" y1=\"" << cv.y(a.y) << "\" x2=\"" << cv.x(b.x) << "\" y2=\""
         << cv.y(b.y) << "\" stroke=\"" << time_color(static_cast<double>(t) / t_last) << "\"/>\n";
    }
    for (const auto& r : recs) {
      const Vec2 p = r.agent.position();
      os << "<circle class=\"agent-pose\" data-t=\"" << r.t << "\" cx=\"" << cv.x(p.x) << "\" cy=\""
         << cv.y(p.y) << "\" r=\"1.5\" fill=\"" << time_color(r.t / t_last) << "\"/>\n";
    }
    os << "</g>\n";

    const Vec2 s = log->episode.agent_start.position();
    const Vec2 g = log->episode.goal;
    os << "<circle class=\"start\" cx=\"" << cv.x(s.x) << "\" cy=\"" << cv.y(s.y) << "\" r=\""
       << cv.len(agent_r) << "\" fill=\"none\" stroke=\"#2166ac\" stroke-width=\"2\"/>\n";
    os << "<circle class=\"goal\" cx=\"" << cv.x(g.x) << "\" cy=\"" << cv.y(g.y) << "\" r=\""
       << cv.len(log->config.physics.goal_radius) << "\" fill=\"#1b7837\" fill-opacity=\"0.4\" "
       << "stroke=\"#1b7837\" stroke-width=\"2\"/>\n";
    os << "<text class=\"status\" x=\"4\" y=\"14\" font-family=\"monospace\" font-size=\"12\">"
       << to_string(log->status) << " t_end=" << log->t_end << " encounters=" << found.size()
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace socnav::cli
