#include "etbc/svg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace etbc {

Figure parse_figure(const std::string& name) {
  if (name == "states") return Figure::states;
  if (name == "etm") return Figure::etm;
  if (name == "estimates") return Figure::estimates;
  if (name == "input") return Figure::input;
  if (name == "dwell") return Figure::dwell;
  throw std::invalid_argument("unknown figure '" + name + "' (states, etm, estimates, input, dwell)");
}

namespace {

std::vector<double> event_times(const TrajectoryLog& events) {
  std::vector<double> t;
  for (const auto& ev : events.events) t.push_back(ev.t);
  return t;
}

Chart states_chart(const std::vector<TrajectoryRow>& rows) {
  Chart c;
  c.title = "Plant states";
  c.y_label = "value";
  Series zeta{"zeta(t)", {}, {}, "#1f77b4"};
  Series norm{"||u(t)||", {}, {}, "#d62728"};
  for (const auto& r : rows) {
    zeta.x.push_back(r.t);
    zeta.y.push_back(r.zeta);
    norm.x.push_back(r.t);
    norm.y.push_back(r.u_norm);
  }
  c.series = {zeta, norm};
  return c;
}

// Rows hold d^2 after the reset; events.json holds the value that fired. The
// curve visits both at each event time so it touches the threshold there.
Chart etm_chart(const std::vector<TrajectoryRow>& rows, const TrajectoryLog& events) {
  Chart c;
  c.title = "Trigger condition";
  c.y_label = "(.)^0.2";
  Series d{"(d^2)^0.2", {}, {}, "#d62728"};
  Series th{"(-xi m)^0.2", {}, {}, "#1f77b4"};
  std::size_t next = 0;
  for (const auto& r : rows) {
    while (next < events.events.size() && events.events[next].t < r.t - 1e-12) ++next;
    if (next < events.events.size() && std::abs(events.events[next].t - r.t) <= 1e-12) {
      d.x.push_back(r.t);
      d.y.push_back(std::pow(events.events[next].d2_pre, 0.2));
      ++next;
    }
    d.x.push_back(r.t);
    d.y.push_back(std::pow(r.d2, 0.2));
    th.x.push_back(r.t);
    th.y.push_back(std::pow(r.xi_m, 0.2));
  }
  c.series = {th, d};
  c.vlines = event_times(events);
  return c;
}

Chart estimates_chart(const std::vector<TrajectoryRow>& rows, const TrajectoryLog& events) {
  Chart c;
  c.title = "Parameter estimates";
  c.y_label = "estimate";
  Series lam{"lambda_hat", {}, {}, "#1f77b4"};
  Series a{"a_hat", {}, {}, "#2ca02c"};
  Estimate cur = events.initial_estimate;
  const auto hold = [&](double t) {
    lam.x.push_back(t);
    lam.y.push_back(cur.lambda_hat);
    a.x.push_back(t);
    a.y.push_back(cur.a_hat);
  };
  hold(rows.empty() ? 0.0 : rows.front().t);
  for (const auto& ev : events.events) {
    hold(ev.t);
    cur = ev.estimate;
    hold(ev.t);
  }
  if (!rows.empty()) hold(rows.back().t);
  c.series = {lam, a};
  c.vlines = event_times(events);
  return c;
}

Chart input_chart(const std::vector<TrajectoryRow>& rows) {
  Chart c;
  c.title = "Control input";
  c.y_label = "U";
  Series ud{"U_d", {}, {}, "#1f77b4"};
  Series uc{"U_c", {}, {}, "#ff7f0e"};
  for (std::size_t k = 0; k < rows.size(); ++k) {
    // Held input: draw the step at the sample where it changes.
    if (k > 0 && rows[k].Ud != rows[k - 1].Ud) {
      ud.x.push_back(rows[k].t);
      ud.y.push_back(rows[k - 1].Ud);
    }
    ud.x.push_back(rows[k].t);
    ud.y.push_back(rows[k].Ud);
    uc.x.push_back(rows[k].t);
    uc.y.push_back(rows[k].Uc);
  }
  c.series = {uc, ud};
  return c;
}

Chart dwell_chart(const TrajectoryLog& events) {
  Chart c;
  c.title = "Inter-event times";
  c.y_label = "t_i - t_(i-1) [s]";
  Series s{"dwell", {}, {}, "#9467bd", true};
  for (const auto& ev : events.events) {
    s.x.push_back(ev.t);
    s.y.push_back(ev.dwell);
  }
  c.series = {s};
  return c;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void settle() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi == lo) lo -= 0.5, hi += 0.5;
  }
};

double nice_step(double span) {
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return mag * (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0);
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

Chart make_chart(Figure fig, const std::vector<TrajectoryRow>& rows, const TrajectoryLog& events) {
  switch (fig) {
    case Figure::states: return states_chart(rows);
    case Figure::etm: return etm_chart(rows, events);
    case Figure::estimates: return estimates_chart(rows, events);
    case Figure::input: return input_chart(rows);
    case Figure::dwell: return dwell_chart(events);
  }
  throw std::invalid_argument("make_chart: unknown figure");
}

std::string render_svg(const Chart& chart, int width, int height) {
  const double left = 70, right = 150, top = 36, bottom = 48;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  Range xr, yr;
  for (const auto& s : chart.series) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.settle();
  yr.settle();
  const double pad = 0.05 * (yr.hi - yr.lo);
  yr.lo -= pad;
  yr.hi += pad;

  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return top + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

  std::ostringstream o;
  o.precision(6);
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(chart.title) << "</text>\n";

  const double xs = nice_step(xr.hi - xr.lo);
  for (double v = std::ceil(xr.lo / xs) * xs; v <= xr.hi + 1e-9 * xs; v += xs) {
    o << "<line x1=\"" << px(v) << "\" y1=\"" << top << "\" x2=\"" << px(v) << "\" y2=\""
      << top + ph << "\" stroke=\"#eee\"/>\n";
    o << "<text x=\"" << px(v) << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">" << v
      << "</text>\n";
  }
  const double ys = nice_step(yr.hi - yr.lo);
  for (double v = std::ceil(yr.lo / ys) * ys; v <= yr.hi + 1e-9 * ys; v += ys) {
    o << "<line x1=\"" << left << "\" y1=\"" << py(v) << "\" x2=\"" << left + pw << "\" y2=\""
      << py(v) << "\" stroke=\"#eee\"/>\n";
    o << "<text x=\"" << left - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">"
      << (std::abs(v) < 1e-12 * ys ? 0.0 : v) << "</text>\n";
  }
  o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">"
    << escape(chart.x_label) << "</text>\n";
  o << "<text transform=\"translate(16," << top + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(chart.y_label) << "</text>\n";

  for (double t : chart.vlines)
    o << "<line class=\"event\" x1=\"" << px(t) << "\" y1=\"" << top << "\" x2=\"" << px(t)
      << "\" y2=\"" << top + ph << "\" stroke=\"#999\" stroke-dasharray=\"2,3\"/>\n";

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const std::size_t n = std::min(s.x.size(), s.y.size());
    if (s.points) {
      for (std::size_t i = 0; i < n; ++i)
        o << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\""
          << s.color << "\"/>\n";
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(s.y[i])) continue;
        o << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      o << "\"/>\n";
    }
    const double ly = top + 16 + 18 * static_cast<double>(k);
    o << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly - 4 << "\" x2=\"" << left + pw + 36
      << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << left + pw + 42 << "\" y=\"" << ly << "\">" << escape(s.label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

}  // namespace etbc
