#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace stylelens::cli {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (raw <= m * mag) return m * mag;
  }
  return 10 * mag;
}

}  // namespace

ChartScale::ChartScale(int first_ordinal, int last_ordinal, double y_min, double y_max)
    : first_(first_ordinal), last_(last_ordinal), y_min_(y_min), y_max_(y_max) {}

ChartScale ChartScale::fit(const ChartSpec& spec) {
  int first = spec.points.empty() ? 0 : spec.points.front().month.ordinal();
  int last = spec.points.empty() ? 0 : spec.points.back().month.ordinal();
  if (spec.event) {
    first = std::min(first, spec.event->ordinal());
    last = std::max(last, spec.event->ordinal());
  }
  double lo = 0, hi = 0;
  bool any = false;
  for (const auto& p : spec.points) {
    if (!p.value) continue;
    lo = any ? std::min(lo, *p.value) : *p.value;
    hi = any ? std::max(hi, *p.value) : *p.value;
    any = true;
  }
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  if (hi - lo < 1e-12) {
    hi += 1;
    lo -= lo < 0 ? 1 : 0;
  }
  const double step = nice_step(hi - lo);
  return ChartScale(first, last, std::floor(lo / step) * step, std::ceil(hi / step) * step);
}

double ChartScale::x(Month m) const {
  const double plot = kWidth - kLeft - kRight;
  if (last_ == first_) return kLeft + plot / 2;
  return kLeft + plot * double(m.ordinal() - first_) / double(last_ - first_);
}

double ChartScale::y(double v) const {
  const double plot = kHeight - kTop - kBottom;
  return kTop + plot * (y_max_ - v) / (y_max_ - y_min_);
}

std::string line_chart(const ChartSpec& spec) {
  const auto s = ChartScale::fit(spec);
  using S = ChartScale;
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(S::kWidth) + "\" height=\"" +
                    num(S::kHeight) + "\" viewBox=\"0 0 " + num(S::kWidth) + " " + num(S::kHeight) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<text x=\"" + num(S::kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\">" + escape(spec.title) + "</text>\n";

  // Axes and gridlines.
  const double x0 = S::kLeft, x1 = S::kWidth - S::kRight;
  const double y0 = S::kHeight - S::kBottom, y1 = S::kTop;
  out += "<g id=\"axes\" stroke=\"black\" stroke-width=\"1\">\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y0) + "\"/>\n";
  out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(x0) + "\" y2=\"" + num(y1) + "\"/>\n";
  out += "</g>\n";
  const double step = nice_step(s.y_max() - s.y_min());
  out += "<g id=\"y-ticks\" font-family=\"sans-serif\" font-size=\"11\">\n";
  for (double v = s.y_min(); v <= s.y_max() + step * 1e-9; v += step) {
    const double y = s.y(v);
    out += "<line x1=\"" + num(x0) + "\" y1=\"" + num(y) + "\" x2=\"" + num(x1) + "\" y2=\"" + num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    char label[32];
    std::snprintf(label, sizeof label, "%g", std::abs(v) < step * 1e-9 ? 0.0 : v);
    out += "<text x=\"" + num(x0 - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  out += "</g>\n";
  if (!spec.points.empty()) {
    const int first = spec.points.front().month.ordinal();
    const int last = spec.points.back().month.ordinal();
    const int every = std::max(1, (last - first) / 8 + 1);
    out += "<g id=\"x-ticks\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
    for (int o = first; o <= last; o += every) {
      const Month m = Month::from_ordinal(o);
      out += "<text x=\"" + num(s.x(m)) + "\" y=\"" + num(y0 + 18) + "\">" + m.to_string() + "</text>\n";
    }
    out += "</g>\n";
  }
  out += "<text x=\"16\" y=\"" + num((y0 + y1) / 2) + "\" transform=\"rotate(-90 16 " + num((y0 + y1) / 2) +
         ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + escape(spec.y_label) +
         "</text>\n";

  if (spec.event) {
    const double ex = s.x(*spec.event);
    out += "<line id=\"event-marker\" x1=\"" + num(ex) + "\" y1=\"" + num(y0) + "\" x2=\"" + num(ex) + "\" y2=\"" +
           num(y1) + "\" stroke=\"#cc3333\" stroke-dasharray=\"5,4\" stroke-width=\"1.5\"/>\n";
    out += "<text x=\"" + num(ex + 4) + "\" y=\"" + num(y1 + 12) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#cc3333\">" + spec.event->to_string() +
           "</text>\n";
  }

  out += "<g id=\"series\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\">\n";
  std::string run;
  std::size_t run_len = 0;
  auto flush = [&] {
    if (run_len >= 2) out += "<polyline points=\"" + run + "\"/>\n";
    run.clear();
    run_len = 0;
  };
  for (const auto& p : spec.points) {
    if (!p.value) {
      flush();
      continue;
    }
    if (run_len) run += " ";
    run += num(s.x(p.month)) + "," + num(s.y(*p.value));
    ++run_len;
  }
  flush();
  out += "</g>\n<g id=\"points\" fill=\"#1f4e9c\">\n";
  for (const auto& p : spec.points) {
    if (!p.value) continue;
    out += "<circle cx=\"" + num(s.x(p.month)) + "\" cy=\"" + num(s.y(*p.value)) + "\" r=\"3\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

}  // namespace stylelens::cli
