#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace permwalk::cli {

namespace {

constexpr double W = 720, H = 560;
constexpr double left = 80, right = 24;
constexpr double top1 = 48, bottom1 = 360;  // main panel
constexpr double top2 = 400, bottom2 = 510;  // ratio panel

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string esc(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '&') o += "&amp;";
    else if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '"') o += "&quot;";
    else o += c;
  }
  return o;
}

std::string tick_label(int e) {
  if (e >= -2 && e <= 3) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::pow(10.0, e));
    return buf;
  }
  return "1e" + std::to_string(e);
}

struct Range {
  double lo = std::numeric_limits<double>::infinity(), hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
  }
};

struct Axis {
  double lo, hi, p0, p1;
  double map(double v) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

void polyline(std::ostringstream& o, const std::vector<double>& xs, const std::vector<double>& ys, const Axis& ax,
              const Axis& ay, bool logy, const std::string& color, bool dashed) {
  std::string pts;
  auto flush = [&] {
    if (pts.empty()) return;
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
      << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"" << pts << "\"/>\n";
    pts.clear();
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double y = logy ? std::log10(ys[i]) : ys[i];
    if (!(xs[i] > 0) || !std::isfinite(y)) {
      flush();
      continue;
    }
    if (!pts.empty()) pts += ' ';
    pts += num(ax.map(std::log10(xs[i]))) + "," + num(ay.map(y));
  }
  flush();
}

}  // namespace

std::string render_svg(const PlotSpec& spec) {
  Range rx, ry, rr;
  for (const auto& s : spec.series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (s.x[i] > 0 && s.y[i] > 0) {
        rx.add(std::log10(s.x[i]));
        ry.add(std::log10(s.y[i]));
      }
  for (std::size_t i = 0; i < spec.ratio_x.size(); ++i)
    if (spec.ratio_x[i] > 0) {
      rx.add(std::log10(spec.ratio_x[i]));
      rr.add(spec.ratio_y[i]);
    }
  rx.pad();
  ry.pad();
  rr.add(1.0);
  rr.pad();
  double rpad = 0.1 * (rr.hi - rr.lo);
  rr.lo -= rpad;
  rr.hi += rpad;

  Axis ax{std::floor(rx.lo), std::ceil(rx.hi), left, W - right};
  if (ax.hi <= ax.lo) ax.hi = ax.lo + 1;
  Axis ay{std::floor(ry.lo), std::ceil(ry.hi), bottom1, top1};
  if (ay.hi <= ay.lo) ay.hi = ay.lo + 1;
  Axis ar{rr.lo, rr.hi, bottom2, top2};

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(W / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" << esc(spec.title)
    << "</text>\n";

  // frames and decade grid
  for (auto [t, b] : {std::pair{top1, bottom1}, std::pair{top2, bottom2}})
    o << "<rect x=\"" << num(left) << "\" y=\"" << num(t) << "\" width=\"" << num(W - right - left)
      << "\" height=\"" << num(b - t) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  int xstep = std::max(1, static_cast<int>((ax.hi - ax.lo) / 10));
  for (int e = static_cast<int>(ax.lo); e <= static_cast<int>(ax.hi); e += xstep) {
    double px = ax.map(e);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(top1) << "\" x2=\"" << num(px) << "\" y2=\"" << num(bottom1)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << num(px) << "\" y=\"" << num(bottom2 + 16) << "\" text-anchor=\"middle\">" << tick_label(e)
      << "</text>\n";
  }
  int ystep = std::max(1, static_cast<int>((ay.hi - ay.lo) / 8));
  for (int e = static_cast<int>(ay.lo); e <= static_cast<int>(ay.hi); e += ystep) {
    double py = ay.map(e);
    o << "<line x1=\"" << num(left) << "\" y1=\"" << num(py) << "\" x2=\"" << num(W - right) << "\" y2=\"" << num(py)
      << "\" stroke=\"#ddd\"/>\n";
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">" << tick_label(e)
      << "</text>\n";
  }
  for (double v : {rr.lo, 1.0, rr.hi}) {
    if (v < rr.lo || v > rr.hi) continue;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(ar.map(v) + 4) << "\" text-anchor=\"end\">" << buf
      << "</text>\n";
  }
  o << "<line x1=\"" << num(left) << "\" y1=\"" << num(ar.map(1.0)) << "\" x2=\"" << num(W - right) << "\" y2=\""
    << num(ar.map(1.0)) << "\" stroke=\"#999\" stroke-dasharray=\"2,2\"/>\n";

  for (const auto& [x, label] : spec.marks) {
    if (!(x > 0)) continue;
    double lx = std::log10(x);
    if (lx < ax.lo || lx > ax.hi) continue;
    double px = ax.map(lx);
    o << "<line x1=\"" << num(px) << "\" y1=\"" << num(top1) << "\" x2=\"" << num(px) << "\" y2=\"" << num(bottom2)
      << "\" stroke=\"#d62728\" stroke-dasharray=\"4,4\"/>\n";
    o << "<text x=\"" << num(px + 3) << "\" y=\"" << num(top1 + 12) << "\" fill=\"#d62728\">" << esc(label)
      << "</text>\n";
  }

  for (const auto& s : spec.series) {
    polyline(o, s.x, s.y, ax, ay, true, s.color, s.dashed);
    if (s.markers)
      for (std::size_t i = 0; i < s.x.size(); ++i)
        if (s.x[i] > 0 && s.y[i] > 0)
          o << "<circle cx=\"" << num(ax.map(std::log10(s.x[i]))) << "\" cy=\"" << num(ay.map(std::log10(s.y[i])))
            << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
  }
  polyline(o, spec.ratio_x, spec.ratio_y, ax, ar, false, "#2ca02c", false);
  for (std::size_t i = 0; i < spec.ratio_x.size(); ++i)
    if (spec.ratio_x[i] > 0 && std::isfinite(spec.ratio_y[i]))
      o << "<circle cx=\"" << num(ax.map(std::log10(spec.ratio_x[i]))) << "\" cy=\"" << num(ar.map(spec.ratio_y[i]))
        << "\" r=\"2\" fill=\"#2ca02c\"/>\n";

  // legend
  double ly = top1 + 14;
  for (const auto& s : spec.series) {
    o << "<line x1=\"" << num(W - right - 150) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(W - right - 130)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << s.color << "\" stroke-width=\"1.5\""
      << (s.dashed ? " stroke-dasharray=\"5,3\"" : "") << "/>\n";
    o << "<text x=\"" << num(W - right - 126) << "\" y=\"" << num(ly + 4) << "\">" << esc(s.name) << "</text>\n";
    ly += 14;
  }
  o << "<text x=\"" << num((left + W - right) / 2) << "\" y=\"" << num(H - 12) << "\" text-anchor=\"middle\">"
    << esc(spec.xlabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num((top1 + bottom1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num((top1 + bottom1) / 2) << ")\">" << esc(spec.ylabel) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num((top2 + bottom2) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num((top2 + bottom2) / 2) << ")\">ratio</text>\n";
  o << "</svg>\n";
  return o.str();
}

}  // namespace permwalk::cli
