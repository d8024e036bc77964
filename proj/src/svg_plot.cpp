#include "restartagd/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace restartagd {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

double grad_norm(const TraceRecord& r) {
  return r.grad_norm_ybar ? std::min(r.grad_norm_monitor, *r.grad_norm_ybar) : r.grad_norm_monitor;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  /// Widens degenerate or empty ranges so that mapping never divides by 0.
  void settle() {
    if (lo > hi) lo = 0.0, hi = 1.0;
    if (lo == hi) {
      const double pad = lo == 0.0 ? 1.0 : 0.05 * std::abs(lo);
      lo -= pad;
      hi += pad;
    }
  }
};

struct Panel {
  double x0, y0, w, h;
  Range xr, yr;

  double px(double x) const { return x0 + (x - xr.lo) / (xr.hi - xr.lo) * w; }
  double py(double y) const { return y0 + h - (y - yr.lo) / (yr.hi - yr.lo) * h; }
};

void draw_frame(std::ostream& out, const Panel& p, const std::string& title, const std::string& ylabel, bool log_y) {
  out << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.w << "\" height=\"" << p.h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  out << "<text x=\"" << p.x0 + p.w / 2 << "\" y=\"" << p.y0 - 8 << "\" text-anchor=\"middle\">" << escape(title)
      << "</text>\n";
  out << "<text x=\"" << p.x0 + p.w / 2 << "\" y=\"" << p.y0 + p.h + 34
      << "\" text-anchor=\"middle\">oracle calls</text>\n";
  out << "<text x=\"" << p.x0 - 50 << "\" y=\"" << p.y0 + p.h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
      << p.x0 - 50 << ' ' << p.y0 + p.h / 2 << ")\">" << escape(ylabel) << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = p.xr.lo + (p.xr.hi - p.xr.lo) * i / 4.0;
    out << "<text x=\"" << p.px(xv) << "\" y=\"" << p.y0 + p.h + 16 << "\" text-anchor=\"middle\" font-size=\"10\">"
        << num(xv) << "</text>\n";
  }
  auto y_tick = [&](double yv, const std::string& label) {
    out << "<text x=\"" << p.x0 - 4 << "\" y=\"" << p.py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">" << label
        << "</text>\n";
  };
  if (log_y) {
    // Whole decades, at most about six labels.
    const double step = std::max(1.0, std::ceil((p.yr.hi - p.yr.lo) / 6.0));
    for (double e = std::ceil(p.yr.lo / step) * step; e <= p.yr.hi; e += step) y_tick(e, "1e" + num(e));
  } else {
    for (int i = 0; i <= 4; ++i) {
      const double yv = p.yr.lo + (p.yr.hi - p.yr.lo) * i / 4.0;
      y_tick(yv, num(yv));
    }
  }
}

template <class Y>
void draw_series(std::ostream& out, const Panel& p, const std::vector<TraceRecord>& rows, Y y_of,
                 const char* color) {
  std::ostringstream pts;
  std::size_t n = 0;
  for (const auto& r : rows) {
    const double y = y_of(r);
    if (!std::isfinite(y)) continue;
    pts << (n++ ? " " : "") << p.px(static_cast<double>(r.n_oracle)) << ',' << p.py(y);
  }
  if (n == 0) return;
  if (n == 1) {
    const auto s = pts.str();
    const auto comma = s.find(',');
    out << "<circle cx=\"" << s.substr(0, comma) << "\" cy=\"" << s.substr(comma + 1) << "\" r=\"3\" fill=\"" << color
        << "\"/>\n";
    return;
  }
  out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
}

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  if (series.empty()) throw ParamError("plot: no traces");
  for (const auto& s : series) {
    if (s.rows.empty()) throw ParamError("plot: trace '" + s.label + "' has no rows");
  }

  // Non-positive norms are drawn at a floor two decades below the
  // smallest positive one.
  double min_pos = std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (const auto& r : s.rows)
      if (grad_norm(r) > 0.0) min_pos = std::min(min_pos, grad_norm(r));
  const double floor = std::isfinite(min_pos) ? min_pos / 100.0 : 1e-16;
  auto log_norm = [floor](const TraceRecord& r) { return std::log10(std::max(grad_norm(r), floor)); };
  bool f_positive = true;
  for (const auto& s : series)
    for (const auto& r : s.rows) f_positive = f_positive && r.f_x > 0.0;
  auto f_of = [f_positive](const TraceRecord& r) { return f_positive ? std::log10(r.f_x) : r.f_x; };

  const double margin_l = 80, margin_t = 40, gap = 90, legend_h = 22.0 * static_cast<double>(series.size()) + 20;
  Panel left{margin_l, margin_t, double(opt.panel_width), double(opt.panel_height), {}, {}};
  Panel right{margin_l + opt.panel_width + gap, margin_t, double(opt.panel_width), double(opt.panel_height), {}, {}};
  for (const auto& s : series) {
    for (const auto& r : s.rows) {
      left.xr.add(static_cast<double>(r.n_oracle));
      left.yr.add(f_of(r));
      right.yr.add(log_norm(r));
    }
  }
  left.xr.settle();
  left.yr.settle();
  right.yr.settle();
  right.xr = left.xr;

  const double width = right.x0 + right.w + 30;
  const double height = margin_t + opt.panel_height + 50 + legend_h;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!opt.title.empty()) {
    out << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(opt.title)
        << "</text>\n";
  }
  draw_frame(out, left, "objective", "f(x)", f_positive);
  draw_frame(out, right, "gradient norm", "|grad f|", true);

  const double legend_y = margin_t + opt.panel_height + 56;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const char* color = kPalette[i % std::size(kPalette)];
    out << "<g class=\"series\">\n";
    draw_series(out, left, series[i].rows, f_of, color);
    draw_series(out, right, series[i].rows, log_norm, color);
    out << "</g>\n";
    const double ly = legend_y + 22.0 * static_cast<double>(i);
    out << "<g class=\"legend-entry\"><line x1=\"" << margin_l << "\" y1=\"" << ly << "\" x2=\"" << margin_l + 24
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"3\"/><text x=\"" << margin_l + 32
        << "\" y=\"" << ly + 4 << "\">" << escape(series[i].label) << "</text></g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::string& path, const std::vector<PlotSeries>& series, const PlotOptions& options) {
  const std::string svg = render_svg(series, options);
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << svg;
  if (!out) throw Error("error writing " + path);
}

}  // namespace restartagd
