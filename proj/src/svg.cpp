#include "lqg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lqg {

namespace {

std::string num(double x) {
  // fixed short formatting keeps the output byte-stable
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

std::string emit_svg(const std::vector<SvgSeries>& series, const SvgStyle& style) {
  if (series.empty()) throw std::invalid_argument("emit_svg: empty series");
  for (const auto& s : series) {
    if (s.x.empty() || s.x.size() != s.y.size()) {
      throw std::invalid_argument("emit_svg: empty or mismatched series");
    }
  }
  auto tx = [&](double v) { return style.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return style.log_y ? std::log10(v) : v; };

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      xmin = std::min(xmin, tx(s.x[i]));
      xmax = std::max(xmax, tx(s.x[i]));
      ymin = std::min(ymin, ty(s.y[i]));
      ymax = std::max(ymax, ty(s.y[i]));
    }
  }
  if (xmax <= xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax <= ymin) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  const double mx = 0.05 * (xmax - xmin), my = 0.05 * (ymax - ymin);
  xmin -= mx;
  xmax += mx;
  ymin -= my;
  ymax += my;
  const double pl = 60, pr = 15, pt = 30, pb = 45;
  const double w = style.width, h = style.height;
  auto px = [&](double v) { return pl + (tx(v) - xmin) / (xmax - xmin) * (w - pl - pr); };
  auto py = [&](double v) { return h - pb - (ty(v) - ymin) / (ymax - ymin) * (h - pt - pb); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
     << style.height << "\" viewBox=\"0 0 " << style.width << " " << style.height << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes
  os << "<line x1=\"" << num(pl) << "\" y1=\"" << num(h - pb) << "\" x2=\"" << num(w - pr)
     << "\" y2=\"" << num(h - pb) << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << num(pl) << "\" y1=\"" << num(pt) << "\" x2=\"" << num(pl) << "\" y2=\""
     << num(h - pb) << "\" stroke=\"black\"/>\n";
  // axis labels (4 ticks each)
  for (int i = 0; i <= 4; ++i) {
    const double fx = xmin + (xmax - xmin) * i / 4.0;
    const double fy = ymin + (ymax - ymin) * i / 4.0;
    const double sx = pl + (w - pl - pr) * i / 4.0;
    const double sy = h - pb - (h - pt - pb) * i / 4.0;
    os << "<text x=\"" << num(sx) << "\" y=\"" << num(h - pb + 16)
       << "\" font-size=\"10\" text-anchor=\"middle\">"
       << (style.log_x ? "1e" + num(fx) : num(fx)) << "</text>\n";
    os << "<text x=\"" << num(pl - 8) << "\" y=\"" << num(sy + 3)
       << "\" font-size=\"10\" text-anchor=\"end\">" << (style.log_y ? "1e" + num(fy) : num(fy))
       << "</text>\n";
  }
  if (!style.title.empty()) {
    os << "<text x=\"" << num(w / 2) << "\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">"
       << style.title << "</text>\n";
  }
  // series
  int legend_row = 0;
  for (const auto& s : series) {
    if (s.x.size() > 1) {
      os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.2\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        os << num(px(s.x[i])) << "," << num(py(s.y[i])) << " ";
      }
      os << "\"/>\n";
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      os << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i]))
         << "\" r=\"2.2\" fill=\"" << s.color << "\"/>\n";
    }
    if (!s.label.empty()) {
      os << "<text x=\"" << num(pl + 10) << "\" y=\"" << num(pt + 14 + 14 * legend_row)
         << "\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label << "</text>\n";
      ++legend_row;
    }
  }
  // fitted line in the (possibly log) domain, slope annotated
  if (style.fit && series.front().x.size() > 1) {
    const double slope = style.fit->first, inter = style.fit->second;
    const double gx0 = xmin + mx, gx1 = xmax - mx;
    const double gy0 = inter + slope * gx0, gy1 = inter + slope * gx1;
    auto spx = [&](double gx) { return pl + (gx - xmin) / (xmax - xmin) * (w - pl - pr); };
    auto spy = [&](double gy) { return h - pb - (gy - ymin) / (ymax - ymin) * (h - pt - pb); };
    os << "<line x1=\"" << num(spx(gx0)) << "\" y1=\"" << num(spy(gy0)) << "\" x2=\""
       << num(spx(gx1)) << "\" y2=\"" << num(spy(gy1))
       << "\" stroke=\"#c23b22\" stroke-dasharray=\"5,3\"/>\n";
    os << "<text x=\"" << num(pl + 10) << "\" y=\"" << num(pt + 14 + 14 * legend_row)
       << "\" font-size=\"11\" fill=\"#c23b22\">fit slope " << num(slope) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg_file(const std::vector<SvgSeries>& series, const SvgStyle& style,
                   const std::string& filename) {
  std::ofstream out(filename);
  if (!out) throw std::runtime_error("cannot open for writing: " + filename);
  out << emit_svg(series, style);
}

}  // namespace lqg
