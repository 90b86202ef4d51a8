#include "taylorlp/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "taylorlp/errors.hpp"

namespace tlp::svg {

namespace {

std::string fmt(double v, int decimals = 2) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, decimals);
  return std::string(buf, res.ptr);
}

std::string fmt_tick(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  return std::string(buf, res.ptr);
}

std::string xml_escape(const std::string& s) {
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

struct PanelData {
  std::string label;
  std::vector<lp::HorizonEstimate> pts;
};

constexpr double kPanelW = 300.0, kPanelH = 230.0;
constexpr double kMarginL = 56.0, kMarginR = 16.0, kMarginT = 34.0, kMarginB = 40.0;
constexpr double kTitleStrip = 28.0;
constexpr double kGap = 14.0;

}  // namespace

std::string render_irf_svg(const lp::IrfTable& table, const std::string& title) {
  if (table.rows.empty()) throw data_error("plot: empty table");

  std::vector<PanelData> panels;
  for (const auto& r : table.rows) {
    auto it = std::find_if(panels.begin(), panels.end(),
                           [&](const PanelData& p) { return p.label == r.label; });
    if (it == panels.end()) {
      panels.push_back({r.label, {}});
      it = panels.end() - 1;
    }
    const auto& e = r.e;
    if (!std::isfinite(e.beta) || !std::isfinite(e.se) || !std::isfinite(e.ci_low) ||
        !std::isfinite(e.ci_high))
      throw data_error("plot: non-finite value at label '" + r.label + "' horizon " +
                       std::to_string(e.horizon));
    it->pts.push_back(e);
  }
  for (auto& p : panels)
    std::sort(p.pts.begin(), p.pts.end(),
              [](const lp::HorizonEstimate& a, const lp::HorizonEstimate& b) {
                return a.horizon < b.horizon;
              });

  const double total_w =
      panels.size() * kPanelW + (panels.size() - 1) * kGap + kMarginL + kMarginR;
  const double total_h = kTitleStrip + kPanelH + kMarginT + kMarginB;

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(total_w, 0)
     << "\" height=\"" << fmt(total_h, 0) << "\" viewBox=\"0 0 " << fmt(total_w, 0) << " "
     << fmt(total_h, 0) << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << fmt(total_w, 0) << "\" height=\"" << fmt(total_h, 0)
     << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << fmt(total_w / 2.0) << "\" y=\"20\" text-anchor=\"middle\" "
        "font-family=\"sans-serif\" font-size=\"15\">"
     << xml_escape(title) << "</text>\n";

  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& pd = panels[pi];
    const double left = kMarginL + pi * (kPanelW + kGap);
    const double top = kTitleStrip + kMarginT;
    const double w = kPanelW, h = kPanelH;

    int hmin = pd.pts.front().horizon, hmax = pd.pts.back().horizon;
    double ymin = 0.0, ymax = 0.0;
    for (const auto& e : pd.pts) {
      ymin = std::min(ymin, e.ci_low);
      ymax = std::max(ymax, e.ci_high);
    }
    if (ymax - ymin < 1e-12) {
      ymin -= 1.0;
      ymax += 1.0;
    }
    const double pad = 0.06 * (ymax - ymin);
    ymin -= pad;
    ymax += pad;

    auto xs = [&](int horizon) {
      if (hmax == hmin) return left + w / 2.0;
      return left + (horizon - hmin) / static_cast<double>(hmax - hmin) * w;
    };
    auto ys = [&](double v) { return top + (ymax - v) / (ymax - ymin) * h; };

    os << "<g>\n";
    os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(w)
       << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(left + w / 2.0) << "\" y=\"" << fmt(top - 8.0)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
       << xml_escape(pd.label) << "</text>\n";

    if (pd.pts.size() > 1) {
      std::string band;
      for (const auto& e : pd.pts) band += fmt(xs(e.horizon)) + "," + fmt(ys(e.ci_high)) + " ";
      for (auto it = pd.pts.rbegin(); it != pd.pts.rend(); ++it)
        band += fmt(xs(it->horizon)) + "," + fmt(ys(it->ci_low)) + " ";
      band.pop_back();
      os << "<polygon points=\"" << band << "\" fill=\"#b0c4de\" fill-opacity=\"0.55\" "
            "stroke=\"none\"/>\n";
    } else {
      const auto& e = pd.pts.front();
      os << "<line x1=\"" << fmt(xs(e.horizon)) << "\" y1=\"" << fmt(ys(e.ci_low)) << "\" x2=\""
         << fmt(xs(e.horizon)) << "\" y2=\"" << fmt(ys(e.ci_high))
         << "\" stroke=\"#b0c4de\" stroke-width=\"4\"/>\n";
      os << "<circle cx=\"" << fmt(xs(e.horizon)) << "\" cy=\"" << fmt(ys(e.ci_low))
         << "\" r=\"3\" fill=\"#b0c4de\"/>\n";
      os << "<circle cx=\"" << fmt(xs(e.horizon)) << "\" cy=\"" << fmt(ys(e.ci_high))
         << "\" r=\"3\" fill=\"#b0c4de\"/>\n";
    }

    if (ymin < 0.0 && ymax > 0.0)
      os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(ys(0.0)) << "\" x2=\""
         << fmt(left + w) << "\" y2=\"" << fmt(ys(0.0))
         << "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"4,3\"/>\n";

    if (pd.pts.size() > 1) {
      std::string line;
      for (const auto& e : pd.pts) line += fmt(xs(e.horizon)) + "," + fmt(ys(e.beta)) + " ";
      line.pop_back();
      os << "<polyline points=\"" << line
         << "\" fill=\"none\" stroke=\"#1f3d7a\" stroke-width=\"2\"/>\n";
    }
    for (const auto& e : pd.pts)
      os << "<circle cx=\"" << fmt(xs(e.horizon)) << "\" cy=\"" << fmt(ys(e.beta))
         << "\" r=\"2.5\" fill=\"#1f3d7a\"/>\n";

    for (int horizon = hmin; horizon <= hmax; ++horizon) {
      os << "<line x1=\"" << fmt(xs(horizon)) << "\" y1=\"" << fmt(top + h) << "\" x2=\""
         << fmt(xs(horizon)) << "\" y2=\"" << fmt(top + h + 4.0)
         << "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
      os << "<text x=\"" << fmt(xs(horizon)) << "\" y=\"" << fmt(top + h + 16.0)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << horizon
         << "</text>\n";
    }
    os << "<text x=\"" << fmt(left + w / 2.0) << "\" y=\"" << fmt(top + h + 32.0)
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">horizon"
          "</text>\n";

    for (int k = 0; k <= 4; ++k) {
      const double v = ymin + (ymax - ymin) * k / 4.0;
      os << "<line x1=\"" << fmt(left - 4.0) << "\" y1=\"" << fmt(ys(v)) << "\" x2=\""
         << fmt(left) << "\" y2=\"" << fmt(ys(v)) << "\" stroke=\"#444444\" "
            "stroke-width=\"1\"/>\n";
      os << "<text x=\"" << fmt(left - 7.0) << "\" y=\"" << fmt(ys(v) + 3.5)
         << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << fmt_tick(v)
         << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace tlp::svg
