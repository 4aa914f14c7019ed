#include "netsense/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace netsense {

namespace {

constexpr double kWidth = 820.0;
constexpr double kPanelHeight = 280.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kGap = 30.0;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

}  // namespace

std::string render_svg(const std::string& title, const std::string& x_label, const std::vector<Panel>& panels) {
    Range xr;
    for (const auto& p : panels)
        for (const auto& s : p.series)
            for (double x : s.x)
                if (x > 0.0) xr.add(std::log10(x));
    xr.pad();
    const double plot_w = kWidth - kLeft - kRight;
    const double height = kTop + static_cast<double>(panels.size()) * (kPanelHeight + kGap) + 30.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(height)
       << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kWidth / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
       << "</text>\n";

    auto sx = [&](double x) { return kLeft + (std::log10(x) - xr.lo) / (xr.hi - xr.lo) * plot_w; };

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const auto& panel = panels[pi];
        const double top = kTop + static_cast<double>(pi) * (kPanelHeight + kGap);
        const double bottom = top + kPanelHeight;
        auto yval = [&](double y) { return panel.log_y ? (y > 0.0 ? std::log10(y) : NAN) : y; };
        Range yr;
        for (const auto& s : panel.series)
            for (double y : s.y) yr.add(yval(y));
        yr.pad();
        auto sy = [&](double y) { return bottom - (yval(y) - yr.lo) / (yr.hi - yr.lo) * kPanelHeight; };

        os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(top) << "\" width=\"" << num(plot_w) << "\" height=\""
           << num(kPanelHeight) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int d = static_cast<int>(std::ceil(xr.lo)); d <= static_cast<int>(std::floor(xr.hi)); ++d) {
            const double px = kLeft + (d - xr.lo) / (xr.hi - xr.lo) * plot_w;
            os << "<line x1=\"" << num(px) << "\" y1=\"" << num(top) << "\" x2=\"" << num(px) << "\" y2=\""
               << num(bottom) << "\" stroke=\"#ddd\"/>\n";
            os << "<text x=\"" << num(px) << "\" y=\"" << num(bottom + 14) << "\" text-anchor=\"middle\">"
               << tick_label(std::pow(10.0, d)) << "</text>\n";
        }
        for (int t = 0; t <= 4; ++t) {
            const double v = yr.lo + (yr.hi - yr.lo) * t / 4.0;
            const double py = bottom - kPanelHeight * t / 4.0;
            os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py) << "\" x2=\"" << num(kLeft + plot_w)
               << "\" y2=\"" << num(py) << "\" stroke=\"#eee\"/>\n";
            os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(py + 4) << "\" text-anchor=\"end\">"
               << tick_label(panel.log_y ? std::pow(10.0, v) : std::round(v * 100.0) / 100.0) << "</text>\n";
        }
        os << "<text transform=\"translate(16," << num(top + kPanelHeight / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
           << escape(panel.y_label) << "</text>\n";

        double legend_y = top + 14;
        for (const auto& s : panel.series) {
            os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!(s.x[i] > 0.0) || !std::isfinite(yval(s.y[i]))) continue;
                os << num(sx(s.x[i])) << ',' << num(sy(s.y[i])) << ' ';
            }
            os << "\"/>\n";
            os << "<text x=\"" << num(kLeft + plot_w - 8) << "\" y=\"" << num(legend_y) << "\" text-anchor=\"end\" fill=\""
               << s.color << "\">" << escape(s.label) << "</text>\n";
            legend_y += 14;
        }
    }
    os << "<text x=\"" << num(kLeft + plot_w / 2) << "\" y=\"" << num(height - 8) << "\" text-anchor=\"middle\">"
       << escape(x_label) << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace netsense
