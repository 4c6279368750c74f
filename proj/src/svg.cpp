#include "foldcont/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace foldcont {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kTop = 56.0;
constexpr double kPlotW = 600.0;
constexpr double kPlotH = 360.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string px(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

std::string escape(const std::string& s)
{
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

struct Range {
    double lo = 0.0;
    double hi = 1.0;
};

Range padded(double lo, double hi)
{
    if (!(lo <= hi)) return {0.0, 1.0};
    if (hi - lo <= 1e-12 * std::max(1.0, std::abs(lo))) {
        const double w = std::max(1.0, std::abs(lo)) * 0.5;
        return {lo - w, hi + w};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

std::vector<double> ticks(Range r)
{
    const double raw = (r.hi - r.lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> t;
    for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step) t.push_back(v);
    return t;
}

void header(std::ostringstream& os, double w, double h)
{
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(w) << "\" height=\"" << px(h)
       << "\" viewBox=\"0 0 " << px(w) << ' ' << px(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string render_svg(const Plot& plot)
{
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY;
    for (const auto& s : plot.series)
        for (const auto& p : s.points) {
            if (!std::isfinite(p[0]) || !std::isfinite(p[1])) throw std::invalid_argument("render_svg: non-finite point");
            xlo = std::min(xlo, p[0]);
            xhi = std::max(xhi, p[0]);
            ylo = std::min(ylo, p[1]);
            yhi = std::max(yhi, p[1]);
        }
    const Range xr = padded(xlo, xhi);
    const Range yr = padded(ylo, yhi);
    const double sx = kPlotW / (xr.hi - xr.lo);
    const double sy = kPlotH / (yr.hi - yr.lo);
    auto to_px = [&](const Point2& p) {
        return Point2{kLeft + (p[0] - xr.lo) * sx, kTop + kPlotH - (p[1] - yr.lo) * sy};
    };

    std::ostringstream os;
    header(os, kWidth, kHeight);
    os << "<text x=\"" << px(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
       << "</text>\n";
    if (!plot.note.empty())
        os << "<text x=\"" << px(kWidth / 2) << "\" y=\"40\" text-anchor=\"middle\" font-size=\"10\" fill=\"#555\">"
           << escape(plot.note) << "</text>\n";

    // axes and ticks
    os << "<g class=\"axes\" stroke=\"#333\" fill=\"none\">\n";
    os << "<rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(kPlotW) << "\" height=\""
       << px(kPlotH) << "\"/>\n";
    for (double v : ticks(xr)) {
        const double x = kLeft + (v - xr.lo) * sx;
        os << "<line x1=\"" << px(x) << "\" y1=\"" << px(kTop + kPlotH) << "\" x2=\"" << px(x) << "\" y2=\""
           << px(kTop + kPlotH + 5) << "\"/>\n";
    }
    for (double v : ticks(yr)) {
        const double y = kTop + kPlotH - (v - yr.lo) * sy;
        os << "<line x1=\"" << px(kLeft - 5) << "\" y1=\"" << px(y) << "\" x2=\"" << px(kLeft) << "\" y2=\"" << px(y)
           << "\"/>\n";
    }
    os << "</g>\n<g class=\"tick-labels\" fill=\"#333\">\n";
    for (double v : ticks(xr))
        os << "<text x=\"" << px(kLeft + (v - xr.lo) * sx) << "\" y=\"" << px(kTop + kPlotH + 18)
           << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
    for (double v : ticks(yr))
        os << "<text x=\"" << px(kLeft - 8) << "\" y=\"" << px(kTop + kPlotH - (v - yr.lo) * sy + 4)
           << "\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
    os << "</g>\n";
    os << "<text x=\"" << px(kLeft + kPlotW / 2) << "\" y=\"" << px(kHeight - 14) << "\" text-anchor=\"middle\">"
       << escape(plot.x_label) << "</text>\n";
    os << "<text x=\"18\" y=\"" << px(kTop + kPlotH / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
       << px(kTop + kPlotH / 2) << ")\">" << escape(plot.y_label) << "</text>\n";

    // data, clipped to the frame
    os << "<clipPath id=\"frame\"><rect x=\"" << px(kLeft) << "\" y=\"" << px(kTop) << "\" width=\"" << px(kPlotW)
       << "\" height=\"" << px(kPlotH) << "\"/></clipPath>\n";
    os << "<g clip-path=\"url(#frame)\">\n";
    // Pixel coordinates at full precision; the group records the affine map
    // so parse_svg_polylines can return data coordinates.
    const double ox = kLeft - xr.lo * sx;
    const double oy = kTop + kPlotH + yr.lo * sy;
    os << "<g class=\"data\" data-ox=\"" << num(ox) << "\" data-oy=\"" << num(oy) << "\" data-sx=\"" << num(sx)
       << "\" data-sy=\"" << num(sy) << "\">\n";
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        if (s.style == PlotSeries::Style::markers) continue;
        const std::string color = s.color.empty() ? kPalette[i % 8] : s.color;
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" stroke-linejoin=\"round\"";
        if (s.style == PlotSeries::Style::dotted) os << " stroke-dasharray=\"2 3\"";
        os << " points=\"";
        for (std::size_t k = 0; k < s.points.size(); ++k)
            os << (k ? " " : "") << num(ox + s.points[k][0] * sx) << ',' << num(oy - s.points[k][1] * sy);
        os << "\"/>\n";
    }
    os << "</g>\n";
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        if (s.style != PlotSeries::Style::markers) continue;
        const std::string color = s.color.empty() ? kPalette[i % 8] : s.color;
        os << "<g class=\"markers\" fill=\"" << color << "\">\n";
        for (const auto& p : s.points) {
            const auto q = to_px(p);
            os << "<circle cx=\"" << px(q[0]) << "\" cy=\"" << px(q[1]) << "\" r=\"3.5\"/>\n";
        }
        os << "</g>\n";
    }
    os << "</g>\n";

    // legend
    double ly = kTop + 12;
    os << "<g class=\"legend\" font-size=\"11\">\n";
    for (std::size_t i = 0; i < plot.series.size(); ++i) {
        const auto& s = plot.series[i];
        if (s.label.empty()) continue;
        const std::string color = s.color.empty() ? kPalette[i % 8] : s.color;
        const double lx = kLeft + kPlotW - 150;
        if (s.style == PlotSeries::Style::markers)
            os << "<circle cx=\"" << px(lx + 10) << "\" cy=\"" << px(ly - 4) << "\" r=\"3.5\" fill=\"" << color
               << "\"/>\n";
        else
            os << "<line x1=\"" << px(lx) << "\" y1=\"" << px(ly - 4) << "\" x2=\"" << px(lx + 20) << "\" y2=\""
               << px(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"1.5\""
               << (s.style == PlotSeries::Style::dotted ? " stroke-dasharray=\"2 3\"" : "") << "/>\n";
        os << "<text x=\"" << px(lx + 26) << "\" y=\"" << px(ly) << "\">" << escape(s.label) << "</text>\n";
        ly += 15;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

std::vector<std::vector<Point2>> parse_svg_polylines(const std::string& svg)
{
    auto attr = [&](std::size_t from, std::size_t to, const std::string& name) -> std::optional<std::string> {
        const std::size_t a = svg.find(" " + name + "=\"", from);
        if (a == std::string::npos || a > to) return std::nullopt;
        const std::size_t start = a + name.size() + 3;
        return svg.substr(start, svg.find('"', start) - start);
    };
    std::vector<std::vector<Point2>> out;
    double ox = 0.0, oy = 0.0, sx = 1.0, sy = -1.0;  // identity until a data group says otherwise
    std::size_t pos = 0;
    while (true) {
        const std::size_t g = svg.find("<g class=\"data\"", pos);
        const std::size_t p = svg.find("<polyline", pos);
        if (p == std::string::npos) break;
        if (g != std::string::npos && g < p) {
            const std::size_t end = svg.find('>', g);
            ox = std::stod(attr(g, end, "data-ox").value_or("0"));
            oy = std::stod(attr(g, end, "data-oy").value_or("0"));
            sx = std::stod(attr(g, end, "data-sx").value_or("1"));
            sy = std::stod(attr(g, end, "data-sy").value_or("-1"));
            pos = end;
            continue;
        }
        const std::size_t end = svg.find("/>", p);
        std::vector<Point2> pts;
        if (auto body = attr(p, end, "points")) {
            std::replace(body->begin(), body->end(), ',', ' ');
            std::istringstream is(*body);
            double x = 0, y = 0;
            while (is >> x >> y) pts.push_back({(x - ox) / sx, (oy - y) / sy});
        }
        out.push_back(std::move(pts));
        pos = end;
    }
    return out;
}

std::string render_heatmap(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& values,
                           double cell, const std::string& title)
{
    if (x.size() != y.size() || x.size() != values.size())
        throw std::invalid_argument("render_heatmap: coordinate and value sizes differ");
    if (!(cell > 0)) throw std::invalid_argument("render_heatmap: cell size must be positive");
    double xlo = INFINITY, xhi = -INFINITY, ylo = INFINITY, yhi = -INFINITY, vmax = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xlo = std::min(xlo, x[i]);
        xhi = std::max(xhi, x[i]);
        ylo = std::min(ylo, y[i]);
        yhi = std::max(yhi, y[i]);
        vmax = std::max(vmax, std::abs(values[i]));
    }
    if (x.empty()) xlo = xhi = ylo = yhi = 0.0;
    if (vmax == 0.0) vmax = 1.0;
    const double side = 400.0;
    const double span = std::max(xhi - xlo, yhi - ylo) + cell;
    const double scale = side / span;
    const double left = 40.0;
    const double top = 50.0;

    auto colour = [&](double v) {
        // blue (negative) - white - red (positive)
        const double s = std::clamp(v / vmax, -1.0, 1.0);
        int r = 255, g = 255, b = 255;
        if (s > 0) {
            g = b = static_cast<int>(std::lround(255 * (1 - s)));
        } else {
            r = g = static_cast<int>(std::lround(255 * (1 + s)));
        }
        char buf[8];
        std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
        return std::string(buf);
    };

    std::ostringstream os;
    header(os, side + 2 * left + 60, side + top + 40);
    os << "<text x=\"" << px(left + side / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
       << "</text>\n<g class=\"cells\" stroke=\"none\">\n";
    const double w = cell * scale;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double cx = left + (x[i] - xlo + cell / 2) * scale;
        const double cy = top + (yhi - y[i] + cell / 2) * scale;
        os << "<rect x=\"" << px(cx - w / 2) << "\" y=\"" << px(cy - w / 2) << "\" width=\"" << px(w + 0.3)
           << "\" height=\"" << px(w + 0.3) << "\" fill=\"" << colour(values[i]) << "\"/>\n";
    }
    os << "</g>\n";
    // colour bar
    const double bx = left + side + 20;
    for (int k = 0; k < 20; ++k) {
        const double v = vmax * (1.0 - 2.0 * (k + 0.5) / 20.0);
        os << "<rect x=\"" << px(bx) << "\" y=\"" << px(top + k * side / 20) << "\" width=\"14\" height=\""
           << px(side / 20 + 0.3) << "\" fill=\"" << colour(v) << "\"/>\n";
    }
    os << "<text x=\"" << px(bx + 18) << "\" y=\"" << px(top + 10) << "\" font-size=\"10\">" << tick_label(vmax)
       << "</text>\n";
    os << "<text x=\"" << px(bx + 18) << "\" y=\"" << px(top + side) << "\" font-size=\"10\">" << tick_label(-vmax)
       << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

}  // namespace foldcont
