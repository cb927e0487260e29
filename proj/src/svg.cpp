#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "stats.hpp"

namespace contagion {

namespace {

constexpr int width = 800;
constexpr int height = 600;
constexpr int margin_left = 72;
constexpr int margin_right = 24;
constexpr int margin_top = 44;
constexpr int margin_bottom = 56;

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

// Tick spacing from the 1-2-5 ladder, aiming for about five intervals.
double nice_step(double range) {
    if (!(range > 0.0))
        return 1.0;
    const double raw = range / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    double nice = 10.0;
    if (frac <= 1.5)
        nice = 1.0;
    else if (frac <= 3.5)
        nice = 2.0;
    else if (frac <= 7.5)
        nice = 5.0;
    return nice * mag;
}

struct Axis {
    double lo = 0.0;
    double hi = 1.0;
    double span() const { return hi - lo; }
};

Axis padded(double lo, double hi) {
    if (!(hi > lo)) { // single value or empty spread: open a unit window
        const double c = (lo + hi) / 2.0;
        const double half = std::max(std::abs(c) * 0.05, 0.5);
        return {c - half, c + half};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace

std::string render_chart(const SvgChart& chart) {
    for (const SvgSeries& s : chart.series)
        if (s.x.size() != s.y.size())
            throw error(errc::invalid_argument, "series x/y lengths differ");

    Axis ax, ay;
    if (chart.fixed_range) {
        ax = {(*chart.fixed_range)[0], (*chart.fixed_range)[1]};
        ay = {(*chart.fixed_range)[2], (*chart.fixed_range)[3]};
    } else {
        double xlo = std::numeric_limits<double>::infinity(), xhi = -xlo;
        double ylo = xlo, yhi = -xlo;
        for (const SvgSeries& s : chart.series)
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                xlo = std::min(xlo, s.x[i]);
                xhi = std::max(xhi, s.x[i]);
                ylo = std::min(ylo, s.y[i]);
                yhi = std::max(yhi, s.y[i]);
            }
        if (!(xlo <= xhi)) { // no points at all
            xlo = 0.0;
            xhi = 1.0;
            ylo = 0.0;
            yhi = 1.0;
        }
        ax = padded(xlo, xhi);
        ay = padded(ylo, yhi);
    }

    const double plot_w = width - margin_left - margin_right;
    const double plot_h = height - margin_top - margin_bottom;
    auto px = [&](double x) { return margin_left + (x - ax.lo) / ax.span() * plot_w; };
    auto py = [&](double y) { return margin_top + (ay.hi - y) / ay.span() * plot_h; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
    out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"13\" fill=\"#222\">\n";

    if (!chart.title.empty())
        out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
            << escape(chart.title) << "</text>\n";

    // Gridlines and tick labels.
    const double xstep = nice_step(ax.span());
    const double ystep = nice_step(ay.span());
    out << "<g stroke=\"#ddd\" stroke-width=\"1\">\n";
    for (double t = std::ceil(ax.lo / xstep) * xstep; t <= ax.hi + 1e-9 * xstep; t += xstep)
        out << "<line x1=\"" << fmt(px(t), "%.2f") << "\" y1=\"" << fmt(py(ay.lo), "%.2f")
            << "\" x2=\"" << fmt(px(t), "%.2f") << "\" y2=\"" << fmt(py(ay.hi), "%.2f")
            << "\"/>\n";
    for (double t = std::ceil(ay.lo / ystep) * ystep; t <= ay.hi + 1e-9 * ystep; t += ystep)
        out << "<line x1=\"" << fmt(px(ax.lo), "%.2f") << "\" y1=\"" << fmt(py(t), "%.2f")
            << "\" x2=\"" << fmt(px(ax.hi), "%.2f") << "\" y2=\"" << fmt(py(t), "%.2f")
            << "\"/>\n";
    out << "</g>\n";
    for (double t = std::ceil(ax.lo / xstep) * xstep; t <= ax.hi + 1e-9 * xstep; t += xstep)
        out << "<text x=\"" << fmt(px(t), "%.2f") << "\" y=\"" << fmt(py(ay.lo) + 18.0, "%.2f")
            << "\" text-anchor=\"middle\">" << fmt(t) << "</text>\n";
    for (double t = std::ceil(ay.lo / ystep) * ystep; t <= ay.hi + 1e-9 * ystep; t += ystep)
        out << "<text x=\"" << fmt(px(ax.lo) - 8.0, "%.2f") << "\" y=\""
            << fmt(py(t) + 4.0, "%.2f") << "\" text-anchor=\"end\">" << fmt(t) << "</text>\n";

    // Frame.
    out << "<rect x=\"" << margin_left << "\" y=\"" << margin_top << "\" width=\""
        << fmt(plot_w, "%.0f") << "\" height=\"" << fmt(plot_h, "%.0f")
        << "\" fill=\"none\" stroke=\"#444\"/>\n";

    if (!chart.x_label.empty())
        out << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"" << height - 14
            << "\" text-anchor=\"middle\">" << escape(chart.x_label) << "</text>\n";
    if (!chart.y_label.empty())
        out << "<text x=\"18\" y=\"" << margin_top + plot_h / 2
            << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
            << fmt(margin_top + plot_h / 2, "%.0f") << ")\">" << escape(chart.y_label)
            << "</text>\n";

    // Data, clipped to the frame.
    out << "<clipPath id=\"plot\"><rect x=\"" << margin_left << "\" y=\"" << margin_top
        << "\" width=\"" << fmt(plot_w, "%.0f") << "\" height=\"" << fmt(plot_h, "%.0f")
        << "\"/></clipPath>\n";
    out << "<g clip-path=\"url(#plot)\">\n";
    for (const SvgSeries& s : chart.series) {
        if (s.draw_line && s.x.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color
                << "\" stroke-width=\"1.8\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (i)
                    out << ' ';
                out << fmt(px(s.x[i]), "%.2f") << ',' << fmt(py(s.y[i]), "%.2f");
            }
            out << "\"/>\n";
        }
        if (s.draw_markers)
            for (std::size_t i = 0; i < s.x.size(); ++i)
                out << "<circle cx=\"" << fmt(px(s.x[i]), "%.2f") << "\" cy=\""
                    << fmt(py(s.y[i]), "%.2f") << "\" r=\"3.5\" fill=\"" << s.color
                    << "\" fill-opacity=\"0.85\"/>\n";
    }
    out << "</g>\n";

    // Legend for labeled series, top-right inside the frame.
    int row = 0;
    for (const SvgSeries& s : chart.series) {
        if (s.label.empty())
            continue;
        const double lx = width - margin_right - 170.0;
        const double ly = margin_top + 16.0 + 18.0 * row++;
        out << "<line x1=\"" << fmt(lx, "%.0f") << "\" y1=\"" << fmt(ly - 4.0, "%.0f")
            << "\" x2=\"" << fmt(lx + 22.0, "%.0f") << "\" y2=\"" << fmt(ly - 4.0, "%.0f")
            << "\" stroke=\"" << s.color << "\" stroke-width=\"3\"/>\n";
        out << "<text x=\"" << fmt(lx + 28.0, "%.0f") << "\" y=\"" << fmt(ly, "%.0f") << "\">"
            << escape(s.label) << "</text>\n";
    }

    out << "</g>\n</svg>\n";
    return out.str();
}

std::string render_scatter_with_fit(const std::string& title, const std::string& x_label,
                                    const std::string& y_label, std::span<const double> xs,
                                    std::span<const double> ys,
                                    std::span<const std::string> point_labels) {
    if (xs.size() != ys.size())
        throw error(errc::invalid_argument, "scatter x/y lengths differ");
    if (!point_labels.empty() && point_labels.size() != xs.size())
        throw error(errc::invalid_argument, "point label count does not match the data");

    SvgChart chart;
    chart.title = title;
    chart.x_label = x_label;
    chart.y_label = y_label;

    SvgSeries points;
    points.x.assign(xs.begin(), xs.end());
    points.y.assign(ys.begin(), ys.end());
    points.color = "#b2401f";

    // Pin the axis ranges to the data so the label pass below shares the
    // exact pixel mapping render_chart uses (the fit line may poke past the
    // data's y-range and would otherwise shift the auto-range).
    const auto [xmin, xmax] = std::minmax_element(xs.begin(), xs.end());
    const auto [ymin, ymax] = std::minmax_element(ys.begin(), ys.end());
    const Axis ax = padded(xs.empty() ? 0.0 : *xmin, xs.empty() ? 1.0 : *xmax);
    const Axis ay = padded(ys.empty() ? 0.0 : *ymin, ys.empty() ? 1.0 : *ymax);
    chart.fixed_range = std::array<double, 4>{ax.lo, ax.hi, ay.lo, ay.hi};

    std::string annotation;
    if (xs.size() >= 3) {
        const RegressionResult line = ols(xs, ys);
        const CorrelationResult corr = pearson(xs, ys);
        SvgSeries fit;
        fit.x = {*xmin, *xmax};
        fit.y = {line.B_hat + line.C_hat * *xmin, line.B_hat + line.C_hat * *xmax};
        fit.draw_line = true;
        fit.draw_markers = false;
        chart.series.push_back(std::move(fit));
        annotation = "rho = " + fmt(corr.rho, "%.3f") + ", p = " + fmt(corr.p, "%.3g");
    }
    chart.series.push_back(std::move(points));

    std::string svg = render_chart(chart);

    // Slip the annotation and per-point labels in before the closing tags.
    std::ostringstream extra;
    if (!annotation.empty())
        extra << "<text x=\"" << margin_left + 12 << "\" y=\"" << margin_top + 18
              << "\" font-style=\"italic\">" << escape(annotation) << "</text>\n";
    if (!point_labels.empty()) {
        const double plot_w = width - margin_left - margin_right;
        const double plot_h = height - margin_top - margin_bottom;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double cx = margin_left + (xs[i] - ax.lo) / ax.span() * plot_w;
            const double cy = margin_top + (ay.hi - ys[i]) / ay.span() * plot_h;
            extra << "<text x=\"" << fmt(cx + 6.0, "%.2f") << "\" y=\"" << fmt(cy - 6.0, "%.2f")
                  << "\" font-size=\"11\">" << escape(point_labels[i]) << "</text>\n";
        }
    }
    const std::string tail = "</g>\n</svg>\n";
    svg.insert(svg.size() - tail.size(), extra.str());
    return svg;
}

} // namespace contagion
