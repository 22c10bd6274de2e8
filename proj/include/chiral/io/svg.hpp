#pragma once

// Bare-bones line plots for eyeballing results. No styling beyond axes and a
// legend.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "chiral/io/csv.hpp"

namespace chiral::io {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

inline std::string svg_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                            const std::vector<Series>& series) {
    constexpr double w = 640, h = 420, left = 70, right = 20, top = 40, bottom = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    if (!(x1 > x0)) x1 = x0 + 1;
    if (!(y1 > y0)) y0 -= 0.5, y1 += 0.5;
    auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * (w - left - right); };
    auto py = [&](double y) { return h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

    std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" + title + "</text>\n";
    out += "<line x1=\"" + label(left) + "\" y1=\"" + label(h - bottom) + "\" x2=\"" + label(w - right) + "\" y2=\"" +
           label(h - bottom) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + label(left) + "\" y1=\"" + label(top) + "\" x2=\"" + label(left) + "\" y2=\"" +
           label(h - bottom) + "\" stroke=\"black\"/>\n";
    out += "<text x=\"320\" y=\"410\" text-anchor=\"middle\" font-size=\"13\">" + xlabel + "</text>\n";
    out += "<text x=\"16\" y=\"210\" font-size=\"13\" transform=\"rotate(-90 16 210)\" text-anchor=\"middle\">" + ylabel +
           "</text>\n";
    for (double f : {0.0, 0.5, 1.0}) {
        const double xv = x0 + f * (x1 - x0), yv = y0 + f * (y1 - y0);
        out += "<text x=\"" + label(px(xv)) + "\" y=\"" + label(h - bottom + 16) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + label(xv) + "</text>\n";
        out += "<text x=\"" + label(left - 4) + "\" y=\"" + label(py(yv) + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + label(yv) + "</text>\n";
    }
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* c = colors[k % 7];
        out += "<polyline fill=\"none\" stroke-width=\"1.2\" stroke=\"" + std::string(c) + "\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) out += label(px(s.x[i])) + "," + label(py(s.y[i])) + " ";
        out += "\"/>\n";
        out += "<text x=\"" + label(w - right - 150) + "\" y=\"" + label(top + 14 * (k + 1)) + "\" font-size=\"11\" fill=\"" +
               c + "\">" + s.name + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

}  // namespace chiral::io
