// io.hpp — CSV, JSON and SVG emission.

#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tarrow/common.hpp"
#include "tarrow/green.hpp"

namespace tarrow::io {

// Shortest round-trip is not needed; 17 significant digits always round-trips a double.
inline std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; // one vector per column

    void add(std::string name, std::vector<double> values) {
        if (!data.empty()) require(values.size() == data.front().size(), "CSV columns must have equal length");
        columns.push_back(std::move(name));
        data.push_back(std::move(values));
    }
    std::size_t rows() const { return data.empty() ? 0 : data.front().size(); }
};

inline std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
    out += '\n';
    for (std::size_t r = 0; r < t.rows(); ++r) {
        for (std::size_t c = 0; c < t.columns.size(); ++c) {
            if (c) out += ',';
            out += number(t.data[c][r]);
        }
        out += '\n';
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path);
}

inline nlohmann::json poles_json(const std::vector<green::Pole>& poles, double epsilon) {
    auto arr = nlohmann::json::array();
    for (const auto& p : poles) {
        arr.push_back({{"re", p.pole.real()},
                       {"im", p.pole.imag()},
                       {"residue_re", p.residue.real()},
                       {"residue_im", p.residue.imag()},
                       {"half_plane", p.pole.imag() < 0.0 ? "lower" : (p.pole.imag() > 0.0 ? "upper" : "real")},
                       {"im_over_eps", epsilon != 0.0 ? std::abs(p.pole.imag()) / std::abs(epsilon) : 0.0}});
    }
    return arr;
}

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Static line plot; one <polyline> per curve.
inline std::string svg_plot(const std::vector<Curve>& curves, double x_min, double x_max, const std::string& x_label,
                            const std::string& y_label) {
    const double width = 800.0, height = 500.0, left = 70.0, right = 150.0, top = 20.0, bottom = 50.0;
    double y_max = 0.0;
    for (const auto& c : curves) {
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (c.x[i] >= x_min && c.x[i] <= x_max) y_max = std::max(y_max, c.y[i]);
        }
    }
    if (y_max <= 0.0) y_max = 1.0;
    auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (width - left - right); };
    auto py = [&](double y) { return height - bottom - y / y_max * (height - top - bottom); };
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    s += "<line x1=\"" + number(left) + "\" y1=\"" + number(height - bottom) + "\" x2=\"" + number(width - right) +
         "\" y2=\"" + number(height - bottom) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + number(left) + "\" y1=\"" + number(top) + "\" x2=\"" + number(left) + "\" y2=\"" +
         number(height - bottom) + "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double x = x_min + (x_max - x_min) * k / 4.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", x);
        s += "<text x=\"" + number(px(x)) + "\" y=\"" + number(height - bottom + 20) +
             "\" font-size=\"12\" text-anchor=\"middle\">" + buf + "</text>\n";
    }
    s += "<text x=\"" + number((left + width - right) / 2) + "\" y=\"" + number(height - 10) +
         "\" font-size=\"14\" text-anchor=\"middle\">" + x_label + "</text>\n";
    s += "<text x=\"20\" y=\"" + number(height / 2) + "\" font-size=\"14\" transform=\"rotate(-90 20 " +
         number(height / 2) + ")\" text-anchor=\"middle\">" + y_label + "</text>\n";
    for (std::size_t c = 0; c < curves.size(); ++c) {
        const auto& cv = curves[c];
        std::string pts;
        // Thin very long curves to at most ~4000 vertices, keeping local maxima.
        const std::size_t stride = std::max<std::size_t>(1, cv.x.size() / 4000);
        for (std::size_t i = 0; i < cv.x.size(); i += stride) {
            std::size_t pick = i;
            for (std::size_t k = i; k < std::min(cv.x.size(), i + stride); ++k) {
                if (cv.y[k] > cv.y[pick]) pick = k;
            }
            if (cv.x[pick] < x_min || cv.x[pick] > x_max) continue;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(cv.x[pick]), py(cv.y[pick]));
            pts += buf;
        }
        const char* color = colors[c % 5];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"" + pts +
             "\"/>\n";
        s += "<text x=\"" + number(width - right + 10) + "\" y=\"" + number(top + 20 + 20.0 * c) +
             "\" font-size=\"13\" fill=\"" + color + "\">" + cv.label + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace tarrow::io
