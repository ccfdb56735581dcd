// Copyright 2026 The nla-weaksim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace nla::cli {

namespace {

constexpr const char* kPalette[] = {"#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400", "#555555"};

// Plot area inside a 640x420 canvas.
constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string xml_escape(std::string_view s) {
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
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish(bool include_zero) {
        if (!std::isfinite(lo)) lo = hi = 0.0;
        if (include_zero) lo = std::min(lo, 0.0);
        if (hi - lo <= 0.0) {
            const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_escape(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
    for (const auto& h : header) append(h);
    end_row();
    rows_ = 0;
}

void CsvWriter::append(std::string_view text) {
    if (current_ >= columns_) throw std::logic_error("CsvWriter: too many fields in row");
    if (current_ > 0) out_ += ',';
    out_ += csv_escape(text);
    ++current_;
}

CsvWriter& CsvWriter::field(std::string_view text) {
    append(text);
    return *this;
}

CsvWriter& CsvWriter::field(double v) {
    append(format_number(v));
    return *this;
}

CsvWriter& CsvWriter::field(bool v) {
    append(v ? "1" : "0");
    return *this;
}

void CsvWriter::end_row() {
    if (current_ != columns_) throw std::logic_error("CsvWriter: row has the wrong number of fields");
    out_ += "\r\n";
    current_ = 0;
    ++rows_;
}

std::string CsvWriter::str() const { return out_; }

std::string render_svg(const Plot& plot) {
    Range xr, yr;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
            if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                xr.add(s.x[i]);
                yr.add(s.y[i]);
            }
        }
    }
    xr.finish(false);
    yr.finish(true);

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) +
           "\" viewBox=\"0 0 " + fixed(kWidth) + " " + fixed(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed(kWidth) + "\" height=\"" + fixed(kHeight) + "\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           xml_escape(plot.title) + "</text>\n";

    // Axes with five ticks each.
    svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    svg += "<rect x=\"" + fixed(kLeft) + "\" y=\"" + fixed(kTop) + "\" width=\"" + fixed(pw) + "\" height=\"" +
           fixed(ph) + "\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double tx = kLeft + pw * k / 4.0;
        const double ty = kTop + ph * k / 4.0;
        svg += "<line x1=\"" + fixed(tx) + "\" y1=\"" + fixed(kTop + ph) + "\" x2=\"" + fixed(tx) + "\" y2=\"" +
               fixed(kTop + ph + 5) + "\"/>\n";
        svg += "<line x1=\"" + fixed(kLeft - 5) + "\" y1=\"" + fixed(ty) + "\" x2=\"" + fixed(kLeft) + "\" y2=\"" +
               fixed(ty) + "\"/>\n";
    }
    svg += "</g>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double yv = yr.hi - (yr.hi - yr.lo) * k / 4.0;
        svg += "<text x=\"" + fixed(kLeft + pw * k / 4.0) + "\" y=\"" + fixed(kTop + ph + 18) +
               "\" text-anchor=\"middle\">" + format_number(xv) + "</text>\n";
        svg += "<text x=\"" + fixed(kLeft - 8) + "\" y=\"" + fixed(kTop + ph * k / 4.0 + 4) +
               "\" text-anchor=\"end\">" + format_number(yv) + "</text>\n";
    }
    svg += "<text x=\"" + fixed(kLeft + pw / 2) + "\" y=\"" + fixed(kHeight - 15) + "\" text-anchor=\"middle\">" +
           xml_escape(plot.x_label) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fixed(kTop + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fixed(kTop + ph / 2) + ")\">" + xml_escape(plot.y_label) + "</text>\n";

    int legend_row = 0;
    for (const auto& s : plot.series) {
        const std::string color = kPalette[static_cast<std::size_t>(s.color) % std::size(kPalette)];
        if (s.style == LineStyle::markers) {
            svg += "<g fill=\"" + color + "\">\n";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                svg += "<circle cx=\"" + fixed(px(s.x[i])) + "\" cy=\"" + fixed(py(s.y[i])) + "\" r=\"3\"/>\n";
            }
            svg += "</g>\n";
        } else {
            std::string points;
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (!points.empty()) points += ' ';
                points += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
            }
            svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
            if (s.style == LineStyle::dashed) svg += " stroke-dasharray=\"6,4\"";
            svg += " points=\"" + points + "\"/>\n";
        }

        const double ly = kTop + 10 + 18 * legend_row++;
        const double lx = kWidth - kRight + 12;
        if (s.style == LineStyle::markers) {
            svg += "<circle cx=\"" + fixed(lx + 10) + "\" cy=\"" + fixed(ly) + "\" r=\"3\" fill=\"" + color + "\"/>\n";
        } else {
            svg += "<line x1=\"" + fixed(lx) + "\" y1=\"" + fixed(ly) + "\" x2=\"" + fixed(lx + 20) + "\" y2=\"" +
                   fixed(ly) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"" +
                   (s.style == LineStyle::dashed ? " stroke-dasharray=\"6,4\"" : "") + "/>\n";
        }
        svg += "<text x=\"" + fixed(lx + 26) + "\" y=\"" + fixed(ly + 4) + "\">" + xml_escape(s.label) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace nla::cli
