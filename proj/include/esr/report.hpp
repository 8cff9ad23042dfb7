#pragma once

// CSV and SVG renderers for tables, deviation curves and histograms.
// Numbers are printed in shortest round-trip form, so identical results
// give byte-identical files.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "esr/error.hpp"
#include "esr/functionals.hpp"
#include "esr/mc.hpp"

namespace esr::report {

inline std::string fmt(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string fmt(std::size_t v) { return std::to_string(v); }

inline std::string table1_csv(const std::vector<functionals::TableRow>& rows) {
    std::string out = "family,params,alpha,D,sigma\n";
    for (const auto& r : rows)
        out += r.family + ',' + r.params + ',' + fmt(r.alpha) + ',' + fmt(r.D) + ',' + fmt(r.sigma) + '\n';
    return out;
}

inline std::string curve_csv(const mc::DeviationCurve& curve) {
    std::string out = "N,p_hat,stderr,count\n";
    for (const auto& p : curve) out += fmt(p.n) + ',' + fmt(p.p_hat) + ',' + fmt(p.std_error) + ',' + fmt(p.count) + '\n';
    return out;
}

inline std::string histogram_csv(const mc::HistogramResult& h) {
    std::string out = "bin_left,bin_right,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        out += fmt(h.bin_edges[i]) + ',' + fmt(h.bin_edges[i + 1]) + ',' + fmt(h.counts[i]) + '\n';
    return out;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidParameter("out", "cannot write '" + path + "'");
    f << content;
    if (!f) throw InvalidParameter("out", "write failed for '" + path + "'");
}

// ---------------------------------------------------------------------------
// SVG

namespace detail {

inline constexpr double kW = 640, kH = 400, kPad = 50;
inline constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string header(const std::string& title) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" font-family=\"sans-serif\" "
           "font-size=\"12\">\n<rect width=\"640\" height=\"400\" fill=\"white\"/>\n<text x=\"320\" y=\"24\" "
           "text-anchor=\"middle\">" +
           title + "</text>\n<rect x=\"50\" y=\"50\" width=\"540\" height=\"300\" fill=\"none\" stroke=\"black\"/>\n";
}

inline std::string label(double x, double y, const std::string& s, const char* anchor = "middle") {
    return "<text x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" text-anchor=\"" + anchor + "\">" + s + "</text>\n";
}

} // namespace detail

struct Series {
    std::string name;
    mc::DeviationCurve curve;
};

/// Deviation curves on a log-scale probability axis. Zero probabilities are
/// dropped from the polyline.
inline std::string curves_svg(const std::string& title, const std::vector<Series>& series) {
    using namespace detail;
    double nmin = INFINITY, nmax = -INFINITY, pmin = INFINITY, pmax = -INFINITY;
    for (const auto& s : series)
        for (const auto& p : s.curve) {
            nmin = std::min(nmin, double(p.n));
            nmax = std::max(nmax, double(p.n));
            if (p.p_hat > 0) pmin = std::min(pmin, p.p_hat), pmax = std::max(pmax, p.p_hat);
        }
    if (!(nmin < nmax)) nmin -= 1, nmax += 1;
    if (!(pmin <= pmax)) pmin = 1e-6, pmax = 1;
    double lo = std::floor(std::log10(pmin)), hi = std::ceil(std::log10(pmax));
    if (!(lo < hi)) lo -= 1;
    auto px = [&](double n) { return kPad + (n - nmin) / (nmax - nmin) * (kW - 2 * kPad); };
    auto py = [&](double p) { return kH - kPad - (std::log10(p) - lo) / (hi - lo) * (kH - 2 * kPad); };

    std::string out = header(title);
    out += label(kPad, kH - kPad + 18, fmt(nmin)) + label(kW - kPad, kH - kPad + 18, fmt(nmax));
    for (double e = lo; e <= hi; e += 1) out += label(kPad - 6, py(std::pow(10.0, e)) + 4, "1e" + fmt(e), "end");
    for (std::size_t i = 0; i < series.size(); ++i) {
        const char* color = kColors[i % std::size(kColors)];
        std::string pts;
        for (const auto& p : series[i].curve)
            if (p.p_hat > 0) pts += fmt(px(double(p.n))) + ',' + fmt(py(p.p_hat)) + ' ';
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" points=\"" + pts + "\"/>\n";
        out += "<text x=\"" + fmt(kW - kPad - 4) + "\" y=\"" + fmt(kPad + 16 + 16 * double(i)) +
               "\" text-anchor=\"end\" fill=\"" + color + "\">" + series[i].name + "</text>\n";
    }
    return out + "</svg>\n";
}

inline std::string histogram_svg(const std::string& title, const mc::HistogramResult& h) {
    using namespace detail;
    const std::size_t peak = std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end()));
    const double lo = h.bin_edges.front(), hi = h.bin_edges.back();
    auto px = [&](double x) { return kPad + (x - lo) / (hi - lo) * (kW - 2 * kPad); };
    std::string out = header(title);
    out += label(kPad, kH - kPad + 18, fmt(lo)) + label(kW - kPad, kH - kPad + 18, fmt(hi));
    out += label(kPad - 6, kPad + 4, fmt(peak), "end");
    for (std::size_t i = 0; i < h.counts.size(); ++i) {
        const double height = double(h.counts[i]) / double(peak) * (kH - 2 * kPad);
        out += "<rect x=\"" + fmt(px(h.bin_edges[i])) + "\" y=\"" + fmt(kH - kPad - height) + "\" width=\"" +
               fmt(px(h.bin_edges[i + 1]) - px(h.bin_edges[i])) + "\" height=\"" + fmt(height) +
               "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
    }
    return out + "</svg>\n";
}

} // namespace esr::report
