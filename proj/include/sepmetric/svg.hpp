#pragma once

#include <sepmetric/classifier.hpp>
#include <sepmetric/detail/text.hpp>
#include <sepmetric/error.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cstdio>
#include <string>
#include <vector>

namespace sepmetric {

namespace detail {

// Deterministic palette, indexed by class id modulo its size.
inline constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline std::string fmt2(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", value);
    return buf;
}

inline std::string fmt_tick(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4g", value);
    return buf;
}

inline std::string xml_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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

struct AxisScale {
    double lo = 0.0;
    double hi = 1.0;
    double pixel_lo = 0.0;
    double pixel_hi = 1.0;

    double map(double value) const {
        return pixel_lo + (value - lo) / (hi - lo) * (pixel_hi - pixel_lo);
    }
};

inline AxisScale make_scale(double lo, double hi, double pixel_lo, double pixel_hi) {
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double pad = 0.05 * (hi - lo);
    return AxisScale{lo - pad, hi + pad, pixel_lo, pixel_hi};
}

inline void append_axes(std::string& svg, const AxisScale& x, const AxisScale& y,
                        const std::string& x_title, const std::string& y_title) {
    svg += "<g stroke=\"#333333\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fmt2(x.pixel_lo) + "\" y1=\"" + fmt2(y.pixel_lo) + "\" x2=\"" +
           fmt2(x.pixel_hi) + "\" y2=\"" + fmt2(y.pixel_lo) + "\"/>\n";
    svg += "<line x1=\"" + fmt2(x.pixel_lo) + "\" y1=\"" + fmt2(y.pixel_lo) + "\" x2=\"" +
           fmt2(x.pixel_lo) + "\" y2=\"" + fmt2(y.pixel_hi) + "\"/>\n";
    svg += "</g>\n";
    svg += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    constexpr int kTicks = 5;
    for (int t = 0; t <= kTicks; ++t) {
        const double fx = x.lo + (x.hi - x.lo) * t / kTicks;
        const double px = x.map(fx);
        svg += "<line x1=\"" + fmt2(px) + "\" y1=\"" + fmt2(y.pixel_lo) + "\" x2=\"" + fmt2(px) +
               "\" y2=\"" + fmt2(y.pixel_lo + 4) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt2(px) + "\" y=\"" + fmt2(y.pixel_lo + 16) +
               "\" text-anchor=\"middle\">" + fmt_tick(fx) + "</text>\n";
        const double fy = y.lo + (y.hi - y.lo) * t / kTicks;
        const double py = y.map(fy);
        svg += "<line x1=\"" + fmt2(x.pixel_lo - 4) + "\" y1=\"" + fmt2(py) + "\" x2=\"" +
               fmt2(x.pixel_lo) + "\" y2=\"" + fmt2(py) + "\" stroke=\"#333333\"/>\n";
        svg += "<text x=\"" + fmt2(x.pixel_lo - 6) + "\" y=\"" + fmt2(py + 4) +
               "\" text-anchor=\"end\">" + fmt_tick(fy) + "</text>\n";
    }
    const double mid_x = 0.5 * (x.pixel_lo + x.pixel_hi);
    const double mid_y = 0.5 * (y.pixel_lo + y.pixel_hi);
    svg += "<text x=\"" + fmt2(mid_x) + "\" y=\"" + fmt2(y.pixel_lo + 34) +
           "\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(x_title) + "</text>\n";
    svg += "<text x=\"16\" y=\"" + fmt2(mid_y) + "\" text-anchor=\"middle\" font-size=\"13\" " +
           "transform=\"rotate(-90 16 " + fmt2(mid_y) + ")\">" + xml_escape(y_title) +
           "</text>\n";
    svg += "</g>\n";
}

} // namespace detail

/// 2-D embedding scatter: one color per class id, legend of class
/// names. Byte-deterministic for identical input.
inline void write_embedding_scatter_svg(const std::string& path, const Eigen::MatrixXd& points,
                                        const std::vector<int>& labels,
                                        const std::vector<std::string>& class_names) {
    if (points.cols() != 2) {
        throw ValidationError("plot: embedding must be 2-D, got d=" +
                              std::to_string(points.cols()));
    }
    if (points.rows() == 0 || labels.size() != static_cast<std::size_t>(points.rows())) {
        throw ValidationError("plot: empty embedding or label mismatch");
    }
    const double width = 720.0;
    const double height = 520.0;
    const detail::AxisScale x =
        detail::make_scale(points.col(0).minCoeff(), points.col(0).maxCoeff(), 60.0, width - 160.0);
    const detail::AxisScale y =
        detail::make_scale(points.col(1).minCoeff(), points.col(1).maxCoeff(), height - 50.0, 20.0);

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(width) +
           "\" height=\"" + detail::fmt2(height) + "\" viewBox=\"0 0 " + detail::fmt2(width) +
           " " + detail::fmt2(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    detail::append_axes(svg, x, y, "z0", "z1");
    svg += "<g class=\"points\">\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const int label = labels[static_cast<std::size_t>(i)];
        svg += "<circle cx=\"" + detail::fmt2(x.map(points(i, 0))) + "\" cy=\"" +
               detail::fmt2(y.map(points(i, 1))) + "\" r=\"3\" fill=\"" +
               detail::kPalette[static_cast<std::size_t>(label) % detail::kPalette.size()] +
               "\" fill-opacity=\"0.75\"/>\n";
    }
    svg += "</g>\n";
    svg += "<g class=\"legend\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">\n";
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        const double ly = 30.0 + 18.0 * static_cast<double>(c);
        svg += "<circle cx=\"" + detail::fmt2(width - 140.0) + "\" cy=\"" + detail::fmt2(ly) +
               "\" r=\"4\" fill=\"" + detail::kPalette[c % detail::kPalette.size()] + "\"/>\n";
        svg += "<text x=\"" + detail::fmt2(width - 130.0) + "\" y=\"" + detail::fmt2(ly + 4.0) +
               "\">" + detail::xml_escape(class_names[c]) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    detail::write_text_file(path, svg);
}

/// Metric-versus-accuracy scatter: one labeled point per representation,
/// A on the horizontal axis and test accuracy on the vertical axis.
inline void write_correlation_scatter_svg(const std::string& path,
                                          const std::vector<RepresentationRecord>& records) {
    if (records.empty()) {
        throw ValidationError("compare plot: no records");
    }
    double lo_a = 1.0;
    double hi_a = 0.0;
    double lo_acc = 1.0;
    double hi_acc = 0.0;
    for (const RepresentationRecord& record : records) {
        lo_a = std::min(lo_a, record.metric_a);
        hi_a = std::max(hi_a, record.metric_a);
        lo_acc = std::min(lo_acc, record.test_accuracy);
        hi_acc = std::max(hi_acc, record.test_accuracy);
    }
    const double width = 640.0;
    const double height = 480.0;
    const detail::AxisScale x = detail::make_scale(lo_a, hi_a, 60.0, width - 30.0);
    const detail::AxisScale y = detail::make_scale(lo_acc, hi_acc, height - 50.0, 20.0);

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::fmt2(width) +
           "\" height=\"" + detail::fmt2(height) + "\" viewBox=\"0 0 " + detail::fmt2(width) +
           " " + detail::fmt2(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    detail::append_axes(svg, x, y, "metric A (train)", "test accuracy");
    svg += "<g class=\"points\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\">\n";
    for (const RepresentationRecord& record : records) {
        const double px = x.map(record.metric_a);
        const double py = y.map(record.test_accuracy);
        svg += "<circle cx=\"" + detail::fmt2(px) + "\" cy=\"" + detail::fmt2(py) +
               "\" r=\"4\" fill=\"" + detail::kPalette[0] + "\"/>\n";
        svg += "<text x=\"" + detail::fmt2(px + 7.0) + "\" y=\"" + detail::fmt2(py + 4.0) + "\">" +
               detail::xml_escape(record.name) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    detail::write_text_file(path, svg);
}

} // namespace sepmetric
