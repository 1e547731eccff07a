#include "svg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "trajbench/errors.hpp"
#include "trajbench/text.hpp"

namespace trajbench::tools {

namespace {

constexpr const char* kRealColor = "#3b6fb6";
constexpr const char* kSyntheticColor = "#d97a2a";

std::string num(double v) { return format_double(v); }

std::string fixed2(double v) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", v);
    return buffer;
}

std::string escape_text(const std::string& text) {
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

std::string svg_open(double width, double height) {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) +
           "\" font-family=\"sans-serif\">\n";
}

std::string text_at(double x, double y, const std::string& body, const std::string& attrs) {
    return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" " + attrs + ">" + escape_text(body) +
           "</text>\n";
}

// Step-outline path over the bin tops, closed down to the baseline. Both
// series run through here, so equal counts yield byte-equal path data.
std::string histogram_path(const std::vector<double>& density, double left, double base,
                           double bin_width, double y_scale) {
    std::string d = "M" + num(left) + "," + num(base);
    double x = left;
    for (double dens : density) {
        const double y = base - dens * y_scale;
        d += " L" + num(x) + "," + num(y);
        x += bin_width;
        d += " L" + num(x) + "," + num(y);
    }
    d += " L" + num(x) + "," + num(base) + " Z";
    return d;
}

std::vector<double> to_density(const std::vector<double>& counts, double bin_width) {
    double total = 0.0;
    for (double c : counts) total += c;
    std::vector<double> density(counts.size(), 0.0);
    if (total <= 0.0) return density;
    for (std::size_t i = 0; i < counts.size(); ++i) density[i] = counts[i] / (total * bin_width);
    return density;
}

std::string numeric_marginal_svg(const MarginalMetric& metric, const MarginalDistribution& dist) {
    const double width = 520, height = 320;
    const double left = 52, right = width - 16, top = 40, base = height - 42;
    const std::size_t bins = dist.real_counts.size();
    const double span = dist.hi - dist.lo;
    const double bin_width = span / static_cast<double>(bins);
    const double px_per_bin = (right - left) / static_cast<double>(bins);

    const std::vector<double> real = to_density(dist.real_counts, bin_width);
    const std::vector<double> synthetic = to_density(dist.synthetic_counts, bin_width);
    double peak = 0.0;
    for (double v : real) peak = std::max(peak, v);
    for (double v : synthetic) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    const double y_scale = (base - top) / peak;

    std::string svg = svg_open(width, height);
    svg += text_at(left, 22, dist.feature, "font-size=\"14\" font-weight=\"bold\"");
    svg += text_at(right, 22, metric.kind + " = " + fixed2(metric.value),
                   "font-size=\"12\" text-anchor=\"end\"");
    svg += "<path class=\"series-real\" d=\"" +
           histogram_path(real, left, base, px_per_bin, y_scale) + "\" fill=\"" + kRealColor +
           "\" fill-opacity=\"0.35\" stroke=\"" + std::string(kRealColor) + "\"/>\n";
    svg += "<path class=\"series-synthetic\" d=\"" +
           histogram_path(synthetic, left, base, px_per_bin, y_scale) + "\" fill=\"" +
           kSyntheticColor + "\" fill-opacity=\"0.35\" stroke=\"" + std::string(kSyntheticColor) +
           "\"/>\n";
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(base) + "\" x2=\"" + num(right) +
           "\" y2=\"" + num(base) + "\" stroke=\"#444\"/>\n";
    svg += text_at(left, base + 16, fixed2(dist.lo), "font-size=\"10\"");
    svg += text_at(right, base + 16, fixed2(dist.hi), "font-size=\"10\" text-anchor=\"end\"");
    svg += text_at(left, height - 8,
                   "real (n=" + std::to_string(metric.n_real) + ")", "font-size=\"11\" fill=\"" +
                   std::string(kRealColor) + "\"");
    svg += text_at(right, height - 8,
                   "synthetic (n=" + std::to_string(metric.n_synthetic) + ")",
                   "font-size=\"11\" text-anchor=\"end\" fill=\"" + std::string(kSyntheticColor) + "\"");
    svg += "</svg>\n";
    return svg;
}

std::string categorical_marginal_svg(const MarginalMetric& metric, const MarginalDistribution& dist) {
    const double width = 520, height = 320;
    const double left = 52, right = width - 16, top = 40, base = height - 56;
    const std::size_t levels = dist.levels.size();
    const double slot = (right - left) / static_cast<double>(levels);
    const double bar = slot * 0.34;

    const std::vector<double> real = to_density(dist.real_counts, 1.0);
    const std::vector<double> synthetic = to_density(dist.synthetic_counts, 1.0);
    double peak = 0.0;
    for (double v : real) peak = std::max(peak, v);
    for (double v : synthetic) peak = std::max(peak, v);
    if (peak <= 0.0) peak = 1.0;
    const double y_scale = (base - top) / peak;

    std::string svg = svg_open(width, height);
    svg += text_at(left, 22, dist.feature, "font-size=\"14\" font-weight=\"bold\"");
    svg += text_at(right, 22, metric.kind + " = " + fixed2(metric.value),
                   "font-size=\"12\" text-anchor=\"end\"");
    for (std::size_t k = 0; k < levels; ++k) {
        const double x0 = left + slot * static_cast<double>(k) + slot * 0.12;
        auto bar_rect = [&](double x, double freq, const char* color, const char* series) {
            const double h = freq * y_scale;
            return "<rect class=\"" + std::string(series) + "\" x=\"" + num(x) + "\" y=\"" +
                   num(base - h) + "\" width=\"" + num(bar) + "\" height=\"" + num(h) +
                   "\" fill=\"" + color + "\"/>\n";
        };
        svg += bar_rect(x0, real[k], kRealColor, "series-real");
        svg += bar_rect(x0 + bar, synthetic[k], kSyntheticColor, "series-synthetic");
        svg += text_at(left + slot * (static_cast<double>(k) + 0.5), base + 15, dist.levels[k],
                       "font-size=\"9\" text-anchor=\"middle\"");
    }
    svg += "<line x1=\"" + num(left) + "\" y1=\"" + num(base) + "\" x2=\"" + num(right) +
           "\" y2=\"" + num(base) + "\" stroke=\"#444\"/>\n";
    svg += text_at(left, height - 8, "real (n=" + std::to_string(metric.n_real) + ")",
                   "font-size=\"11\" fill=\"" + std::string(kRealColor) + "\"");
    svg += text_at(right, height - 8, "synthetic (n=" + std::to_string(metric.n_synthetic) + ")",
                   "font-size=\"11\" text-anchor=\"end\" fill=\"" + std::string(kSyntheticColor) + "\"");
    svg += "</svg>\n";
    return svg;
}

std::string tile_color(double value) {
    // Blue for negative, red for positive, white at zero.
    const double t = std::min(1.0, std::abs(value));
    int r, g, b;
    if (value >= 0.0) {
        r = 255 - static_cast<int>(std::lround(t * (255 - 215)));
        g = 255 - static_cast<int>(std::lround(t * (255 - 48)));
        b = 255 - static_cast<int>(std::lround(t * (255 - 39)));
    } else {
        r = 255 - static_cast<int>(std::lround(t * (255 - 69)));
        g = 255 - static_cast<int>(std::lround(t * (255 - 117)));
        b = 255 - static_cast<int>(std::lround(t * (255 - 180)));
    }
    return "rgb(" + std::to_string(r) + "," + std::to_string(g) + "," + std::to_string(b) + ")";
}

}  // namespace

std::string marginal_svg(const MarginalMetric& metric, const MarginalDistribution& dist) {
    if (dist.levels.empty() && dist.real_counts.empty()) {
        throw ContractError("marginal_svg: distribution has no bins");
    }
    return dist.levels.empty() ? numeric_marginal_svg(metric, dist)
                               : categorical_marginal_svg(metric, dist);
}

std::string heatmap_svg(const std::string& title, const AssociationMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (n == 0) throw ContractError("heatmap_svg: empty matrix");
    const double cell = 36;
    const double left = 130, top = 110;
    const double width = left + cell * static_cast<double>(n) + 16;
    const double height = top + cell * static_cast<double>(n) + 16;

    std::string svg = svg_open(width, height);
    svg += "<defs><pattern id=\"hatch\" width=\"6\" height=\"6\" patternUnits=\"userSpaceOnUse\">"
           "<rect width=\"6\" height=\"6\" fill=\"#f4f4f4\"/>"
           "<path d=\"M0 6 L6 0\" stroke=\"#b0b0b0\" stroke-width=\"1\"/></pattern></defs>\n";
    svg += text_at(12, 24, title, "font-size=\"14\" font-weight=\"bold\"");

    for (std::size_t k = 0; k < n; ++k) {
        const double cx = left + cell * (static_cast<double>(k) + 0.5);
        svg += "<text x=\"" + num(cx) + "\" y=\"" + num(top - 8) + "\" font-size=\"10\" " +
               "text-anchor=\"start\" transform=\"rotate(-55 " + num(cx) + " " + num(top - 8) +
               ")\">" + escape_text(matrix.feature_names[k]) + "</text>\n";
        svg += text_at(left - 8, top + cell * (static_cast<double>(k) + 0.62),
                       matrix.feature_names[k], "font-size=\"10\" text-anchor=\"end\"");
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            const double x = left + cell * static_cast<double>(k);
            const double y = top + cell * static_cast<double>(i);
            const AssociationValue& v = matrix.at(i, k);
            const std::string fill = v.defined ? tile_color(v.value) : "url(#hatch)";
            svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
                   "\" height=\"" + num(cell) + "\" fill=\"" + fill +
                   "\" stroke=\"#ffffff\" stroke-width=\"1\">";
            if (!v.defined && !v.undefined_reason.empty()) {
                svg += "<title>" + escape_text(v.undefined_reason) + "</title>";
            }
            svg += "</rect>\n";
            if (v.defined) {
                svg += text_at(x + cell / 2, y + cell / 2 + 4, fixed2(v.value),
                               "class=\"tile-label\" font-size=\"9\" text-anchor=\"middle\"");
            }
        }
    }
    svg += "</svg>\n";
    return svg;
}

std::string sanitize_file_stem(const std::string& name) {
    std::string out;
    for (char c : name) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        } else {
            out += '_';
        }
    }
    return out.empty() ? std::string("feature") : out;
}

std::vector<std::string> emit_plots(const RunReport& report, const std::filesystem::path& dir) {
    if (report.distributions.size() != report.fidelity.marginals.size()) {
        throw ContractError("emit_plots: marginal metrics and distributions do not line up");
    }
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (std::size_t m = 0; m < report.fidelity.marginals.size(); ++m) {
        char index[8];
        std::snprintf(index, sizeof(index), "%02zu", m);
        const std::string name = "marginal_" + std::string(index) + "_" +
                                 sanitize_file_stem(report.fidelity.marginals[m].feature) + ".svg";
        atomic_write_file(dir / name, marginal_svg(report.fidelity.marginals[m], report.distributions[m]));
        written.push_back(name);
    }
    atomic_write_file(dir / "heatmap_real.svg",
                      heatmap_svg("real associations", report.fidelity.real_associations));
    written.push_back("heatmap_real.svg");
    atomic_write_file(dir / "heatmap_synth.svg",
                      heatmap_svg("synthetic associations", report.fidelity.synthetic_associations));
    written.push_back("heatmap_synth.svg");
    return written;
}

}  // namespace trajbench::tools
