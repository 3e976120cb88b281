#include <algorithm>
#include <cmath>
#include <functional>
#include <tuple>
#include <cstdio>
#include <map>
#include <set>

#include "pmiembed/io.hpp"
#include "pmiembed/sweep.hpp"

namespace pmiembed {
namespace {

constexpr std::array<const char*, kSimilarityColumns> kReds = {
    "#b2182b", "#e34a33", "#fc8d59", "#99000d", "#ef3b2c", "#cb181d"};
constexpr std::array<const char*, kResultColumns - kSimilarityColumns> kBlues = {"#2166ac", "#4393c3"};

struct Point {
    double sort_key;
    std::string label;
    const ResultRecord* record;
};

struct Chart {
    std::string title;
    std::string x_label;
    std::vector<Point> points;
};

std::string fmt(double v, const char* spec = "%.1f") {
    char buf[32];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

std::string escape(std::string_view s) {
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

std::string render_svg(const Chart& chart) {
    constexpr double width = 720;
    constexpr double height = 420;
    constexpr double left = 60;
    constexpr double right = 170;
    constexpr double top = 40;
    constexpr double bottom = 60;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;

    double lo = 0.0;
    double hi = 1.0;
    for (const auto& p : chart.points) {
        for (const auto& s : p.record->scores) {
            if (s) {
                lo = std::min(lo, *s);
                hi = std::max(hi, *s);
            }
        }
    }
    const std::size_t n = chart.points.size();
    auto x_at = [&](std::size_t i) {
        return left + (n == 1 ? plot_w / 2 : plot_w * static_cast<double>(i) / static_cast<double>(n - 1));
    };
    auto y_at = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(width, "%.0f") + "\" height=\"" +
           fmt(height, "%.0f") + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" +
           escape(chart.title) + "</text>\n";

    for (double v = std::ceil(lo * 5) / 5; v <= hi + 1e-9; v += 0.2) {
        const double y = y_at(v);
        svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(left + plot_w) +
               "\" y2=\"" + fmt(y) + "\" stroke=\"#dddddd\"/>\n";
        svg += "<text x=\"" + fmt(left - 6) + "\" y=\"" + fmt(y + 4) + "\" text-anchor=\"end\">" +
               fmt(v, "%.1f") + "</text>\n";
    }
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top + plot_h) + "\" x2=\"" + fmt(left + plot_w) +
           "\" y2=\"" + fmt(top + plot_h) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt(left) + "\" y1=\"" + fmt(top) + "\" x2=\"" + fmt(left) + "\" y2=\"" +
           fmt(top + plot_h) + "\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < n; ++i) {
        svg += "<text x=\"" + fmt(x_at(i)) + "\" y=\"" + fmt(top + plot_h + 18) +
               "\" text-anchor=\"middle\">" + escape(chart.points[i].label) + "</text>\n";
    }
    svg += "<text x=\"" + fmt(left + plot_w / 2) + "\" y=\"" + fmt(height - 18) +
           "\" text-anchor=\"middle\">" + escape(chart.x_label) + "</text>\n";
    svg += "<text transform=\"translate(16 " + fmt(top + plot_h / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">score</text>\n";

    std::size_t legend_row = 0;
    for (std::size_t c = 0; c < kResultColumns; ++c) {
        const char* color = is_analogy_column(c) ? kBlues[c - kSimilarityColumns] : kReds[c];
        const char* dash = is_analogy_column(c) ? "6 3" : "none";
        std::string path;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& s = chart.points[i].record->scores[c];
            if (!s) {
                continue;
            }
            path += (path.empty() ? "" : " ") + fmt(x_at(i)) + "," + fmt(y_at(*s));
            svg += "<circle cx=\"" + fmt(x_at(i)) + "\" cy=\"" + fmt(y_at(*s)) + "\" r=\"3\" fill=\"" +
                   color + "\"/>\n";
        }
        if (path.empty()) {
            continue;
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"2\" stroke-dasharray=\"" +
               dash + "\" points=\"" + path + "\"/>\n";
        const double ly = top + 10 + 18 * static_cast<double>(legend_row++);
        const double lx = left + plot_w + 16;
        svg += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(ly) + "\" x2=\"" + fmt(lx + 24) + "\" y2=\"" +
               fmt(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\" stroke-dasharray=\"" + dash + "\"/>\n";
        svg += "<text x=\"" + fmt(lx + 30) + "\" y=\"" + fmt(ly + 4) + "\">" + std::string(kColumnNames[c]) +
               "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

struct Family {
    std::string axis;
    std::string x_label;
    // Groups records by the two fixed axes; returns group key, chart title,
    // file stem, sort key and tick label.
    std::function<std::tuple<std::string, std::string, std::string, double, std::string>(const ResultRecord&)> classify;
};

}  // namespace

PlotOutput emit_trend_plots(const std::vector<ResultRecord>& records,
                            const std::filesystem::path& path_prefix) {
    PlotOutput out;
    if (records.empty()) {
        out.warnings.emplace_back("no records: no plots written");
        return out;
    }
    const std::vector<Family> families = {
        {"window", "window size",
         [](const ResultRecord& r) {
             return std::make_tuple(r.data_size + "/" + std::to_string(r.dim),
                                    "Varying window size (corpus " + r.data_size + ", dim " + std::to_string(r.dim) + ")",
                                    "window_" + r.data_size + "_d" + std::to_string(r.dim),
                                    static_cast<double>(r.window), std::to_string(r.window));
         }},
        {"dimension", "vector dimension",
         [](const ResultRecord& r) {
             return std::make_tuple(r.data_size + "/" + std::to_string(r.window),
                                    "Varying dimension (corpus " + r.data_size + ", window " + std::to_string(r.window) + ")",
                                    "dim_" + r.data_size + "_w" + std::to_string(r.window),
                                    static_cast<double>(r.dim), std::to_string(r.dim));
         }},
        {"corpus", "corpus size (tokens)",
         [](const ResultRecord& r) {
             return std::make_tuple(std::to_string(r.window) + "/" + std::to_string(r.dim),
                                    "Varying corpus size (window " + std::to_string(r.window) + ", dim " +
                                        std::to_string(r.dim) + ")",
                                    "corpus_w" + std::to_string(r.window) + "_d" + std::to_string(r.dim),
                                    static_cast<double>(r.tokens), r.data_size);
         }},
    };

    if (path_prefix.has_parent_path()) {
        std::filesystem::create_directories(path_prefix.parent_path());
    }
    for (const auto& family : families) {
        std::map<std::string, std::pair<Chart, std::string>> charts;
        std::set<double> axis_values;
        for (const auto& r : records) {
            auto [key, title, stem, sort_key, label] = family.classify(r);
            auto& [chart, file_stem] = charts[key];
            chart.title = title;
            chart.x_label = family.x_label;
            file_stem = stem;
            chart.points.push_back({sort_key, label, &r});
            axis_values.insert(sort_key);
        }
        if (axis_values.size() < 2) {
            out.warnings.push_back(family.axis + " axis has a single value: " + family.axis + " plots skipped");
            continue;
        }
        for (auto& [key, entry] : charts) {
            auto& [chart, stem] = entry;
            std::stable_sort(chart.points.begin(), chart.points.end(),
                             [](const Point& a, const Point& b) { return a.sort_key < b.sort_key; });
            if (chart.points.size() < 2) {
                out.warnings.push_back(chart.title + ": single point, plot skipped");
                continue;
            }
            std::filesystem::path file = path_prefix.string() + stem + ".svg";
            io::write_file_atomic(file, render_svg(chart));
            out.files.push_back(std::move(file));
        }
    }
    return out;
}

}  // namespace pmiembed
