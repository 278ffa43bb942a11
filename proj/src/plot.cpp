#include "chemobound/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace chemobound {

namespace {

double cell_value(const std::string& text, const std::string& column, std::size_t row) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size()) {
        throw SchemaError("column '" + column + "' row " + std::to_string(row + 1) + ": '" + text + "' is not a number");
    }
    return x;
}

std::string num(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

std::string px(double x) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(2);
    s << x;
    return s.str();
}

std::string escape(const std::string& text) {
    std::string out;
    for (char ch : text) {
        if (ch == '<') out += "&lt;";
        else if (ch == '>') out += "&gt;";
        else if (ch == '&') out += "&amp;";
        else out += ch;
    }
    return out;
}

struct Panel {
    double x0, y0, w, h;
};

void draw_axes(std::ostringstream& svg, const Panel& p, const std::string& title, double xmin, double xmax,
               double ymin, double ymax) {
    svg << "<rect x=\"" << px(p.x0) << "\" y=\"" << px(p.y0) << "\" width=\"" << px(p.w) << "\" height=\"" << px(p.h)
        << "\" fill=\"none\" stroke=\"#333\"/>\n";
    svg << "<text x=\"" << px(p.x0 + p.w / 2) << "\" y=\"" << px(p.y0 - 6)
        << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(title) << "</text>\n";
    svg << "<text x=\"" << px(p.x0) << "\" y=\"" << px(p.y0 + p.h + 14) << "\" font-size=\"10\">" << num(xmin)
        << "</text>\n";
    svg << "<text x=\"" << px(p.x0 + p.w) << "\" y=\"" << px(p.y0 + p.h + 14)
        << "\" text-anchor=\"end\" font-size=\"10\">" << num(xmax) << "</text>\n";
    svg << "<text x=\"" << px(p.x0 - 4) << "\" y=\"" << px(p.y0 + p.h) << "\" text-anchor=\"end\" font-size=\"10\">"
        << num(ymin) << "</text>\n";
    svg << "<text x=\"" << px(p.x0 - 4) << "\" y=\"" << px(p.y0 + 10) << "\" text-anchor=\"end\" font-size=\"10\">"
        << num(ymax) << "</text>\n";
}

void check_series_header(const CsvTable& table) {
    const auto& base = series_base_columns();
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (i >= table.header.size()) throw SchemaError("missing column '" + base[i] + "'");
        if (table.header[i] != base[i]) {
            throw SchemaError("unexpected column '" + table.header[i] + "' at position " + std::to_string(i + 1) +
                              ", expected '" + base[i] + "'");
        }
    }
    bool in_beta = false;
    for (std::size_t i = base.size(); i < table.header.size(); ++i) {
        const std::string& col = table.header[i];
        std::string prefix = in_beta ? "gradv_b" : "u_p";
        if (!in_beta && col.rfind("gradv_b", 0) == 0) {
            in_beta = true;
            prefix = "gradv_b";
        }
        if (col.rfind(prefix, 0) != 0 || col.size() == prefix.size()) {
            throw SchemaError("unexpected column '" + col + "' at position " + std::to_string(i + 1));
        }
        cell_value(col.substr(prefix.size()), col, 0);
    }
}

}  // namespace

std::string series_svg(const CsvTable& table, PlotReport& report) {
    check_series_header(table);
    const std::size_t ncols = table.header.size();
    std::vector<std::vector<double>> data(ncols);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        for (std::size_t c = 0; c < ncols; ++c) data[c].push_back(cell_value(table.rows[r][c], table.header[c], r));
    }
    report.points = table.rows.size();

    const std::size_t sup_v = table.column("sup_v");
    if (!data[sup_v].empty()) {
        bool ok = true;
        for (std::size_t k = 1; k < data[sup_v].size(); ++k) {
            if (data[sup_v][k] > data[sup_v][k - 1] * (1.0 + 1e-12)) ok = false;
        }
        report.sup_v_nonincreasing = ok;
    }

    const int per_row = 3;
    const double pw = 260, ph = 160, margin_x = 60, margin_y = 40;
    const std::size_t panels = ncols - 1;
    const int rows = static_cast<int>((panels + per_row - 1) / per_row);
    const double width = per_row * (pw + margin_x) + 20;
    const double height = rows * (ph + margin_y * 1.5) + 20;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
        << "\" font-family=\"sans-serif\">\n";
    const auto& t = data[0];
    double tmin = 0.0, tmax = 1.0;
    if (!t.empty()) {
        tmin = *std::min_element(t.begin(), t.end());
        tmax = *std::max_element(t.begin(), t.end());
        if (tmax <= tmin) tmax = tmin + 1.0;
    }
    for (std::size_t k = 0; k < panels; ++k) {
        const std::size_t c = k + 1;
        const Panel p{margin_x + (k % per_row) * (pw + margin_x), margin_y + (k / per_row) * (ph + margin_y * 1.5), pw,
                      ph};
        double ymin = 0.0, ymax = 1.0;
        std::vector<double> finite;
        for (double y : data[c]) {
            if (std::isfinite(y)) finite.push_back(y);
        }
        if (!finite.empty()) {
            ymin = *std::min_element(finite.begin(), finite.end());
            ymax = *std::max_element(finite.begin(), finite.end());
            if (ymax <= ymin) {
                const double pad = std::max(std::abs(ymin) * 1e-3, 1e-12);
                ymin -= pad;
                ymax += pad;
            }
        }
        draw_axes(svg, p, table.header[c], tmin, tmax, ymin, ymax);
        if (finite.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"#1565c0\" stroke-width=\"1.2\" points=\"";
        for (std::size_t r = 0; r < t.size(); ++r) {
            if (!std::isfinite(data[c][r])) continue;
            const double x = p.x0 + (t[r] - tmin) / (tmax - tmin) * p.w;
            const double y = p.y0 + p.h - (data[c][r] - ymin) / (ymax - ymin) * p.h;
            svg << px(x) << ',' << px(y) << ' ';
        }
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

namespace {

// Piecewise-linear map from sorted category values to slot centers 0..n-1,
// extended linearly beyond the ends.
double slot_position(const std::vector<double>& values, double x) {
    const std::size_t n = values.size();
    if (n == 1) return 0.0;
    std::size_t k = 0;
    if (x >= values[n - 1]) {
        k = n - 2;
    } else if (x > values[0]) {
        k = static_cast<std::size_t>(std::upper_bound(values.begin(), values.end(), x) - values.begin()) - 1;
    }
    return k + (x - values[k]) / (values[k + 1] - values[k]);
}

int severity(const std::string& verdict) {
    if (verdict == "Growing") return 2;
    if (verdict == "Inconclusive") return 1;
    return 0;
}

}  // namespace

std::string sweep_svg(const CsvTable& table, PlotReport& report) {
    const auto& cols = sweep_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i >= table.header.size()) throw SchemaError("missing column '" + cols[i] + "'");
        if (table.header[i] != cols[i]) {
            throw SchemaError("unexpected column '" + table.header[i] + "' at position " + std::to_string(i + 1) +
                              ", expected '" + cols[i] + "'");
        }
    }
    if (table.header.size() > cols.size()) throw SchemaError("unexpected column '" + table.header[cols.size()] + "'");

    struct Cell {
        std::string verdict = "Bounded";
        double threshold = -std::numeric_limits<double>::infinity();
    };
    std::map<std::pair<double, double>, Cell> cells;  // (m, mu/chi)
    std::vector<double> ms, ratios;
    const std::size_t im = 0, imu = 1, ichi = 2, ithr = 7, iverdict = 9;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const double m = cell_value(row[im], cols[im], r);
        const double mu = cell_value(row[imu], cols[imu], r);
        const double chi = cell_value(row[ichi], cols[ichi], r);
        const double thr = cell_value(row[ithr], cols[ithr], r);
        const std::string& verdict = row[iverdict];
        if (verdict != "Bounded" && verdict != "Growing" && verdict != "Inconclusive") {
            throw SchemaError("column 'verdict' row " + std::to_string(r + 1) + ": unknown verdict '" + verdict + "'");
        }
        const double ratio = chi > 0.0 ? mu / chi : std::numeric_limits<double>::infinity();
        auto [it, fresh] = cells.try_emplace({m, ratio});
        if (fresh || severity(verdict) > severity(it->second.verdict)) it->second.verdict = verdict;
        it->second.threshold = std::max(it->second.threshold, thr);
        ms.push_back(m);
        ratios.push_back(ratio);
    }
    report.points = cells.size();
    auto uniq = [](std::vector<double>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    uniq(ms);
    uniq(ratios);

    const double cw = 90, ch = 50, left = 80, top = 50;
    const double nx = std::max<std::size_t>(ratios.size(), 1), ny = std::max<std::size_t>(ms.size(), 1);
    const double width = left + nx * cw + 160, height = top + ny * ch + 60;
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << px(width) << "\" height=\"" << px(height)
        << "\" font-family=\"sans-serif\">\n";
    svg << "<text x=\"" << px(left + nx * cw / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">"
        << "verdict over (m, mu/chi)</text>\n";
    svg << "<rect x=\"" << px(left) << "\" y=\"" << px(top) << "\" width=\"" << px(nx * cw) << "\" height=\""
        << px(ny * ch) << "\" fill=\"none\" stroke=\"#333\"/>\n";
    const std::map<std::string, std::string> color{
        {"Bounded", "#66bb6a"}, {"Growing", "#e53935"}, {"Inconclusive", "#fdd835"}};
    auto col_x = [&](std::size_t j) { return left + j * cw; };
    auto row_y = [&](double slot) { return top + (ny - 1 - slot) * ch; };  // larger m on top

    for (const auto& [key, cell] : cells) {
        const std::size_t j = std::lower_bound(ratios.begin(), ratios.end(), key.second) - ratios.begin();
        const std::size_t i = std::lower_bound(ms.begin(), ms.end(), key.first) - ms.begin();
        svg << "<rect class=\"cell\" x=\"" << px(col_x(j)) << "\" y=\"" << px(row_y(static_cast<double>(i)))
            << "\" width=\"" << px(cw) << "\" height=\"" << px(ch) << "\" fill=\"" << color.at(cell.verdict)
            << "\" stroke=\"#fff\"><title>m=" << num(key.first) << " mu/chi=" << num(key.second) << ": "
            << cell.verdict << "</title></rect>\n";
    }
    for (std::size_t j = 0; j < ratios.size(); ++j) {
        svg << "<text x=\"" << px(col_x(j) + cw / 2) << "\" y=\"" << px(top + ny * ch + 16)
            << "\" text-anchor=\"middle\" font-size=\"11\">" << num(ratios[j]) << "</text>\n";
    }
    for (std::size_t i = 0; i < ms.size(); ++i) {
        svg << "<text x=\"" << px(left - 6) << "\" y=\"" << px(row_y(static_cast<double>(i)) + ch / 2 + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << num(ms[i]) << "</text>\n";
    }
    svg << "<text x=\"" << px(left + nx * cw / 2) << "\" y=\"" << px(top + ny * ch + 36)
        << "\" text-anchor=\"middle\" font-size=\"12\">mu/chi</text>\n";
    svg << "<text x=\"16\" y=\"" << px(top + ny * ch / 2) << "\" font-size=\"12\">m</text>\n";

    // threshold_m per mu/chi column, drawn through the column centers
    std::vector<std::pair<double, double>> curve;
    for (std::size_t j = 0; j < ratios.size(); ++j) {
        double thr = -std::numeric_limits<double>::infinity();
        for (const auto& [key, cell] : cells) {
            if (key.second == ratios[j]) thr = std::max(thr, cell.threshold);
        }
        if (!std::isfinite(thr)) continue;
        const double y = row_y(slot_position(ms, thr)) + ch / 2;
        curve.emplace_back(col_x(j) + cw / 2, y);
    }
    if (!curve.empty()) {
        svg << "<polyline class=\"threshold\" fill=\"none\" stroke=\"#000\" stroke-width=\"2\" "
               "stroke-dasharray=\"6,3\" points=\"";
        for (const auto& [x, y] : curve) svg << px(x) << ',' << px(y) << ' ';
        svg << "\"/>\n";
    }
    double ly = top;
    for (const auto& [name, fill] : color) {
        svg << "<rect x=\"" << px(left + nx * cw + 20) << "\" y=\"" << px(ly) << "\" width=\"14\" height=\"14\" fill=\""
            << fill << "\"/><text x=\"" << px(left + nx * cw + 40) << "\" y=\"" << px(ly + 12)
            << "\" font-size=\"11\">" << name << "</text>\n";
        ly += 22;
    }
    svg << "<line x1=\"" << px(left + nx * cw + 20) << "\" y1=\"" << px(ly + 7) << "\" x2=\"" << px(left + nx * cw + 34)
        << "\" y2=\"" << px(ly + 7) << "\" stroke=\"#000\" stroke-width=\"2\" stroke-dasharray=\"6,3\"/><text x=\""
        << px(left + nx * cw + 40) << "\" y=\"" << px(ly + 11) << "\" font-size=\"11\">threshold_m</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

PlotReport emit_plots(const std::string& csv_text, PlotKind kind, const std::filesystem::path& out_dir) {
    const CsvTable table = parse_csv(csv_text);
    PlotReport report;
    const bool series = kind == PlotKind::Series;
    const std::string svg = series ? series_svg(table, report) : sweep_svg(table, report);
    const auto path = out_dir / (series ? "series.svg" : "sweep.svg");
    write_text_file(path, svg);
    report.files.push_back(path);
    return report;
}

}  // namespace chemobound
