#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "michell/errors.hpp"
#include "michell/lab.hpp"

namespace michell {

namespace {

constexpr double kW = 640, kH = 480, kMargin = 60;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

void save(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InvalidInput("cannot write '" + path + "'");
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body << "</svg>\n";
}

std::string color_ramp(double t) {
    // dark blue → yellow
    t = std::clamp(t, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(30 + 225 * t));
    const int g = static_cast<int>(std::lround(30 + 200 * t));
    const int b = static_cast<int>(std::lround(120 * (1 - t) + 20 * t));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

void write_loglog_svg(const std::string& path, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    auto usable = [](double x, double y) { return x > 0 && y > 0 && std::isfinite(x) && std::isfinite(y); };
    for (const auto& s : series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
            if (usable(s.x[i], s.y[i])) {
                xmin = std::min(xmin, std::log10(s.x[i])), xmax = std::max(xmax, std::log10(s.x[i]));
                ymin = std::min(ymin, std::log10(s.y[i])), ymax = std::max(ymax, std::log10(s.y[i]));
            }
    std::ostringstream o;
    o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
    if (!std::isfinite(xmin)) {
        o << "<text x=\"" << kW / 2 << "\" y=\"" << kH / 2 << "\" text-anchor=\"middle\">no positive data</text>\n";
        save(path, o.str());
        return;
    }
    xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
    ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
    const double pw = kW - 2 * kMargin, ph = kH - 2 * kMargin;
    auto px = [&](double lx) { return kMargin + (lx - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double ly) { return kH - kMargin - (ly - ymin) / (ymax - ymin) * ph; };

    o << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double d = xmin; d <= xmax + 1e-9; d += 1)
        o << "<line x1=\"" << num(px(d)) << "\" y1=\"" << kMargin << "\" x2=\"" << num(px(d)) << "\" y2=\""
          << kH - kMargin << "\" stroke=\"#ddd\"/>\n<text x=\"" << num(px(d)) << "\" y=\"" << kH - kMargin + 16
          << "\" text-anchor=\"middle\">1e" << static_cast<int>(d) << "</text>\n";
    for (double d = ymin; d <= ymax + 1e-9; d += 1)
        o << "<line x1=\"" << kMargin << "\" y1=\"" << num(py(d)) << "\" x2=\"" << kW - kMargin << "\" y2=\""
          << num(py(d)) << "\" stroke=\"#ddd\"/>\n<text x=\"" << kMargin - 6 << "\" y=\"" << num(py(d) + 4)
          << "\" text-anchor=\"end\">1e" << static_cast<int>(d) << "</text>\n";
    o << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 18 << "\" text-anchor=\"middle\">" << escape(xlabel)
      << "</text>\n<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << kH / 2 << ")\">" << escape(ylabel) << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        const char* color = kPalette[k % 6];
        std::string pts;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double x = px(std::log10(s.x[i])), y = py(std::log10(s.y[i]));
            pts += num(x) + "," + num(y) + " ";
            o << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        o << "<polyline points=\"" << pts << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        o << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 16 + 16 * k << "\" fill=\"" << color << "\">"
          << escape(s.label) << "</text>\n";
    }
    save(path, o.str());
}

void write_heatmap_svg(const std::string& path, const std::string& title, const Grid& grid,
                       const std::vector<double>& cell_values) {
    if (cell_values.size() != grid.num_cells()) throw ShapeMismatch("heatmap: one value per cell expected");
    const Lattice cl = grid.cell_lattice();
    const int k = grid.dim() == 3 ? grid.cells(2) / 2 : 0;
    double vmax = 0.0;
    for (int j = 0; j < cl.n[1]; ++j)
        for (int i = 0; i < cl.n[0]; ++i) vmax = std::max(vmax, std::abs(cell_values[cl.index(i, j, k)]));
    // at most 128 drawn blocks per axis
    const int bx = std::max(1, (cl.n[0] + 127) / 128), by = std::max(1, (cl.n[1] + 127) / 128);
    const double pw = kW - 2 * kMargin, ph = kH - 2 * kMargin;
    const double sx = pw / cl.n[0], sy = ph / cl.n[1];
    std::ostringstream o;
    o << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(title)
      << "</text>\n";
    for (int j = 0; j < cl.n[1]; j += by)
        for (int i = 0; i < cl.n[0]; i += bx) {
            double v = 0.0;
            int cnt = 0;
            for (int jj = j; jj < std::min(j + by, cl.n[1]); ++jj)
                for (int ii = i; ii < std::min(i + bx, cl.n[0]); ++ii, ++cnt) v += std::abs(cell_values[cl.index(ii, jj, k)]);
            v /= cnt;
            const int wi = std::min(bx, cl.n[0] - i), hj = std::min(by, cl.n[1] - j);
            o << "<rect x=\"" << num(kMargin + i * sx) << "\" y=\"" << num(kH - kMargin - (j + hj) * sy)
              << "\" width=\"" << num(wi * sx + 0.3) << "\" height=\"" << num(hj * sy + 0.3) << "\" fill=\""
              << color_ramp(vmax > 0 ? v / vmax : 0.0) << "\"/>\n";
        }
    o << "<text x=\"" << kMargin << "\" y=\"" << kH - 20 << "\">max " << escape(format_number(vmax))
      << "</text>\n";
    save(path, o.str());
}

void write_truss_svg(const std::string& path, const GroundStructure& gs, const TrussDesign& design) {
    if (design.w.size() != gs.bars().size()) throw ShapeMismatch("truss svg: one strength per bar expected");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const auto& p : gs.nodes()) {
        xmin = std::min(xmin, p[0]), xmax = std::max(xmax, p[0]);
        ymin = std::min(ymin, p[1]), ymax = std::max(ymax, p[1]);
    }
    const double span = std::max({xmax - xmin, ymax - ymin, 1e-12});
    const double scale = std::min(kW, kH) * 0.8 / span;
    auto px = [&](double x) { return kW / 2 + (x - 0.5 * (xmin + xmax)) * scale; };
    auto py = [&](double y) { return kH / 2 - (y - 0.5 * (ymin + ymax)) * scale; };
    double wmax = 0.0;
    for (double w : design.w) wmax = std::max(wmax, std::abs(w));
    std::ostringstream o;
    for (std::size_t k = 0; k < gs.bars().size(); ++k) {
        const double w = design.w[k];
        if (wmax == 0.0 || std::abs(w) < 1e-9 * wmax) continue;
        const auto& b = gs.bars()[k];
        const auto& a = gs.nodes()[b.i];
        const auto& c = gs.nodes()[b.j];
        o << "<line x1=\"" << num(px(a[0])) << "\" y1=\"" << num(py(a[1])) << "\" x2=\"" << num(px(c[0]))
          << "\" y2=\"" << num(py(c[1])) << "\" stroke=\"" << (w > 0 ? "#1f5fbf" : "#c0392b")
          << "\" stroke-width=\"" << num(1.0 + 9.0 * std::abs(w) / wmax) << "\" stroke-linecap=\"round\"/>\n";
    }
    for (int i = 0; i < gs.num_nodes(); ++i) {
        const auto& p = gs.nodes()[i];
        o << "<circle cx=\"" << num(px(p[0])) << "\" cy=\"" << num(py(p[1])) << "\" r=\"3\" fill=\""
          << (gs.is_support(i) ? "black" : "#777") << "\"/>\n";
    }
    o << "<text x=\"10\" y=\"20\">blue: compression, red: tension, width ∝ |w|</text>\n";
    save(path, o.str());
}

}  // namespace michell
