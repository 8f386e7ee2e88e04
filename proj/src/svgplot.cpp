#include "glwalk/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "glwalk/csv.hpp"
#include "glwalk/errors.hpp"

namespace glwalk {

namespace {

constexpr double kW = 640.0, kH = 480.0;
constexpr double kL = 70.0, kR = 20.0, kT = 30.0, kB = 50.0;

struct Frame {
    double x_lo, x_hi, y_lo, y_hi; // data coordinates (already log10 for log axes)

    double px(double x) const { return kL + (x - x_lo) / (x_hi - x_lo) * (kW - kL - kR); }
    double py(double y) const { return kH - kB - (y - y_lo) / (y_hi - y_lo) * (kH - kT - kB); }
};

void expand(double& lo, double& hi) {
    double pad = 0.06 * (hi - lo + 1e-12);
    lo -= pad;
    hi += pad;
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

void axes(std::ostringstream& svg, const Frame& f, const std::string& xlab,
          const std::string& ylab, bool loglog, const std::string& title) {
    svg << "<rect x='" << kL << "' y='" << kT << "' width='" << kW - kL - kR << "' height='"
        << kH - kT - kB << "' fill='none' stroke='black'/>\n";
    svg << "<text x='" << kW / 2 << "' y='18' text-anchor='middle' font-size='14'>" << title
        << "</text>\n";
    svg << "<text x='" << kW / 2 << "' y='" << kH - 12 << "' text-anchor='middle' font-size='12'>"
        << xlab << "</text>\n";
    svg << "<text x='16' y='" << kH / 2 << "' text-anchor='middle' font-size='12' transform='rotate(-90 16 "
        << kH / 2 << ")'>" << ylab << "</text>\n";
    // Tick marks at integers of the (log10) coordinate, or quartiles otherwise.
    auto ticks = [&](double lo, double hi) {
        std::vector<double> t;
        if (loglog) {
            for (double v = std::ceil(lo); v <= std::floor(hi) + 1e-9; v += 1.0) t.push_back(v);
            if (t.size() < 2) {
                t.clear();
                for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
            }
        } else {
            for (int i = 0; i <= 4; ++i) t.push_back(lo + (hi - lo) * i / 4.0);
        }
        return t;
    };
    for (double t : ticks(f.x_lo, f.x_hi)) {
        double x = f.px(t);
        svg << "<line x1='" << x << "' y1='" << kH - kB << "' x2='" << x << "' y2='" << kH - kB + 5
            << "' stroke='black'/>\n";
        svg << "<text x='" << x << "' y='" << kH - kB + 18 << "' text-anchor='middle' font-size='10'>"
            << (loglog ? ("1e" + num(t)) : num(t)) << "</text>\n";
    }
    for (double t : ticks(f.y_lo, f.y_hi)) {
        double y = f.py(t);
        svg << "<line x1='" << kL - 5 << "' y1='" << y << "' x2='" << kL << "' y2='" << y
            << "' stroke='black'/>\n";
        svg << "<text x='" << kL - 8 << "' y='" << y + 3 << "' text-anchor='end' font-size='10'>"
            << (loglog ? ("1e" + num(t)) : num(t)) << "</text>\n";
    }
}

void markers(std::ostringstream& svg, const Frame& f, const std::vector<double>& x,
             const std::vector<double>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
        svg << "<circle class='data' cx='" << f.px(x[i]) << "' cy='" << f.py(y[i])
            << "' r='3.5' fill='steelblue'/>\n";
    svg << "<path class='dataline' d='M";
    for (std::size_t i = 0; i < x.size(); ++i)
        svg << (i ? " L" : "") << f.px(x[i]) << ' ' << f.py(y[i]);
    svg << "' fill='none' stroke='steelblue' stroke-width='1'/>\n";
}

// Straight reference line in the (possibly log-log) frame, anchored at the
// first data point.
void refline(std::ostringstream& svg, const Frame& f, double x0, double y0, double slope,
             const std::string& label, const std::string& color) {
    double y1 = y0 + slope * (f.x_hi - 0.02 * (f.x_hi - f.x_lo) - x0);
    svg << "<path class='refline' d='M" << f.px(x0) << ' ' << f.py(y0) << " L"
        << f.px(f.x_hi - 0.02 * (f.x_hi - f.x_lo)) << ' ' << f.py(y1) << "' fill='none' stroke='"
        << color << "' stroke-dasharray='6 3'/>\n";
    svg << "<text x='" << f.px(f.x_hi - 0.02 * (f.x_hi - f.x_lo)) - 4 << "' y='" << f.py(y1) - 6
        << "' text-anchor='end' font-size='10' fill='" << color << "'>" << label << "</text>\n";
}

std::vector<double> column_as_double(const CsvTable& t, const std::string& name) {
    std::size_t c = t.col(name);
    std::vector<double> v;
    for (const auto& row : t.rows) v.push_back(std::stod(row[c]));
    return v;
}

void write_svg(const std::filesystem::path& out, const std::string& body) {
    std::filesystem::path tmp = out;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("plot: cannot open " + tmp.string());
        f << "<svg xmlns='http://www.w3.org/2000/svg' width='" << kW << "' height='" << kH
          << "'>\n"
          << body << "</svg>\n";
    }
    std::filesystem::rename(tmp, out);
}

} // namespace

void plot(const std::filesystem::path& report_csv, const std::string& kind,
          const std::filesystem::path& out_svg) {
    CsvTable t = read_csv_expect(report_csv, kind);
    if (t.rows.empty()) throw SchemaMismatchError("plot: no data rows in " + report_csv.string());
    std::ostringstream svg;

    if (kind == "be_curve") {
        std::vector<double> n = column_as_double(t, "n");
        std::vector<double> dn = column_as_double(t, "D_n");
        std::vector<double> qv = column_as_double(t, "q");
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < n.size(); ++i) {
            lx.push_back(std::log10(n[i]));
            ly.push_back(std::log10(dn[i]));
        }
        Frame f{*std::min_element(lx.begin(), lx.end()), *std::max_element(lx.begin(), lx.end()),
                *std::min_element(ly.begin(), ly.end()), *std::max_element(ly.begin(), ly.end())};
        // Reference slopes in log10-log10: v_n = ((log n)/n)^{q/2-1} has local
        // slope (1 - q/2)(1 - 1/log n); anchor both guides at the first point.
        f.y_lo = std::min(f.y_lo, ly[0] - 0.5 * (f.x_hi - f.x_lo));
        expand(f.x_lo, f.x_hi);
        expand(f.y_lo, f.y_hi);
        axes(svg, f, "n", "D_n", true, "Kolmogorov distance vs n");
        markers(svg, f, lx, ly);
        double q = qv[0];
        double ln_n0 = std::log(std::pow(10.0, lx[0]));
        double vq_slope = (1.0 - q / 2.0) * (1.0 - 1.0 / ln_n0);
        refline(svg, f, lx[0], ly[0], vq_slope, "v_n(q)", "darkorange");
        refline(svg, f, lx[0], ly[0], -0.5, "n^-1/2", "seagreen");
    } else if (kind == "depcoef") {
        std::vector<double> k = column_as_double(t, "k");
        std::vector<double> del = column_as_double(t, "delta_hat");
        std::vector<double> lx, ly;
        for (std::size_t i = 0; i < k.size(); ++i) {
            if (del[i] <= 0.0) continue;
            lx.push_back(std::log10(k[i]));
            ly.push_back(std::log10(del[i]));
        }
        if (lx.empty()) throw SchemaMismatchError("plot: depcoef curve has no positive values");
        Frame f{*std::min_element(lx.begin(), lx.end()), *std::max_element(lx.begin(), lx.end()),
                *std::min_element(ly.begin(), ly.end()), *std::max_element(ly.begin(), ly.end())};
        expand(f.x_lo, f.x_hi);
        expand(f.y_lo, f.y_hi);
        axes(svg, f, "k", "delta_hat(k)", true, "Dependence coefficient decay");
        markers(svg, f, lx, ly);
        refline(svg, f, lx[0], ly[0], -1.0, "k^-1", "darkorange");
    } else if (kind == "rate_fit") {
        double slope = column_as_double(t, "slope")[0];
        double intercept = column_as_double(t, "intercept")[0];
        double n_lo = column_as_double(t, "n_lo")[0];
        double n_hi = column_as_double(t, "n_hi")[0];
        Frame f{std::log10(n_lo), std::log10(n_hi), 0.0, 0.0};
        // The fitted model lives on natural logs; convert to log10 frame.
        auto y_of = [&](double lx) {
            double ln_n = lx * std::log(10.0);
            return (intercept + slope * ln_n) / std::log(10.0);
        };
        f.y_lo = std::min(y_of(f.x_lo), y_of(f.x_hi));
        f.y_hi = std::max(y_of(f.x_lo), y_of(f.x_hi));
        expand(f.x_lo, f.x_hi);
        expand(f.y_lo, f.y_hi);
        axes(svg, f, "n", "fit", true, "Rate fit");
        svg << "<path class='fitline' d='M" << f.px(std::log10(n_lo)) << ' '
            << f.py(y_of(std::log10(n_lo))) << " L" << f.px(std::log10(n_hi)) << ' '
            << f.py(y_of(std::log10(n_hi))) << "' fill='none' stroke='crimson' stroke-width='1.5'/>\n";
        refline(svg, f, std::log10(n_lo), y_of(std::log10(n_lo)), -0.5, "n^-1/2", "seagreen");
    } else if (kind == "gap") {
        std::vector<double> n = column_as_double(t, "n");
        std::vector<double> g = column_as_double(t, "gap_max");
        Frame f{*std::min_element(n.begin(), n.end()), *std::max_element(n.begin(), n.end()),
                std::min(0.0, *std::min_element(g.begin(), g.end())),
                *std::max_element(g.begin(), g.end())};
        expand(f.x_lo, f.x_hi);
        expand(f.y_lo, f.y_hi);
        axes(svg, f, "n", "max gap_n", false, "Norm-vs-average-direction gap");
        markers(svg, f, n, g);
        refline(svg, f, f.x_lo + 0.02 * (f.x_hi - f.x_lo), 0.0, 0.0, "0", "darkorange");
    } else {
        throw SchemaMismatchError("plot: unknown kind " + kind);
    }
    write_svg(out_svg, svg.str());
}

} // namespace glwalk
