#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tyrefield/errors.hpp"
#include "tyrefield/results.hpp"

namespace tyrefield {

namespace {

const char* kPalette[] = {"#1f5fa8", "#c2410c", "#15803d", "#7e22ce", "#a16207"};

std::string esc(const std::string& s)
{
    std::string o;
    for (char c : s) {
        switch (c) {
        case '&': o += "&amp;"; break;
        case '<': o += "&lt;"; break;
        case '>': o += "&gt;"; break;
        case '"': o += "&quot;"; break;
        default: o += c;
        }
    }
    return o;
}

std::string num(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", x);
    return b;
}

std::string tick_label(double x)
{
    char b[32];
    std::snprintf(b, sizeof b, "%g", std::abs(x) < 1e-12 ? 0.0 : x);
    return b;
}

struct Axis {
    double lo = 0.0, hi = 1.0;
    bool log = false;
    std::string label;

    double frac(double v) const
    {
        if (log) return (std::log10(v) - std::log10(lo)) / (std::log10(hi) - std::log10(lo));
        return (v - lo) / (hi - lo);
    }

    std::vector<double> ticks() const
    {
        std::vector<double> t;
        if (log) {
            for (double d = std::pow(10.0, std::ceil(std::log10(lo) - 1e-9)); d <= hi * (1 + 1e-9); d *= 10.0)
                t.push_back(d);
            return t;
        }
        const double raw = (hi - lo) / 5.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double m : {1.0, 2.0, 5.0, 10.0})
            if (m * mag >= raw) {
                step = m * mag;
                break;
            }
        for (double v = std::ceil(lo / step - 1e-9) * step; v <= hi + 1e-9 * step; v += step) t.push_back(v);
        return t;
    }
};

Axis fit_axis(const std::vector<const std::vector<double>*>& data, bool log, const std::string& label)
{
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto* d : data)
        for (double v : *d)
            if (std::isfinite(v) && (!log || v > 0.0)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
    if (!std::isfinite(lo)) lo = log ? 1.0 : 0.0, hi = log ? 10.0 : 1.0;
    if (log) {
        if (hi <= lo) hi = lo * 10.0;
        return {lo, hi, true, label};
    }
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
        const double pad = std::max(1e-12, std::abs(hi) * 0.1);
        lo -= pad;
        hi += pad;
    } else {
        const double pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
    return {lo, hi, false, label};
}

struct Series {
    const std::vector<double>* x;
    std::vector<double> y;
    std::string label;
    std::string color;
};

struct Panel {
    double x, y, w, h;
    Axis ax, ay;
    std::vector<Series> series;
    bool legend = false;
};

class Canvas {
public:
    Canvas(double w, double h, const std::string& title) : w_(w), h_(h)
    {
        o_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
           << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        text(w / 2, 22, title, "middle", 14);
    }

    void text(double x, double y, const std::string& s, const char* anchor = "start", int size = 11,
              double rotate = 0.0)
    {
        o_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\" font-size=\""
           << size << '"';
        if (rotate != 0.0) o_ << " transform=\"rotate(" << num(rotate) << ' ' << num(x) << ' ' << num(y) << ")\"";
        o_ << '>' << esc(s) << "</text>\n";
    }

    void line(double x1, double y1, double x2, double y2, const char* stroke = "black", double width = 1.0,
              const char* dash = nullptr)
    {
        o_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
           << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
        if (dash) o_ << " stroke-dasharray=\"" << dash << '"';
        o_ << "/>\n";
    }

    void rect(double x, double y, double w, double h, const std::string& fill, const char* stroke = nullptr)
    {
        o_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
           << "\" fill=\"" << fill << '"';
        if (stroke) o_ << " stroke=\"" << stroke << "\" stroke-width=\"0.8\"";
        o_ << "/>\n";
    }

    void frame(const Panel& p)
    {
        rect(p.x, p.y, p.w, p.h, "none", "black");
        for (double t : p.ax.ticks()) {
            const double X = p.x + p.ax.frac(t) * p.w;
            line(X, p.y, X, p.y + p.h, "#dddddd", 0.6);
            line(X, p.y + p.h, X, p.y + p.h + 4);
            text(X, p.y + p.h + 15, tick_label(t), "middle", 9);
        }
        for (double t : p.ay.ticks()) {
            const double Y = p.y + (1.0 - p.ay.frac(t)) * p.h;
            line(p.x, Y, p.x + p.w, Y, "#dddddd", 0.6);
            line(p.x - 4, Y, p.x, Y);
            text(p.x - 6, Y + 3, tick_label(t), "end", 9);
        }
        text(p.x + p.w / 2, p.y + p.h + 30, p.ax.label, "middle");
        text(p.x - 48, p.y + p.h / 2, p.ay.label, "middle", 11, -90.0);
    }

    void plot(const Panel& p)
    {
        frame(p);
        o_ << "<g clip-path=\"url(#c" << clip_id_ << ")\">\n";
        o_ << "<clipPath id=\"c" << clip_id_++ << "\"><rect x=\"" << num(p.x) << "\" y=\"" << num(p.y)
           << "\" width=\"" << num(p.w) << "\" height=\"" << num(p.h) << "\"/></clipPath>\n";
        for (const auto& s : p.series) {
            std::string pts;
            auto flush = [&] {
                if (!pts.empty())
                    o_ << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.3\" points=\"" << pts
                       << "\"/>\n";
                pts.clear();
            };
            for (std::size_t k = 0; k < s.y.size(); ++k) {
                const double xv = (*s.x)[k], yv = s.y[k];
                if (!std::isfinite(xv) || !std::isfinite(yv) || (p.ax.log && xv <= 0.0)) {
                    flush();
                    continue;
                }
                pts += num(p.x + p.ax.frac(xv) * p.w) + ',' + num(p.y + (1.0 - p.ay.frac(yv)) * p.h) + ' ';
            }
            flush();
        }
        o_ << "</g>\n";
        if (p.legend) {
            double ly = p.y + 14;
            for (const auto& s : p.series) {
                line(p.x + p.w - 90, ly - 4, p.x + p.w - 70, ly - 4, s.color.c_str(), 2.0);
                text(p.x + p.w - 66, ly, s.label, "start", 10);
                ly += 14;
            }
        }
    }

    std::string finish()
    {
        o_ << "</svg>\n";
        return o_.str();
    }

private:
    double w_, h_;
    int clip_id_ = 0;
    std::ostringstream o_;
};

std::string steady_force_svg(const SteadyForceTable& t)
{
    Canvas c(720, 460, "Steady-state friction force");
    Panel p{80, 50, 600, 340, fit_axis({&t.v}, false, "v [m/s]"), fit_axis({&t.force, &t.force_quadrature}, false, "F [N]"),
            {}, true};
    p.series.push_back({&t.v, t.force, "closed form", kPalette[0]});
    p.series.push_back({&t.v, t.force_quadrature, "quadrature", kPalette[1]});
    c.plot(p);
    return c.finish();
}

std::string trajectory_svg(const Trajectory& tr)
{
    Canvas c(760, 900, "Lateral response");
    const std::vector<double>* ys[4] = {&tr.vy, &tr.r, &tr.Fy1, &tr.Fy2};
    const char* labels[4] = {"v_y [m/s]", "r [rad/s]", "F_y1 [N]", "F_y2 [N]"};
    for (int k = 0; k < 4; ++k) {
        Panel p{90, 45 + k * 212.0, 630, 160, fit_axis({&tr.t}, false, k == 3 ? "t [s]" : ""),
                fit_axis({ys[k]}, false, labels[k]), {}, true};
        p.series.push_back({&tr.t, *ys[k], labels[k], kPalette[k]});
        c.plot(p);
    }
    return c.finish();
}

std::string chart_svg(const StabilityChart& ch)
{
    Canvas c(760, 560, "Stability chart (unstable cells in white)");
    std::vector<double> chis, vxs;
    for (int i = 0; i < ch.n_chi; ++i) chis.push_back(ch.at(i, 0).chi);
    for (int j = 0; j < ch.n_vx; ++j) vxs.push_back(ch.at(0, j).vx);
    auto span = [](const std::vector<double>& v) {
        const double h = v.size() > 1 ? 0.5 * (v[1] - v[0]) : 0.5 * std::max(1e-3, std::abs(v[0]) * 0.1);
        return std::pair<double, double>{v.front() - h, v.back() + h};
    };
    const auto [vlo, vhi] = span(vxs);
    const auto [clo, chi_hi] = span(chis);
    Panel p{90, 50, 520, 420, Axis{vlo, vhi, false, "v_x [m/s]"}, Axis{clo, chi_hi, false, "chi [-]"}, {}, false};
    const double cw = p.w / ch.n_vx, chh = p.h / ch.n_chi;
    for (int i = 0; i < ch.n_chi; ++i)
        for (int j = 0; j < ch.n_vx; ++j) {
            const int n = ch.at(i, j).unstable_roots;
            const std::string fill = n < 0 ? "#9ca3af" : n == 0 ? "#1f3f73" : "white";
            c.rect(p.x + j * cw, p.y + (ch.n_chi - 1 - i) * chh, cw + 0.05, chh + 0.05, fill);
        }
    c.frame(p);
    const double lx = p.x + p.w + 20;
    const std::pair<const char*, const char*> legend[3] = {
        {"#1f3f73", "stable"}, {"white", "unstable"}, {"#9ca3af", "failed"}};
    for (int k = 0; k < 3; ++k) {
        c.rect(lx, p.y + 10 + 22 * k, 14, 14, legend[k].first, "black");
        c.text(lx + 20, p.y + 21 + 22 * k, legend[k].second);
    }
    return c.finish();
}

std::string bode_svg(const std::vector<BodeResult>& bode)
{
    const char* outs[5] = {"v_y", "r", "F_y1", "F_y2", "a_y/g"};
    Canvas c(900, 1180, "Frequency response (input delta_1)");
    for (int o = 0; o < 5; ++o)
        for (int kind = 0; kind < 2; ++kind) {
            std::vector<std::vector<double>> cols;
            for (const auto& r : bode) {
                const Eigen::MatrixXd& m = kind == 0 ? r.table.mag_db : r.table.phase_deg;
                cols.emplace_back(m.col(2 * o).data(), m.col(2 * o).data() + m.rows());
            }
            std::vector<const std::vector<double>*> xs, ys;
            for (std::size_t k = 0; k < bode.size(); ++k) {
                xs.push_back(&bode[k].table.omega);
                ys.push_back(&cols[k]);
            }
            const std::string ylab = std::string(outs[o]) + (kind == 0 ? " |G| [dB]" : " arg G [deg]");
            Panel p{90 + kind * 420.0, 50 + o * 222.0, 340, 165, fit_axis(xs, true, o == 4 ? "omega [rad/s]" : ""),
                    fit_axis(ys, false, ylab), {}, o == 0 && kind == 0};
            for (std::size_t k = 0; k < bode.size(); ++k)
                p.series.push_back({&bode[k].table.omega, cols[k], "v_x = " + tick_label(bode[k].vx),
                                    kPalette[k % 5]});
            c.plot(p);
        }
    return c.finish();
}

}  // namespace

std::vector<PlotKind> plot_kinds(const ResultBundle& b)
{
    std::vector<PlotKind> k;
    if (b.steady_force) k.push_back(PlotKind::SteadyForce);
    if (b.trajectory) k.push_back(PlotKind::Trajectory);
    if (b.chart) k.push_back(PlotKind::Chart);
    if (!b.bode.empty()) k.push_back(PlotKind::Bode);
    return k;
}

std::string render_svg_text(const ResultBundle& b, PlotKind kind)
{
    switch (kind) {
    case PlotKind::SteadyForce:
        if (b.steady_force) return steady_force_svg(*b.steady_force);
        break;
    case PlotKind::Trajectory:
        if (b.trajectory) return trajectory_svg(*b.trajectory);
        break;
    case PlotKind::Chart:
        if (b.chart) return chart_svg(*b.chart);
        break;
    case PlotKind::Bode:
        if (!b.bode.empty()) return bode_svg(b.bode);
        break;
    }
    throw ValidationError("svg: bundle holds no result of the requested kind");
}

void render_svg(const ResultBundle& b, PlotKind kind, const std::filesystem::path& path)
{
    const std::string s = render_svg_text(b, kind);
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
    if (!out) throw std::runtime_error("write to '" + path.string() + "' failed");
}

}  // namespace tyrefield
