#include "slelax/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace slelax {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void append_cplx_cols(std::string& row, cplx v) {
    row += ',';
    row += fmt_double(v.real());
    row += ',';
    row += fmt_double(v.imag());
}

} // namespace

std::string trajectory_csv(const std::vector<LoewnerState>& states) {
    std::string out = "t,Z,B";
    std::size_t n = states.empty() ? 0 : states.front().n();
    bool has_xi = !states.empty() && states.front().Xi.has_value();
    for (std::size_t i = 0; i < n; ++i) {
        std::string k = std::to_string(i + 1);
        out += ",Lambda" + k + "_re,Lambda" + k + "_im";
        out += ",gprime" + k + "_re,gprime" + k + "_im";
        out += ",preschwarz" + k + "_re,preschwarz" + k + "_im";
        out += ",schwarz" + k + "_re,schwarz" + k + "_im";
        out += ",S" + k + "_re,S" + k + "_im";
    }
    if (has_xi)
        out += ",Xi";
    out += '\n';
    for (const LoewnerState& st : states) {
        std::string row = fmt_double(st.t);
        row += ',';
        row += fmt_double(st.Z);
        row += ',';
        row += fmt_double(st.B);
        for (std::size_t i = 0; i < n; ++i) {
            append_cplx_cols(row, st.Lambda[i]);
            append_cplx_cols(row, st.gprime[i]);
            append_cplx_cols(row, st.preschwarz[i]);
            append_cplx_cols(row, st.schwarz[i]);
            append_cplx_cols(row, st.S[i]);
        }
        if (has_xi) {
            row += ',';
            row += fmt_double(st.Xi ? *st.Xi : 0.0);
        }
        out += row;
        out += '\n';
    }
    return out;
}

std::string ledger_csv(const std::vector<LedgerRow>& rows) {
    std::string out =
        "t,trA2_re,trA2_im,rateF_re,rateF_im,rateTau_re,rateTau_im,residual_re,residual_im\n";
    for (const LedgerRow& r : rows) {
        std::string row = fmt_double(r.t);
        append_cplx_cols(row, r.ledger.trA2);
        append_cplx_cols(row, r.ledger.rateF);
        append_cplx_cols(row, r.ledger.rateTau);
        append_cplx_cols(row, r.ledger.residual);
        out += row;
        out += '\n';
    }
    return out;
}

std::string confluence_csv(const ConfluenceRate& rate) {
    std::string out = "eps,mismatch\n";
    for (std::size_t i = 0; i < rate.eps.size(); ++i)
        out += fmt_double(rate.eps[i]) + "," + fmt_double(rate.mismatch[i]) + "\n";
    return out;
}

std::string bpz_csv(const ResidualLadder& ladder) {
    std::string out = "h,residual_re,residual_im,order_estimate\n";
    for (std::size_t i = 0; i < ladder.h.size(); ++i) {
        std::string row = fmt_double(ladder.h[i]);
        append_cplx_cols(row, ladder.residual[i]);
        row += ',';
        row += fmt_double(ladder.order);
        out += row;
        out += '\n';
    }
    return out;
}

std::string mc_csv(const McResult& result) {
    std::string out = "path,t_stop,trM_re,trM_im\n";
    for (std::size_t p = 0; p < result.paths; ++p) {
        out += std::to_string(p) + "," + fmt_double(result.path_t_stop[p]);
        append_cplx_cols(out, result.path_trace[p]);
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.empty())
        throw UnknownColumn("empty CSV");
    std::istringstream hl(line);
    std::string cell;
    while (std::getline(hl, cell, ','))
        t.header.push_back(cell);
    if (t.header.empty())
        throw UnknownColumn("empty CSV header");
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::istringstream rl(line);
        while (std::getline(rl, cell, ','))
            row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.header.size())
            throw UnknownColumn("ragged CSV row");
        t.rows.push_back(std::move(row));
    }
    return t;
}

namespace {

struct Frame {
    double x0, x1, y0, y1; // data range
    static constexpr double W = 720, H = 480, ML = 60, MR = 20, MT = 20, MB = 40;
    double px(double x) const {
        return ML + (x - x0) / (x1 - x0 + 1e-300) * (W - ML - MR);
    }
    double py(double y) const {
        return H - MB - (y - y0) / (y1 - y0 + 1e-300) * (H - MT - MB);
    }
};

std::string coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                         "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

std::string svg_open() {
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n<rect width=\"720\" height=\"480\" fill=\"white\"/>\n";
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const Frame& f,
                     const char* color) {
    std::string s = "<polyline fill=\"none\" stroke=\"";
    s += color;
    s += "\" stroke-width=\"1.2\" points=\"";
    for (const auto& [x, y] : pts) {
        s += coord(f.px(x)) + "," + coord(f.py(y)) + " ";
    }
    s += "\"/>\n";
    return s;
}

std::string axes([[maybe_unused]] const Frame& f, const std::string& xlabel,
                 const std::string& ylabel) {
    std::string s;
    s += "<line x1=\"" + coord(Frame::ML) + "\" y1=\"" + coord(Frame::H - Frame::MB) +
         "\" x2=\"" + coord(Frame::W - Frame::MR) + "\" y2=\"" +
         coord(Frame::H - Frame::MB) + "\" stroke=\"black\"/>\n";
    s += "<line x1=\"" + coord(Frame::ML) + "\" y1=\"" + coord(Frame::MT) + "\" x2=\"" +
         coord(Frame::ML) + "\" y2=\"" + coord(Frame::H - Frame::MB) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + coord(0.5 * Frame::W) + "\" y=\"" + coord(Frame::H - 8) +
         "\" font-size=\"12\" text-anchor=\"middle\">" + xlabel + "</text>\n";
    s += "<text x=\"14\" y=\"" + coord(0.5 * Frame::H) +
         "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         coord(0.5 * Frame::H) + ")\">" + ylabel + "</text>\n";
    return s;
}

std::size_t find_col(const CsvTable& t, const std::string& name) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == name)
            return i;
    throw UnknownColumn("missing column: " + name);
}

} // namespace

std::string plot_svg(const CsvTable& table, const std::string& kind) {
    if (table.rows.empty())
        throw UnknownColumn("CSV has no data rows");

    std::string svg = svg_open();
    if (kind == "trajectory") {
        std::size_t tc = find_col(table, "t");
        Frame f{};
        f.x0 = table.rows.front()[tc];
        f.x1 = table.rows.back()[tc];
        f.y0 = 1e300;
        f.y1 = -1e300;
        for (const auto& row : table.rows)
            for (std::size_t c = 0; c < row.size(); ++c)
                if (c != tc) {
                    f.y0 = std::min(f.y0, row[c]);
                    f.y1 = std::max(f.y1, row[c]);
                }
        svg += axes(f, "t", "tracked quantities");
        std::size_t ci = 0;
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            if (c == tc)
                continue;
            std::vector<std::pair<double, double>> pts;
            for (const auto& row : table.rows)
                pts.emplace_back(row[tc], row[c]);
            svg += polyline(pts, f, kColors[ci++ % 10]);
        }
    } else if (kind == "ledger") {
        std::size_t tc = find_col(table, "t");
        std::size_t rr = find_col(table, "residual_re");
        std::size_t ri = find_col(table, "residual_im");
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : table.rows) {
            double mag = std::hypot(row[rr], row[ri]);
            pts.emplace_back(row[tc], std::log10(std::max(mag, 1e-300)));
        }
        Frame f{};
        f.x0 = pts.front().first;
        f.x1 = pts.back().first;
        f.y0 = 1e300;
        f.y1 = -1e300;
        for (const auto& [x, y] : pts) {
            f.y0 = std::min(f.y0, y);
            f.y1 = std::max(f.y1, y);
        }
        svg += axes(f, "t", "log10 |residual|");
        svg += polyline(pts, f, kColors[1]);
    } else if (kind == "slope") {
        if (table.header.size() < 2)
            throw UnknownColumn("slope plot needs two columns");
        std::vector<std::pair<double, double>> pts;
        for (const auto& row : table.rows) {
            double x = row[0], y = std::abs(row[1]);
            // residual CSVs carry re/im parts: use the magnitude
            if (table.header.size() >= 3 && table.header[2].find("_im") != std::string::npos)
                y = std::hypot(row[1], row[2]);
            pts.emplace_back(std::log10(std::max(x, 1e-300)),
                             std::log10(std::max(y, 1e-300)));
        }
        Frame f{};
        f.x0 = f.x1 = pts.front().first;
        f.y0 = f.y1 = pts.front().second;
        for (const auto& [x, y] : pts) {
            f.x0 = std::min(f.x0, x);
            f.x1 = std::max(f.x1, x);
            f.y0 = std::min(f.y0, y);
            f.y1 = std::max(f.y1, y);
        }
        if (f.x0 == f.x1) {
            f.x0 -= 1;
            f.x1 += 1;
        }
        if (f.y0 == f.y1) {
            f.y0 -= 1;
            f.y1 += 1;
        }
        svg += axes(f, "log10 " + table.header[0], "log10 |" + table.header[1] + "|");
        // least-squares fit line
        double sx = 0, sy = 0, sxx = 0, sxy = 0, n = static_cast<double>(pts.size());
        for (const auto& [x, y] : pts) {
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = n * sxx - sx * sx;
        if (std::abs(denom) > 1e-30) {
            double b = (n * sxy - sx * sy) / denom;
            double a = (sy - b * sx) / n;
            svg += polyline({{f.x0, a + b * f.x0}, {f.x1, a + b * f.x1}}, f, kColors[2]);
        }
        for (const auto& [x, y] : pts) {
            svg += "<circle cx=\"" + coord(f.px(x)) + "\" cy=\"" + coord(f.py(y)) +
                   "\" r=\"3\" fill=\"" + kColors[0] + "\"/>\n";
        }
    } else {
        throw UnknownColumn("unknown plot kind: " + kind);
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace slelax
