#include "toruslab/serialize.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace toruslab {

std::string real_text(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Json to_json(const Angle& angle)
{
    Json rows = Json::array();
    const auto& t = angle.table();
    for (std::size_t n = 0; n < t.rows.size(); ++n) {
        const auto& r = t.rows[n];
        rows.push_back({{"n", n},
                        {"a", angle.a(static_cast<int>(n)).get_str()},
                        {"p", r.p.get_str()},
                        {"q", r.q.get_str()},
                        {"rho", to_decimal(r.rho)},
                        {"lambda", to_decimal(r.lambda)},
                        {"lambda_exact", to_fraction(r.lambda)}});
    }
    Json quotients = Json::array();
    for (const auto& a : angle.quotients())
        quotients.push_back(a.get_str());
    return {{"quotients", quotients},
            {"alpha", to_decimal(angle.value())},
            {"alpha_exact", to_fraction(angle.value())},
            {"depth", angle.depth()},
            {"horizon", angle.horizon()},
            {"rows", rows}};
}

Json to_json(const IntervalUnion& u)
{
    Json parts = Json::array();
    for (const auto& p : u.intervals()) {
        parts.push_back({{"lo", to_decimal(p.lo)},
                         {"hi", to_decimal(p.hi)},
                         {"lo_exact", to_fraction(p.lo)},
                         {"hi_exact", to_fraction(p.hi)},
                         {"lo_closed", p.lo_closed},
                         {"hi_closed", p.hi_closed}});
    }
    return {{"measure", to_decimal(u.measure())},
            {"measure_exact", to_fraction(u.measure())},
            {"arc_count", u.arc_count()},
            {"arcs_disjoint", u.arcs_disjoint()},
            {"intervals", parts}};
}

Json to_json(const BoundCheck& c)
{
    return {{"lemma", c.lemma},
            {"holds", c.holds},
            {"decisive", c.decisive},
            {"mode", to_string(c.mode)},
            {"condition_flag", c.condition_flag},
            {"lhs", c.lhs_text},
            {"rhs", c.rhs_text},
            {"slack", c.slack}};
}

Json to_json(const RegimeCertificate& c)
{
    Json w = Json::array();
    for (const auto& x : c.witnesses)
        w.push_back({{"n", x.n}, {"holds", x.holds}, {"lhs", x.lhs}, {"rhs", x.rhs}});
    return {{"kind", c.kind},
            {"witnesses", w},
            {"depth", c.depth},
            {"verdict_strength", c.verdict_strength},
            {"notes", c.notes}};
}

Json to_json(const RegimeVerdict& v)
{
    Json certs = Json::array();
    for (const auto& c : v.certificates)
        certs.push_back(to_json(c));
    return {{"regime", to_string(v.regime)},
            {"predicted_pomega", v.predicted_pomega},
            {"basis", v.basis},
            {"depth", v.depth},
            {"verdict_strength", v.verdict_strength},
            {"conflicts", v.conflicts},
            {"certificates", certs}};
}

Json to_json(const Error& e)
{
    Json j = {{"error", to_string(e.kind())}, {"detail", e.detail()}};
    if (e.index() >= 0)
        j["index"] = e.index();
    return j;
}

std::vector<Integer> parse_quotients(const std::string& text)
{
    std::vector<Integer> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
        if (item.empty())
            continue;
        Integer v;
        if (v.set_str(item, 10) != 0)
            throw Error(ErrorKind::InvalidArgument, "bad quotient '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::string sum_series_csv(const SumSeries& s)
{
    std::string out = "index,S_n,mode,condition_flag";
    bool exact = !s.exact.empty();
    out += exact ? ",S_n_exact\n" : "\n";
    for (std::size_t k = 0; k < s.size(); ++k) {
        out += std::to_string(k + 1) + ',';
        out += exact ? to_decimal(s.exact[k]) : real_text(s.approx[k]);
        out += ',';
        out += to_string(s.mode);
        out += s.condition_flag ? ",1" : ",0";
        if (exact)
            out += ',' + to_fraction(s.exact[k]);
        out += '\n';
    }
    return out;
}

std::string theta_series_csv(const SumSeries& num, const SumSeries& den)
{
    std::string out = "index,theta_n,mode,condition_flag";
    bool exact = !num.exact.empty() && !den.exact.empty();
    out += exact ? ",theta_n_exact\n" : "\n";
    bool flag = num.condition_flag || den.condition_flag;
    std::size_t n = std::min(num.size(), den.size());
    for (std::size_t k = 0; k < n; ++k) {
        out += std::to_string(k + 1) + ',';
        if (exact) {
            Rational t = num.exact[k] / den.exact[k];
            out += to_decimal(t) + ',' + to_string(num.mode) + (flag ? ",1," : ",0,") +
                   to_fraction(t);
        } else {
            out += real_text(num.approx[k] / den.approx[k]) + ',' + to_string(num.mode) +
                   (flag ? ",1" : ",0");
        }
        out += '\n';
    }
    return out;
}

std::string special_csv(const OccupancySeries& s)
{
    std::string out = "n,T_n,A_n,B_n,C_n,occ_p,occ_q,theta_proxy";
    bool exact = s.mode == Mode::Exact;
    out += exact ? ",occ_p_exact,theta_exact\n" : "\n";
    for (const auto& r : s.rows) {
        out += std::to_string(r.n) + ',' + real_text(r.T) + ',' + real_text(r.A) + ',' +
               real_text(r.B) + ',' + real_text(r.C) + ',' + real_text(r.occ_p) + ',' +
               real_text(r.occ_q) + ',' + real_text(r.theta_proxy);
        if (exact && r.occ_p_exact && r.theta_exact)
            out += ',' + to_fraction(*r.occ_p_exact) + ',' + to_fraction(*r.theta_exact);
        out += '\n';
    }
    return out;
}

std::string euler_csv(const EulerSeries& s)
{
    std::string out = "step,t_log10,x,y,in_box_p,in_box_q\n";
    for (const auto& p : s.trajectory) {
        double t = p.step > 0 ? std::log10(static_cast<double>(p.step)) : 0.0;
        out += std::to_string(p.step) + ',' + real_text(t) + ',' + real_text(p.x) + ',' +
               real_text(p.y) + (p.in_p ? ",1" : ",0") + (p.in_q ? ",1\n" : ",0\n");
    }
    return out;
}

std::string euler_occupancy_csv(const EulerSeries& s)
{
    std::string out = "step,t_log10,occ_p,occ_q\n";
    for (const auto& r : s.rows)
        out += std::to_string(r.step) + ',' + real_text(r.t_log10) + ',' + real_text(r.occ_p) +
               ',' + real_text(r.occ_q) + '\n';
    return out;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fixed(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string escape_xml(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Frame {
    double x0, x1, y0, y1;
    static constexpr double W = 640, H = 420, L = 60, R = 20, T = 40, B = 50;
    double px(double x) const { return L + (x - x0) / (x1 - x0) * (W - L - R); }
    double py(double y) const { return H - B - (y - y0) / (y1 - y0) * (H - T - B); }
};

std::string frame_svg(const Frame& f, const std::string& title, const std::string& xl,
                      const std::string& yl)
{
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" "
                    "font-family=\"sans-serif\" font-size=\"12\">\n"
                    "<rect width=\"640\" height=\"420\" fill=\"white\"/>\n";
    s += "<text x=\"320\" y=\"22\" text-anchor=\"middle\">" + escape_xml(title) + "</text>\n";
    s += "<rect x=\"60\" y=\"40\" width=\"560\" height=\"330\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
        double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
        s += "<text x=\"" + fixed(f.px(xv)) + "\" y=\"388\" text-anchor=\"middle\">" +
             escape_xml(real_text(std::round(xv * 1000) / 1000)) + "</text>\n";
        s += "<text x=\"55\" y=\"" + fixed(f.py(yv) + 4) + "\" text-anchor=\"end\">" +
             escape_xml(real_text(std::round(yv * 1000) / 1000)) + "</text>\n";
    }
    s += "<text x=\"340\" y=\"410\" text-anchor=\"middle\">" + escape_xml(xl) + "</text>\n";
    s += "<text x=\"15\" y=\"205\" text-anchor=\"middle\" transform=\"rotate(-90 15 205)\">" +
         escape_xml(yl) + "</text>\n";
    return s;
}

}  // namespace

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label)
{
    Frame f{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (const auto& s : series) {
        for (double x : s.xs) {
            f.x0 = std::min(f.x0, x);
            f.x1 = std::max(f.x1, x);
        }
        for (double y : s.ys) {
            f.y0 = std::min(f.y0, y);
            f.y1 = std::max(f.y1, y);
        }
    }
    if (!(f.x1 > f.x0)) {
        f.x0 = std::isfinite(f.x0) ? f.x0 - 1 : 0;
        f.x1 = f.x0 + 2;
    }
    if (!(f.y1 > f.y0)) {
        f.y0 = std::isfinite(f.y0) ? f.y0 - 1 : 0;
        f.y1 = f.y0 + 2;
    }
    std::string s = frame_svg(f, title, x_label, y_label);
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& ser = series[i];
        const char* colour = kPalette[i % 5];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" stroke-width=\"1.2\" points=\"";
        for (std::size_t k = 0; k < std::min(ser.xs.size(), ser.ys.size()); ++k)
            s += fixed(f.px(ser.xs[k])) + ',' + fixed(f.py(ser.ys[k])) + ' ';
        s += "\"/>\n";
        s += "<text x=\"" + fixed(70) + "\" y=\"" + fixed(56 + 14.0 * static_cast<double>(i)) +
             "\" fill=\"" + colour + "\">" + escape_xml(ser.name) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

std::string svg_scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& title, std::size_t max_points)
{
    Frame f{0.0, 1.0, 0.0, 1.0};
    std::string s = frame_svg(f, title, "x", "y");
    std::size_t n = std::min(xs.size(), ys.size());
    std::size_t stride = max_points > 0 && n > max_points ? (n + max_points - 1) / max_points : 1;
    s += "<g fill=\"#1f3b8c\">\n";
    for (std::size_t k = 0; k < n; k += stride)
        s += "<circle cx=\"" + fixed(f.px(xs[k])) + "\" cy=\"" + fixed(f.py(ys[k])) + "\" r=\"0.6\"/>\n";
    s += "</g>\n</svg>\n";
    return s;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

}  // namespace toruslab
