#include "toruslab/lab.hpp"

#include "toruslab/bad_sets.hpp"
#include "toruslab/bounds.hpp"
#include "toruslab/classifiers.hpp"
#include "toruslab/rotation_renorm.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace toruslab {

namespace fs = std::filesystem;

namespace {

std::vector<Integer> repeated(std::int64_t value, int count)
{
    std::vector<Integer> q{Integer(0)};
    for (int i = 0; i < count; ++i)
        q.push_back(to_integer(value));
    return q;
}

Rational rational_of(const Json& v)
{
    if (v.is_string())
        return parse_rational(v.get<std::string>());
    if (v.is_number_integer())
        return Rational(to_integer(v.get<std::int64_t>()));
    if (v.is_number_float())
        return parse_rational(real_text(v.get<double>()));
    if (v.is_boolean())
        return Rational(v.get<bool>() ? 1 : 0);
    throw Error(ErrorKind::InvalidArgument, "expected a number, got " + v.dump());
}

double double_of(const Json& v)
{
    if (v.is_number())
        return v.get<double>();
    return to_double(rational_of(v));
}

std::int64_t count_of(const Json& v)
{
    if (v.is_number_integer())
        return v.get<std::int64_t>();
    if (v.is_string())
        return parse_count(v.get<std::string>());
    if (v.is_number_float())
        return parse_count(real_text(v.get<double>()));
    throw Error(ErrorKind::InvalidArgument, "expected a count, got " + v.dump());
}

const Json& field(const Json& j, const std::string& key)
{
    auto it = j.find(key);
    if (it == j.end())
        throw Error(ErrorKind::InvalidArgument, "missing field '" + key + "'");
    return *it;
}

TorusPoint point_of(const Json& v)
{
    if (!v.is_array() || v.size() != 2)
        throw Error(ErrorKind::InvalidArgument, "points are [x, y] pairs");
    return {frac(rational_of(v[0])), frac(rational_of(v[1]))};
}

std::pair<double, double> pair_of(const Json& v)
{
    TorusPoint p = point_of(v);
    return {to_double(p.x), to_double(p.y)};
}

std::vector<Integer> integers_of(const Json& v)
{
    std::vector<Integer> out;
    for (const auto& e : v) {
        if (e.is_string())
            out.emplace_back(e.get<std::string>());
        else
            out.push_back(to_integer(e.get<std::int64_t>()));
    }
    return out;
}

}  // namespace

Angle named_angle(const std::string& spec)
{
    if (spec == "golden")
        return Angle::from_quotients(repeated(1, 60));
    if (spec == "sqrt2" || spec == "fig2-right")
        return Angle::from_quotients(repeated(2, 40));
    if (spec == "fig1")
        return Angle::from_quotients(expand_cf(parse_rational("0.764831"), 80));
    if (spec == "fig2-left") {
        Rational a = Rational(4, 13) + Rational(2, 135) + Rational(1, 26714) + Rational(2, 166267121);
        return Angle::from_quotients(expand_cf(a, 80));
    }
    if (spec == "w-construct")
        return construct_w_angle(1.0, 3, {Integer(0), Integer(4), Integer(7)}, 3);
    if (spec == "rapid-growth")
        return construct_rapid_growth_angle(1.0, 0.5, 5);
    return Angle::from_quotients(parse_quotients(spec));
}

Angle random_angle(std::mt19937_64& rng, std::int64_t max_quotient, int depth)
{
    std::uniform_int_distribution<std::int64_t> pick(1, max_quotient);
    std::vector<Integer> q{Integer(0)};
    for (int i = 0; i < depth; ++i)
        q.push_back(to_integer(pick(rng)));
    return Angle::from_quotients(std::move(q));
}

std::int64_t parse_count(const std::string& text)
{
    Rational r;
    try {
        r = parse_rational(text);
    } catch (const Error&) {
        throw Error(ErrorKind::InvalidArgument, "bad count '" + text + "'");
    }
    if (r.get_den() != 1 || sgn(r) < 0 || !fits_int64(r.get_num()))
        throw Error(ErrorKind::InvalidArgument, "count must be a non-negative integer: " + text);
    return to_int64(r.get_num());
}

// ---------------------------------------------------------------- presets

std::vector<std::string> preset_names()
{
    return {"fig1", "fig2-left", "fig2-right", "w-construct", "rapid-growth", "beta0-physical"};
}

namespace {

Json preset_defaults(const std::string& name)
{
    if (name == "fig1")
        return {{"preset", name}, {"kind", "euler"}, {"angle", "fig1"},
                {"delta", "0.1972348"}, {"p", {"0.25", "0.75"}}, {"q", {"0.75", "0.25"}},
                {"d_p", 1}, {"d_q", 1}, {"speed", "min-distance"}, {"start", {"0.1", "0.3"}},
                {"steps", 1000000}, {"ball_r", 0.05}, {"per_decade", 20},
                {"trajectory", 100000}, {"band_width", 0.01}};
    if (name == "fig2-left" || name == "fig2-right")
        return {{"preset", name}, {"kind", "euler"}, {"angle", name},
                {"delta", "0.1572348"}, {"p", {"0.25", "0.75"}}, {"q_flow_time", "8.357"},
                {"d_p", 1}, {"d_q", 1}, {"speed", "min-distance"},
                {"start", {"0.6319874", "0.3684641"}}, {"steps", 1000000}, {"ball_r", 0.05},
                {"per_decade", 20}, {"trajectory", 0}, {"band_width", 0.01}};
    if (name == "w-construct")
        return {{"preset", name}, {"kind", "construct"}, {"nu", 1}, {"k", 3},
                {"seed_prefix", {0, 4, 7}}, {"levels", 3}, {"beta", "1/3"}};
    if (name == "rapid-growth" || name == "beta0-physical") {
        Json j = {{"preset", name}, {"kind", "special"}, {"growth_C", 1}, {"growth_gamma", 0.5},
                  {"levels", 5}, {"p", {"1/2", "0"}}, {"d_p", 4}, {"d_q", 1},
                  {"model", "principal"}, {"per_decade", 20}, {"seed", 1}};
        if (name == "rapid-growth") {
            j["q_orbit"] = 1;
            j["returns"] = 1000000;
        } else {
            j["q_beta0"] = true;
            j["returns"] = 100000;
        }
        return j;
    }
    throw Error(ErrorKind::InvalidArgument, "unknown preset '" + name + "'");
}

Angle config_angle(const Json& c)
{
    if (c.contains("growth_C"))
        return construct_rapid_growth_angle(double_of(c["growth_C"]), double_of(c["growth_gamma"]),
                                            static_cast<int>(count_of(c["levels"])));
    return named_angle(field(c, "angle").get<std::string>());
}

FlowParams config_flow(const Json& c, const Angle& angle)
{
    FlowParams fp{angle, point_of(field(c, "p")), {}, double_of(field(c, "d_p")),
                  double_of(field(c, "d_q")), SpeedModel::QuadraticHessian, Rational(0)};
    if (c.value("speed", std::string("quadratic")) == "min-distance")
        fp.speed_model = SpeedModel::MinDistance;
    if (c.contains("q")) {
        fp.q = point_of(c["q"]);
    } else if (c.contains("q_flow_time")) {
        fp.q = linear_flow(angle, fp.p, rational_of(c["q_flow_time"]));
    } else if (c.contains("q_orbit")) {
        fp.q = {fp.p.x, frac(fp.p.y + Rational(to_integer(count_of(c["q_orbit"]))) * angle.value())};
    } else if (c.contains("q_beta0")) {
        Rational b0 = beta0_partial(angle, angle.horizon()).value;
        fp.q = {fp.p.x, frac(fp.p.y - b0)};
    } else {
        throw Error(ErrorKind::InvalidArgument, "preset needs q, q_flow_time, q_orbit or q_beta0");
    }
    return fp;
}

void validate(const Json& c)
{
    const std::string kind = field(c, "kind").get<std::string>();
    if (kind == "construct") {
        if (!(double_of(field(c, "nu")) > 0))
            throw Error(ErrorKind::InvalidArgument, "nu must be positive");
        return;
    }
    if (!(double_of(field(c, "d_p")) > 0) || !(double_of(field(c, "d_q")) > 0))
        throw Error(ErrorKind::NonPositiveDeterminant, "d_p and d_q must be positive");
    if (kind == "euler") {
        if (!(double_of(field(c, "delta")) > 0))
            throw Error(ErrorKind::InvalidArgument, "delta must be positive");
        double r = double_of(field(c, "ball_r"));
        if (!(r > 0 && r < 0.5))
            throw Error(ErrorKind::InvalidArgument, "ball_r must lie in (0, 1/2)");
        if (count_of(field(c, "steps")) < 1)
            throw Error(ErrorKind::InvalidArgument, "steps must be positive");
    } else if (kind == "special") {
        if (count_of(field(c, "returns")) < 1)
            throw Error(ErrorKind::InvalidArgument, "returns must be positive");
    } else {
        throw Error(ErrorKind::InvalidArgument, "unknown preset kind '" + kind + "'");
    }
    Angle angle = config_angle(c);
    FlowParams fp = config_flow(c, angle);
    if (fp.p.x == fp.q.x && fp.p.y == fp.q.y)
        throw Error(ErrorKind::InvalidArgument, "p and q must be distinct");
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

PresetOutput run_euler(const Json& c)
{
    Angle angle = config_angle(c);
    FlowParams fp = config_flow(c, angle);
    EulerOptions eo;
    eo.delta = double_of(c["delta"]);
    eo.steps = count_of(c["steps"]);
    eo.ball_r = double_of(c["ball_r"]);
    eo.per_decade = static_cast<int>(count_of(c["per_decade"]));
    eo.trajectory_limit = count_of(c["trajectory"]);
    EulerSeries s = euler_torus_simulate(fp, pair_of(c["start"]), eo);

    PresetOutput out;
    out.config = c;
    const std::string name = c["preset"].get<std::string>();
    out.files.push_back({"occupancy.csv", euler_occupancy_csv(s)});
    std::vector<double> t, op, oq;
    for (const auto& r : s.rows) {
        t.push_back(r.t_log10);
        op.push_back(r.occ_p);
        oq.push_back(r.occ_q);
    }
    out.files.push_back({"occupancy.svg", svg_line_plot({{"Box(p)", t, op}, {"Box(q)", t, oq}},
                                                        name + " occupancy", "log10 t",
                                                        "fraction of steps")});
    MuInfinity mu = mu_infinity(fp.d_p, fp.d_q);
    Json summary = {{"steps", eo.steps},
                    {"in_box_p", s.in_p},
                    {"in_box_q", s.in_q},
                    {"occ_p", s.rows.empty() ? 0.0 : s.rows.back().occ_p},
                    {"occ_q", s.rows.empty() ? 0.0 : s.rows.back().occ_q},
                    {"mu_inf_p", mu.weight_p},
                    {"mu_inf_q", mu.weight_q}};
    if (!s.trajectory.empty()) {
        out.files.push_back({"trajectory.csv", euler_csv(s)});
        std::vector<double> xs, ys;
        for (const auto& p : s.trajectory) {
            xs.push_back(p.x);
            ys.push_back(p.y);
        }
        out.files.push_back({"trajectory.svg", svg_scatter(xs, ys, name + " trajectory")});
        // A strip is a band between parallel strands of the line of slope alpha; sliding each
        // point along the flow direction down to y = 0 turns strips into empty x-intervals.
        double alpha = angle.alpha_hi() + angle.alpha_lo();
        std::vector<double> strands;
        strands.reserve(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            double u = xs[k] - ys[k] / alpha;
            strands.push_back(u - std::floor(u));
        }
        auto band_json = [](const std::vector<EmptyBand>& bands) {
            Json jb = Json::array();
            for (const auto& b : bands)
                jb.push_back({{"lo", b.lo}, {"hi", b.hi}, {"width", b.hi - b.lo}});
            return jb;
        };
        auto widest = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            double w = v.empty() ? 1.0 : v.front() + 1.0 - v.back();
            for (std::size_t k = 1; k < v.size(); ++k)
                w = std::max(w, v[k] - v[k - 1]);
            return w;
        };
        double width = double_of(c["band_width"]);
        auto x_bands = empty_bands(xs, width);
        auto s_bands = empty_bands(strands, width);
        summary["trajectory_points"] = xs.size();
        summary["x_empty_bands"] = band_json(x_bands);
        summary["x_empty_band_count"] = x_bands.size();
        summary["x_widest_gap"] = widest(xs);
        summary["strand_empty_bands"] = band_json(s_bands);
        summary["strand_empty_band_count"] = s_bands.size();
        summary["strand_widest_gap"] = widest(strands);
    }
    out.summary = summary;
    out.files.push_back({"summary.json", dump(summary)});
    return out;
}

PresetOutput run_special(const Json& c)
{
    Angle angle = config_angle(c);
    FlowParams fp = config_flow(c, angle);
    SpecialFlowOptions so;
    so.returns = count_of(c["returns"]);
    so.grid.per_decade = static_cast<int>(count_of(c["per_decade"]));
    so.mode = Mode::Double;
    if (c.value("model", std::string("principal")) == "boxes") {
        so.model = RoofModel::QuadraticBoxes;
        so.box_r = double_of(c.value("box_r", Json(0.1)));
    }
    Rational x;
    if (c.contains("x")) {
        x = frac(rational_of(c["x"]));
    } else {
        std::mt19937_64 rng(static_cast<std::uint64_t>(count_of(c["seed"])));
        x = exact_rational(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    }
    OccupancySeries s = special_flow_simulate(fp, x, so);
    RegimeVerdict v = regime_verdict(angle, fp, angle.horizon());

    PresetOutput out;
    out.config = c;
    const std::string name = c["preset"].get<std::string>();
    out.files.push_back({"special.csv", special_csv(s)});
    std::vector<double> t, op, oq;
    for (const auto& r : s.rows) {
        t.push_back(std::log10(static_cast<double>(r.n)));
        op.push_back(r.occ_p);
        oq.push_back(r.occ_q);
    }
    MuInfinity mu = mu_infinity(fp.d_p, fp.d_q);
    std::vector<double> target(t.size(), mu.weight_q);
    out.files.push_back({"occupancy.svg",
                         svg_line_plot({{"Box(p)", t, op}, {"Box(q)", t, oq}, {"mu_inf(q)", t, target}},
                                       name + " occupancy", "log10 returns", "fraction of time")});
    out.files.push_back({"angle.json", dump(to_json(angle))});
    out.files.push_back({"verdict.json", dump(to_json(v))});
    out.summary = {{"returns", so.returns},
                   {"x", to_fraction(x)},
                   {"occ_p", s.rows.empty() ? 0.0 : s.rows.back().occ_p},
                   {"occ_q", s.rows.empty() ? 0.0 : s.rows.back().occ_q},
                   {"mu_inf_p", mu.weight_p},
                   {"mu_inf_q", mu.weight_q},
                   {"regime", to_string(v.regime)},
                   {"tail_theta_min", s.tail_theta_min},
                   {"tail_theta_max", s.tail_theta_max}};
    out.files.push_back({"summary.json", dump(out.summary)});
    return out;
}

PresetOutput run_construct(const Json& c)
{
    double nu = double_of(c["nu"]);
    std::int64_t k = count_of(c["k"]);
    Angle angle = construct_w_angle(nu, k, integers_of(c["seed_prefix"]),
                                    static_cast<int>(count_of(c["levels"])));
    RegimeCertificate cert = w_membership(angle, nu, k, angle.horizon());
    Rational beta = frac(rational_of(c["beta"]));
    FlowParams fp{angle, {Rational(1, 2), Rational(0)}, {Rational(1, 2), beta}, 1.0, 1.0,
                  SpeedModel::QuadraticHessian, Rational(0)};
    VerdictOptions vo;
    vo.nu = nu;
    RegimeVerdict v = regime_verdict(angle, fp, angle.horizon(), vo);
    PresetOutput out;
    out.config = c;
    out.files.push_back({"angle.json", dump(to_json(angle))});
    out.files.push_back({"certificate.json", dump(to_json(cert))});
    out.files.push_back({"verdict.json", dump(to_json(v))});
    out.summary = {{"depth", angle.depth()},
                   {"witness_levels", cert.witnesses.size()},
                   {"regime", to_string(v.regime)}};
    out.files.push_back({"summary.json", dump(out.summary)});
    return out;
}

}  // namespace

namespace {

bool known_key(const std::string& key)
{
    static const std::set<std::string> keys = [] {
        std::set<std::string> k{"q", "q_flow_time", "q_orbit", "q_beta0", "x", "mode", "seed",
                                "model", "box_r", "trajectory", "returns", "steps"};
        for (const auto& name : preset_names()) {
            Json d = preset_defaults(name);
            for (auto it = d.begin(); it != d.end(); ++it)
                k.insert(it.key());
        }
        return k;
    }();
    return keys.count(key) > 0;
}

}  // namespace

Json preset_config(const std::string& name, const Json& overrides)
{
    Json c = preset_defaults(name);
    for (auto it = overrides.begin(); it != overrides.end(); ++it) {
        if (it.key() == "preset" || it.key() == "kind")
            throw Error(ErrorKind::InvalidArgument, "cannot override '" + it.key() + "'");
        if (!known_key(it.key()))
            throw Error(ErrorKind::InvalidArgument, "unknown preset key '" + it.key() + "'");
        c[it.key()] = it.value();
    }
    // Override aliases that replace the default way of placing q.
    if (overrides.contains("q") || overrides.contains("q_flow_time") ||
        overrides.contains("q_orbit") || overrides.contains("q_beta0")) {
        for (const char* key : {"q", "q_flow_time", "q_orbit", "q_beta0"})
            if (!overrides.contains(key))
                c.erase(key);
    }
    validate(c);
    return c;
}

PresetOutput compute_preset(const std::string& name, const Json& overrides)
{
    Json c = preset_config(name, overrides);
    const std::string kind = c["kind"].get<std::string>();
    if (kind == "euler")
        return run_euler(c);
    if (kind == "special")
        return run_special(c);
    return run_construct(c);
}

// ---------------------------------------------------------------- manifests

std::string utc_timestamp()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json to_json(const RunManifest& m)
{
    Json outputs = Json::array();
    for (const auto& a : m.outputs)
        outputs.push_back({{"name", a.name}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    return {{"command", m.command},
            {"config", m.config},
            {"tool_version", m.tool_version},
            {"started", m.started},
            {"finished", m.finished},
            {"outputs", outputs}};
}

RunManifest manifest_from_json(const Json& j)
{
    RunManifest m;
    m.command = field(j, "command").get<std::string>();
    m.config = field(j, "config");
    m.tool_version = j.value("tool_version", std::string());
    m.started = j.value("started", std::string());
    m.finished = j.value("finished", std::string());
    for (const auto& a : j.value("outputs", Json::array()))
        m.outputs.push_back({a["name"].get<std::string>(), a["sha256"].get<std::string>(),
                             a["bytes"].get<std::uint64_t>()});
    return m;
}

RunManifest write_outputs(const std::string& command, const Json& config,
                          const std::vector<OutputFile>& files, const std::string& out_dir,
                          const std::string& started)
{
    fs::create_directories(out_dir);
    RunManifest m;
    m.command = command;
    m.config = config;
    m.started = started;
    for (const auto& f : files) {
        std::ofstream os(fs::path(out_dir) / f.name, std::ios::binary);
        os.write(f.bytes.data(), static_cast<std::streamsize>(f.bytes.size()));
        if (!os)
            throw Error(ErrorKind::InvalidArgument, "cannot write " + f.name);
        m.outputs.push_back({f.name, sha256_hex(f.bytes), f.bytes.size()});
    }
    m.finished = utc_timestamp();
    std::ofstream os(fs::path(out_dir) / "manifest.json", std::ios::binary);
    os << to_json(m).dump(2) << "\n";
    return m;
}

RunManifest run_preset(const std::string& name, const Json& overrides, const std::string& out_dir)
{
    std::string started = utc_timestamp();
    PresetOutput p = compute_preset(name, overrides);
    Json config = {{"preset", name}, {"overrides", overrides}, {"resolved", p.config}};
    return write_outputs("preset", config, p.files, out_dir, started);
}

ReplayResult replay_manifest(const std::string& manifest_path, const std::string& out_dir)
{
    std::ifstream is(manifest_path);
    if (!is)
        throw Error(ErrorKind::InvalidArgument, "cannot read " + manifest_path);
    RunManifest recorded = manifest_from_json(Json::parse(is));
    ReplayResult r;
    const Json& c = recorded.config;
    std::string started = utc_timestamp();
    if (c.contains("preset")) {
        PresetOutput p = compute_preset(c["preset"].get<std::string>(),
                                        c.value("overrides", Json::object()));
        r.rerun = write_outputs(recorded.command, c, p.files, out_dir, started);
    } else if (c.contains("grid")) {
        std::string csv = sweep_csv(sweep(c["grid"]));
        r.rerun = write_outputs(recorded.command, c, {{"sweep.csv", csv}}, out_dir, started);
    } else {
        throw Error(ErrorKind::InvalidArgument, "manifest holds neither a preset nor a sweep grid");
    }
    std::map<std::string, std::string> fresh;
    for (const auto& a : r.rerun.outputs)
        fresh[a.name] = a.sha256;
    for (const auto& a : recorded.outputs) {
        auto it = fresh.find(a.name);
        if (it == fresh.end())
            r.mismatches.push_back(a.name + ": not produced");
        else if (it->second != a.sha256)
            r.mismatches.push_back(a.name + ": digest differs");
    }
    if (recorded.outputs.size() != r.rerun.outputs.size())
        r.mismatches.push_back("output count differs");
    r.identical = r.mismatches.empty();
    return r;
}

// ---------------------------------------------------------------- verify

namespace {

using Rng = std::mt19937_64;

struct Sample {
    std::vector<BoundCheck> checks;
    Json instance = Json::object();
};

struct TagContext {
    const VerifyConfig& config;
    Rng& rng;
    bool user;  // the instance comes from config.params
    std::string quotients = {};  // the angle actually used, for reproducing an instance
};

using Runner = std::function<Sample(TagContext&)>;

struct TagSpec {
    std::vector<std::string> instance_keys;
    int default_samples;
    Runner run;
};

double uniform(Rng& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

Rational random_point(Rng& rng) { return exact_rational(uniform(rng, 0.0, 1.0)); }

BoundCheck equality(const std::string& lemma, const Rational& lhs, const Rational& rhs)
{
    BoundCheck c;
    c.lemma = lemma;
    c.holds = lhs == rhs;
    c.lhs = to_double(lhs);
    c.rhs = to_double(rhs);
    c.lhs_text = to_fraction(lhs);
    c.rhs_text = to_fraction(rhs);
    c.slack = c.holds ? 0.0 : -1.0;
    return c;
}

BoundCheck predicate(const std::string& lemma, bool ok, const std::string& text)
{
    BoundCheck c;
    c.lemma = lemma;
    c.holds = ok;
    c.lhs_text = text;
    c.rhs_text = "true";
    c.slack = ok ? 0.0 : -1.0;
    return c;
}

const Json& param(const TagContext& t, const std::string& key) { return field(t.config.params, key); }

Angle context_angle(TagContext& t, std::int64_t max_q, int depth)
{
    Angle a = t.config.quotients ? Angle::from_quotients(*t.config.quotients)
              : t.user           ? named_angle("sqrt2")
                                 : random_angle(t.rng, max_q, depth);
    t.quotients.clear();
    for (const auto& v : a.quotients())
        t.quotients += (t.quotients.empty() ? "" : ",") + v.get_str();
    return a;
}

// Largest level within the horizon whose q_n stays below the cap.
int level_cap(const Angle& angle, std::int64_t q_cap, int lo = 1)
{
    int top = lo - 1;
    for (int n = lo; n <= angle.horizon(); ++n)
        if (angle.q(n) <= q_cap)
            top = n;
    return top;
}

int user_int(const TagContext& t, const std::string& key)
{
    return static_cast<int>(count_of(param(t, key)));
}

Sample run_cf_identities(TagContext& t)
{
    Angle a = context_angle(t, 50, 25);
    auto broken = check_convergent_identities(a);
    std::string text = broken.empty() ? "all identities hold" : broken.front();
    Sample s;
    s.checks.push_back(predicate("convergent identities", broken.empty(), text));
    Json q = Json::array();
    for (const auto& v : a.quotients())
        q.push_back(v.get_str());
    s.instance = {{"quotients", q}, {"violations", broken}};
    return s;
}

Sample run_lemma_size(TagContext& t)
{
    Angle a = context_angle(t, 20, 12);
    int n;
    std::int64_t ell;
    if (t.user) {
        n = user_int(t, "n");
        ell = count_of(param(t, "ell"));
    } else {
        std::vector<std::pair<int, std::int64_t>> pairs;
        for (int m = 0; m <= a.horizon() && a.q(m + 1) <= 10'000; ++m)
            for (std::int64_t l = 1; Integer(l) * a.q(m) < a.q(m + 1); ++l)
                pairs.push_back({m, l});
        if (pairs.empty())
            hypothesis_violated("some l q_n < q_{n+1} <= 10^4");
        auto pick = pairs[static_cast<std::size_t>(uniform_int(t.rng, 0, static_cast<std::int64_t>(pairs.size()) - 1))];
        n = pick.first;
        ell = pick.second;
    }
    a.require_level(n, "size level");
    if (ell < 1)
        hypothesis_violated("ell>=1");
    if (!(Integer(ell) * a.q(n) < a.q(n + 1)))
        hypothesis_violated("ell q_n < q_{n+1}");
    IntervalUnion E = build_E(a, n, ell);
    Rational expected = Rational(Integer(ell) * a.q(n)) * a.lambda(n);
    Sample s;
    s.checks.push_back(equality("size of E", E.measure(), expected));
    s.checks.push_back(predicate("arcs disjoint", E.arcs_disjoint(), "disjoint arcs"));
    s.instance = {{"n", n}, {"ell", ell}, {"measure", to_decimal(E.measure())},
                  {"measure_exact", to_fraction(E.measure())}, {"expected", to_fraction(expected)}};
    return s;
}

Sample run_sector(TagContext& t)
{
    Angle a = context_angle(t, 10, 16);
    int n;
    Rational y;
    if (t.user) {
        n = user_int(t, "n");
        y = rational_of(param(t, "y"));
    } else {
        int top = level_cap(a, 100'000);
        n = static_cast<int>(uniform_int(t.rng, 1, std::max(1, top)));
        y = random_point(t.rng);
    }
    SectorReport r = sector_sum_bounds(a, y, n, t.config.mode);
    Sample s;
    s.checks = {r.lower, r.upper};
    s.instance = {{"n", n}, {"y", to_fraction(y)}, {"S", r.S}, {"mode", to_string(r.mode)}};
    return s;
}

Sample run_kq(TagContext& t)
{
    Angle a = context_angle(t, 10, 16);
    int n;
    std::int64_t k;
    Rational x;
    if (t.user) {
        n = user_int(t, "n");
        k = count_of(param(t, "k"));
        x = rational_of(param(t, "x"));
    } else {
        k = uniform_int(t.rng, 1, 5);
        int top = level_cap(a, 100'000 / k);
        n = static_cast<int>(uniform_int(t.rng, 1, std::max(1, top)));
        x = random_point(t.rng);
    }
    Sample s;
    s.checks.push_back(kq_lower_bound_check(a, x, n, k, t.config.mode));
    s.instance = {{"n", n}, {"k", k}, {"x", to_fraction(x)}};
    return s;
}

Sample run_lipschitz(TagContext& t)
{
    Angle a = context_angle(t, 10, 16);
    int n;
    Rational x, y;
    if (t.user) {
        n = user_int(t, "n");
        x = rational_of(param(t, "x"));
        y = rational_of(param(t, "y"));
    } else {
        int top = level_cap(a, 2000);
        n = static_cast<int>(uniform_int(t.rng, 1, std::max(1, top)));
        x = random_point(t.rng);
        y = frac(x + a.lambda(n) * exact_rational(uniform(t.rng, -1.0, 1.0)));
    }
    LipschitzReport r = lipschitz_transfer(a, x, y, n);
    Sample s;
    s.checks = {r.psi1, r.psi2};
    s.instance = {{"n", n}, {"x", to_fraction(x)}, {"y", to_fraction(y)}, {"j0", r.j0}, {"j1", r.j1}};
    return s;
}

Sample run_rational_shadow(TagContext& t)
{
    std::int64_t q;
    Rational delta;
    std::vector<Rational> pts;
    if (t.user) {
        q = count_of(param(t, "q"));
        delta = rational_of(param(t, "delta"));
        Rational offset = t.config.params.contains("offset") ? rational_of(t.config.params["offset"]) : Rational(0);
        for (std::int64_t k = 1; k < q; ++k)
            pts.push_back(frac(ratio(to_integer(k), to_integer(q)) + offset));
    } else {
        q = uniform_int(t.rng, 2, 200);
        delta = Rational(1, to_integer(q)) * exact_rational(uniform(t.rng, 0.01, 0.99));
        for (std::int64_t k = 1; k < q; ++k)
            pts.push_back(frac(ratio(to_integer(k), to_integer(q)) +
                               delta * exact_rational(uniform(t.rng, -0.999, 0.999))));
    }
    Sample s;
    s.checks.push_back(rational_shadow_sum_bound(q, delta, pts));
    s.instance = {{"q", q}, {"delta", to_fraction(delta)}};
    return s;
}

Sample run_offgrid(TagContext& t)
{
    std::int64_t q;
    Rational A, beta;
    if (t.user) {
        q = count_of(param(t, "q"));
        A = rational_of(param(t, "A"));
        beta = rational_of(param(t, "beta"));
    } else {
        Rational gap;
        do {
            q = uniform_int(t.rng, 1, 2000);
            beta = random_point(t.rng);
            gap = circle_norm(Rational(to_integer(q)) * beta);
        } while (sgn(gap) == 0);
        A = gap * exact_rational(uniform(t.rng, 0.01, 0.99));
    }
    Sample s;
    s.checks.push_back(offgrid_sum_bound(q, A, beta));
    s.instance = {{"q", q}, {"A", to_fraction(A)}, {"beta", to_fraction(beta)}};
    return s;
}

Sample run_smallest_distance(TagContext& t)
{
    Integer a, b, q;
    if (t.user) {
        a = rational_of(param(t, "a")).get_num();
        b = rational_of(param(t, "b")).get_num();
        q = rational_of(param(t, "q")).get_num();
    } else {
        std::int64_t bb = uniform_int(t.rng, 2, 60), aa, qq;
        do {
            aa = uniform_int(t.rng, 1, bb - 1);
        } while (std::gcd(aa, bb) != 1);
        do {
            qq = uniform_int(t.rng, 1, 5000);
        } while (std::gcd(qq, bb) != 1);
        a = to_integer(aa);
        b = to_integer(bb);
        q = to_integer(qq);
    }
    MarginReport m = smallest_distance_margin(a, b, q);
    Sample s;
    s.checks.push_back(compare_exact("smallest distance", m.margin, Relation::GreaterEqual, m.bound));
    s.instance = {{"a", a.get_str()}, {"b", b.get_str()}, {"q", q.get_str()},
                  {"margin", to_fraction(m.margin)}};
    return s;
}

Sample run_ground_floor(TagContext& t)
{
    Angle a = context_angle(t, 50, 14);
    int n;
    std::int64_t ell;
    Rational x;
    bool widened;
    if (t.user) {
        n = user_int(t, "n");
        ell = count_of(param(t, "ell"));
        x = rational_of(param(t, "x"));
        widened = t.config.params.value("widened", false);
    } else {
        std::vector<int> levels;
        for (int m = 1; m <= a.horizon() && a.q(m + 1) <= 100'000; ++m)
            levels.push_back(m);
        if (levels.empty())
            hypothesis_violated("a level with q_{n+1} <= 10^5");
        n = levels[static_cast<std::size_t>(uniform_int(t.rng, 0, static_cast<std::int64_t>(levels.size()) - 1))];
        ell = uniform_int(t.rng, 1, to_int64(a.a(n + 1)));
        widened = uniform_int(t.rng, 0, 1) == 1;
        x = sample_E(a, n, ell, t.rng, widened);
    }
    Sample s;
    s.checks.push_back(ground_floor_lower_bound(a, n, ell, x, widened, t.config.mode));
    s.instance = {{"n", n}, {"ell", ell}, {"x", to_fraction(x)}, {"widened", widened}};
    return s;
}

Sample run_close_return(TagContext& t)
{
    Angle a = context_angle(t, 3, 18);
    int n;
    std::int64_t i;
    Rational eps, x;
    if (t.user) {
        n = user_int(t, "n");
        i = count_of(param(t, "i"));
        eps = rational_of(param(t, "epsilon"));
        x = rational_of(param(t, "x"));
    } else {
        std::vector<int> levels;
        for (int m = 11; m <= a.horizon(); ++m)
            if (a.a(m + 1) >= 2 && a.q(m) <= 2'000'000)
                levels.push_back(m);
        if (levels.empty())
            hypothesis_violated("a level n>=11 with a_{n+1}>=2");
        n = levels[static_cast<std::size_t>(uniform_int(t.rng, 0, static_cast<std::int64_t>(levels.size()) - 1))];
        i = uniform_int(t.rng, 1, to_int64(a.q(n)) - 1);
        eps = exact_rational(uniform(t.rng, 0.05, 0.95));
        long double q = to_long_double(Rational(a.q(n)));
        long double radius = to_long_double(eps) / (q * std::log(3.0L * q));
        double offset = static_cast<double>(radius * 0.999L) * uniform(t.rng, -1.0, 1.0);
        if (offset == 0.0)
            offset = static_cast<double>(radius) / 2;
        x = frac(exact_rational(offset) - Rational(to_integer(i)) * a.value());
    }
    Sample s;
    s.checks.push_back(close_return_dominance(a, x, i, n, eps, t.config.mode));
    s.instance = {{"n", n}, {"i", i}, {"epsilon", to_fraction(eps)}, {"x", to_decimal(x)}};
    return s;
}

Sample run_abc(TagContext& t)
{
    Angle a = context_angle(t, 60, 12);
    int n;
    std::int64_t ell;
    Rational beta, A, B, x;
    if (t.user) {
        n = user_int(t, "n");
        ell = count_of(param(t, "ell"));
        beta = rational_of(param(t, "beta"));
        A = rational_of(param(t, "A"));
        B = rational_of(param(t, "B"));
        x = rational_of(param(t, "x"));
    } else {
        std::vector<int> levels;
        for (int m = 1; m <= a.horizon() && a.q(m + 1) <= 100'000; ++m)
            if (a.a(m + 1) >= 14)
                levels.push_back(m);
        if (levels.empty())
            hypothesis_violated("a level with a_{n+1} >= 14");
        n = levels[static_cast<std::size_t>(uniform_int(t.rng, 0, static_cast<std::int64_t>(levels.size()) - 1))];
        Rational qn(a.q(n));
        beta = frac((Rational(to_integer(uniform_int(t.rng, 0, to_int64(a.q(n)) - 1))) +
                     exact_rational(uniform(t.rng, 0.3, 0.7))) / qn);
        A = circle_norm(qn * beta) * exact_rational(0.99);
        B = A * exact_rational(uniform(t.rng, 0.5, 0.95));
        std::int64_t top = to_int64(floor_of(B * Rational(a.a(n + 1)))) - 1;
        if (top < 1)
            hypothesis_violated("ell+1 <= B a_{n+1}");
        ell = uniform_int(t.rng, 1, top);
        x = sample_E(a, n, ell, t.rng);
    }
    Sample s;
    s.checks.push_back(abc_upper_bound(a, n, ell, beta, A, B, x, t.config.mode));
    s.instance = {{"n", n}, {"ell", ell}, {"beta", to_fraction(beta)}, {"A", to_decimal(A)},
                  {"B", to_decimal(B)}};
    return s;
}

Sample run_theta_symmetry(TagContext& t)
{
    Angle a = context_angle(t, 50, 25);
    std::int64_t n;
    Rational x, beta;
    if (t.user) {
        n = count_of(param(t, "n"));
        x = rational_of(param(t, "x"));
        beta = rational_of(param(t, "beta"));
    } else {
        n = uniform_int(t.rng, 1, 200);
        x = random_point(t.rng);
        beta = random_point(t.rng);
    }
    Rational jx = j_involution(a, n, beta, x);
    Rational product = theta(a, x, beta, n) * theta(a, jx, beta, n);
    Sample s;
    s.checks.push_back(equality("theta symmetry", product, Rational(1)));
    s.instance = {{"n", n}, {"x", to_fraction(x)}, {"beta", to_fraction(beta)}};
    return s;
}

Sample run_harmonic(TagContext& t)
{
    std::int64_t a_max = t.config.params.contains("a_max") ? count_of(t.config.params["a_max"]) : 100'000;
    HarmonicConstant h = harmonic_log_constant(a_max);
    Sample s;
    BoundCheck c = compare_exact("harmonic log constant", exact_rational(h.smallest_C),
                                 Relation::LessEqual, Rational(3));
    s.checks.push_back(c);
    s.instance = {{"a_max", a_max}, {"smallest_C", h.smallest_C}, {"attained_at", h.attained_at}};
    return s;
}

Sample run_bad_set_escape(TagContext& t)
{
    Angle a = context_angle(t, 5, 14);
    Schedule u = schedule_loglog();
    int n;
    std::int64_t i;
    Rational x, xp;
    if (t.user) {
        n = user_int(t, "n");
        i = count_of(param(t, "i"));
        x = rational_of(param(t, "x"));
        xp = t.config.params.contains("x_prime") ? rational_of(t.config.params["x_prime"]) : x;
    } else {
        int top = level_cap(a, 10'000, 1);
        while (top >= 1 && a.q(top + 1) > 10'000)
            --top;
        if (top < 1)
            hypothesis_violated("a level with q_{n+1} <= 10^4");
        n = static_cast<int>(uniform_int(t.rng, 1, top));
        do {
            x = random_point(t.rng);
        } while (in_bad_set(a, u, n, x));
        i = uniform_int(t.rng, to_int64(a.q(n)), to_int64(a.q(n + 1)) - 1);
        xp = frac(x + a.lambda(n) * exact_rational(uniform(t.rng, -1.0, 1.0)));
    }
    Sample s;
    s.checks.push_back(bad_set_escape_check(a, u, n, x, i, xp, t.config.mode));
    s.instance = {{"n", n}, {"i", i}, {"x", to_fraction(x)}, {"x_prime", to_fraction(xp)}};
    return s;
}

const std::map<std::string, TagSpec>& registry()
{
    static const std::map<std::string, TagSpec> tags = {
        {"cf-identities", {{}, 20, run_cf_identities}},
        {"lemma-size", {{"n", "ell"}, 100, run_lemma_size}},
        {"sector-bounds", {{"n", "y"}, 100, run_sector}},
        {"kq-orbit", {{"n", "k", "x"}, 100, run_kq}},
        {"lipschitz-transfer", {{"n", "x", "y"}, 100, run_lipschitz}},
        {"rational-shadow", {{"q", "delta"}, 100, run_rational_shadow}},
        {"offgrid-sum", {{"q", "A", "beta"}, 100, run_offgrid}},
        {"smallest-distance", {{"a", "b", "q"}, 100, run_smallest_distance}},
        {"ground-floor", {{"n", "ell", "x"}, 100, run_ground_floor}},
        {"close-return", {{"n", "i", "epsilon", "x"}, 100, run_close_return}},
        {"abc", {{"n", "ell", "beta", "A", "B", "x"}, 100, run_abc}},
        {"theta-symmetry", {{"n", "x", "beta"}, 100, run_theta_symmetry}},
        {"harmonic-constant", {{"a_max"}, 1, run_harmonic}},
        {"bad-set-escape", {{"n", "i", "x"}, 100, run_bad_set_escape}},
    };
    return tags;
}

void tally(VerifyReport& r, const Sample& s)
{
    bool ok = true, undecided = false;
    for (const auto& c : s.checks) {
        if (c.mode == Mode::Exact)
            ++r.exact_checks;
        else
            ++r.double_checks;
        r.condition_flags += c.condition_flag;
        r.worst_slack = std::min(r.worst_slack, c.slack);
        if (!c.decisive)
            undecided = true;
        else if (!c.holds)
            ok = false;
    }
    ++r.samples;
    if (!ok)
        ++r.failed;
    else if (undecided)
        ++r.undecided;
    else
        ++r.passed;
    Json inst = s.instance;
    inst["status"] = !ok ? "fail" : (undecided ? "undecided" : "pass");
    Json checks = Json::array();
    for (const auto& c : s.checks)
        checks.push_back(to_json(c));
    inst["checks"] = checks;
    if (!ok || undecided || r.instances.size() < 20)
        r.instances.push_back(inst);
}

VerifyReport verify_dominance(const VerifyConfig& config);

}  // namespace

int VerifyReport::exit_code() const
{
    if (failed > 0 || undecided > 0)
        return 2;
    if (user_instance && hypothesis_violated > 0)
        return 2;
    return 0;
}

Json to_json(const VerifyReport& r)
{
    return {{"tag", r.tag},
            {"samples", r.samples},
            {"passed", r.passed},
            {"failed", r.failed},
            {"undecided", r.undecided},
            {"hypothesis_violated", r.hypothesis_violated},
            {"condition_flags", r.condition_flags},
            {"exact_checks", r.exact_checks},
            {"double_checks", r.double_checks},
            {"worst_slack", r.worst_slack},
            {"user_instance", r.user_instance},
            {"details", r.details},
            {"instances", r.instances}};
}

std::vector<std::string> verify_tags()
{
    std::vector<std::string> out;
    for (const auto& [k, v] : registry())
        out.push_back(k);
    out.push_back("dominance");
    std::sort(out.begin(), out.end());
    return out;
}

VerifyReport verify_suite(const std::string& tag, const VerifyConfig& config)
{
    if (tag == "dominance")
        return verify_dominance(config);
    auto it = registry().find(tag);
    if (it == registry().end())
        throw Error(ErrorKind::UnknownLemmaTag, "unknown lemma tag '" + tag + "'");
    const TagSpec& spec = it->second;

    VerifyReport r;
    r.tag = tag;
    bool user = false;
    for (const auto& k : spec.instance_keys)
        user = user || config.params.contains(k);
    r.user_instance = user;
    r.worst_slack = INFINITY;
    Rng rng(config.seed);
    int target = user ? 1 : (config.samples > 0 ? config.samples : spec.default_samples);
    int rejected = 0;
    while (r.samples < target) {
        TagContext t{config, rng, user};
        try {
            Sample smp = spec.run(t);
            if (!t.quotients.empty() && !config.quotients)
                smp.instance["quotients"] = t.quotients;
            tally(r, smp);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::HypothesisViolated && e.kind() != ErrorKind::LevelBeyondHorizon)
                throw;
            if (user) {
                ++r.hypothesis_violated;
                r.instances.push_back({{"status", "hypothesis-violated"}, {"clause", e.detail()}});
                break;
            }
            // A sampler drew an inadmissible instance; draw again.
            if (++rejected > 100 * target)
                throw Error(ErrorKind::InvariantBroken, "sampler for " + tag + " keeps missing its hypotheses: " + e.detail());
        }
    }
    r.details["rejected_draws"] = rejected;
    if (!std::isfinite(r.worst_slack))
        r.worst_slack = 0.0;
    return r;
}

namespace {

VerifyReport verify_dominance(const VerifyConfig& config)
{
    const Json& p = config.params;
    double nu = p.contains("nu") ? double_of(p["nu"]) : 1.0;
    std::int64_t b = p.contains("b") ? count_of(p["b"]) : 3;
    double K = p.contains("K") ? double_of(p["K"]) : 2.0;
    std::vector<Integer> seed = p.contains("seed_prefix") ? integers_of(p["seed_prefix"])
                                                          : std::vector<Integer>{0, 4, 7};
    int levels = p.contains("levels") ? static_cast<int>(count_of(p["levels"])) : 3;
    if (b < 2)
        hypothesis_violated("b>=2");
    if (!(K > 1))
        hypothesis_violated("K>1");
    Angle angle = config.quotients ? Angle::from_quotients(*config.quotients)
                                   : construct_w_angle(nu, b, seed, levels);
    Rational beta = p.contains("beta") ? frac(rational_of(p["beta"])) : Rational(1, to_integer(b));
    Rational nu_r = exact_rational(nu), K_r = exact_rational(K);
    Rational bK = Rational(to_integer(b)) * K_r;

    // Witness level: the deepest one carrying the W property whose window fits the term budget.
    int n = -1;
    std::int64_t ell = 0;
    for (int m = 1; m <= angle.horizon(); ++m) {
        const Integer& q = angle.q(m);
        Integer g;
        mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), Integer(b).get_mpz_t());
        if (q < 2 || g != 1 || !power_at_least(angle.a(m + 1), q, nu))
            continue;
        Rational a(angle.a(m + 1));
        Integer l = floor_of(nu_r * a / (16 * bK)) + 1;
        if (Rational(l) > nu_r * a / (8 * bK) || l * q > 20'000'000)
            continue;
        n = m;
        ell = to_int64(l);
    }
    if (n < 0)
        hypothesis_violated("a W level with nu a_{n+1}/(16bK) < l <= nu a_{n+1}/(8bK)");
    std::int64_t m = ell * to_int64(angle.q(n));

    VerifyReport r;
    r.tag = "dominance";
    r.worst_slack = INFINITY;
    EMeasure em = e_measure_certified(angle, n, ell);
    Rational floor_bound = nu_r / (64 * bK);
    Sample ms;
    ms.checks.push_back(compare_exact("E measure", em.measure, Relation::GreaterEqual, floor_bound));
    ms.checks.push_back(predicate("arcs disjoint", em.disjoint, "disjoint arcs"));
    ms.instance = {{"kind", "E-measure"}, {"measure", to_decimal(em.measure)},
                   {"bound", to_fraction(floor_bound)}};
    tally(r, ms);

    Rng rng(config.seed);
    int samples = config.samples > 0 ? config.samples : 50;
    int dominated = 0;
    for (int s = 0; s < samples; ++s) {
        Rational x = sample_E(angle, n, ell, rng);
        DoubleSum A = birkhoff_sum_double(angle, x, m);
        DoubleSum B = birkhoff_sum_double(angle, frac(x - beta), m);
        double err = A.rel_error_bound + B.rel_error_bound;
        BoundCheck c;
        c.lemma = "S_m(x) > K S_m(x-beta)";
        c.mode = Mode::Double;
        c.condition_flag = A.condition_flag || B.condition_flag;
        c.lhs = A.value;
        c.rhs = K * B.value;
        c.lhs_text = real_text(c.lhs);
        c.rhs_text = real_text(c.rhs);
        c.slack = c.lhs / c.rhs - 1.0;
        c.holds = c.lhs > c.rhs * (1 + err);
        c.decisive = c.holds || c.lhs < c.rhs * (1 - err);
        dominated += c.holds && c.decisive;
        Sample smp;
        smp.checks.push_back(c);
        smp.instance = {{"x", to_decimal(x)}, {"ratio", A.value / B.value}};
        tally(r, smp);
    }
    r.details = {{"quotients_depth", angle.depth()},
                 {"n", n},
                 {"q_n", angle.q(n).get_str()},
                 {"a_n+1", angle.a(n + 1).get_str()},
                 {"ell", ell},
                 {"m", m},
                 {"beta", to_fraction(beta)},
                 {"K", K},
                 {"E_measure", to_decimal(em.measure)},
                 {"E_measure_exact", to_fraction(em.measure)},
                 {"E_bound", to_fraction(floor_bound)},
                 {"dominated", dominated},
                 {"dominance_samples", samples},
                 {"dominated_fraction", static_cast<double>(dominated) / samples}};
    if (!std::isfinite(r.worst_slack))
        r.worst_slack = 0.0;
    return r;
}

// ---------------------------------------------------------------- sweep

Rational beta_from_recipe(const Angle& a, const std::string& recipe)
{
    auto colon = recipe.find(':');
    std::string kind = recipe.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : recipe.substr(colon + 1);
    if (kind == "rational" || kind == "value")
        return frac(parse_rational(arg));
    if (kind == "generic")
        return generic_beta(a, static_cast<int>(parse_count(arg)), Integer(1));
    if (kind == "same-orbit")
        return frac(Rational(to_integer(static_cast<std::int64_t>(std::stoll(arg)))) * a.value());
    if (kind == "beta0") {
        int N = arg.empty() ? a.horizon() : static_cast<int>(parse_count(arg));
        return frac(-beta0_partial(a, N).value);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown beta recipe '" + recipe + "'");
}

SweepRow sweep_cell(std::size_t cell, const std::string& angle_spec, const std::string& recipe,
                    double K, int depth, std::uint64_t seed)
{
    SweepRow row;
    row.cell = cell;
    row.angle = angle_spec;
    row.beta_recipe = recipe;
    row.K = K;
    row.depth = depth;
    try {
        Angle a = named_angle(angle_spec);
        Rational beta = beta_from_recipe(a, recipe);
        row.beta = to_decimal(beta);
        if (sgn(beta) == 0)
            hypothesis_violated("beta != 0");
        if (!(K > 1))
            hypothesis_violated("K>1");
        a.require_level(depth, "sweep depth", 1);
        if (a.q(depth) > 10'000'000)
            hypothesis_violated("q_depth <= 10^7");
        row.m = to_int64(a.q(depth));
        FlowParams fp{a, {Rational(1, 2), Rational(0)}, {Rational(1, 2), beta}, 1.0, 1.0,
                      SpeedModel::QuadraticHessian, Rational(0)};
        RegimeVerdict v = regime_verdict(a, fp, depth);
        row.regime = to_string(v.regime);
        row.predicted_pomega = v.predicted_pomega;
        std::seed_seq ss{seed, static_cast<std::uint64_t>(cell)};
        Rng rng(ss);
        Rational x = random_point(rng);
        row.theta = row.m <= kExactTermLimit ? to_double(theta(a, x, beta, row.m))
                                             : theta_double(a, x, beta, row.m);
        row.dominance = row.theta > K;
        row.status = "ok";
    } catch (const Error& e) {
        bool hyp = e.kind() == ErrorKind::HypothesisViolated || e.kind() == ErrorKind::LevelBeyondHorizon;
        row.status = hyp ? "hypothesis-violated" : "error";
        row.detail = std::string(to_string(e.kind())) + ": " + e.detail();
    }
    return row;
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::vector<std::string> string_list(const Json& grid, const std::string& key)
{
    std::vector<std::string> out;
    for (const auto& e : field(grid, key)) {
        if (e.is_string())
            out.push_back(e.get<std::string>());
        else if (e.is_array())
            out.push_back([&] {
                std::string s;
                for (const auto& v : e)
                    s += (s.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
                return s;
            }());
        else
            throw Error(ErrorKind::InvalidArgument, "grid '" + key + "' entries must be strings");
    }
    return out;
}

int thread_count(int requested)
{
    if (requested > 0)
        return requested;
    if (const char* env = std::getenv("TORUSLAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0)
            return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::vector<SweepRow> sweep(const Json& grid, int threads, const std::vector<SweepRow>& completed)
{
    auto angles = string_list(grid, "angles");
    auto betas = string_list(grid, "betas");
    std::vector<double> Ks;
    for (const auto& k : grid.value("K", Json::array({2})))
        Ks.push_back(double_of(k));
    std::vector<int> depths;
    for (const auto& d : grid.value("depth", Json::array({8})))
        depths.push_back(static_cast<int>(count_of(d)));
    std::uint64_t seed = grid.contains("seed") ? static_cast<std::uint64_t>(count_of(grid["seed"])) : 1;

    struct Cell {
        std::string angle, beta;
        double K;
        int depth;
    };
    std::vector<Cell> cells;
    for (const auto& a : angles)
        for (const auto& b : betas)
            for (double K : Ks)
                for (int d : depths)
                    cells.push_back({a, b, K, d});

    std::vector<SweepRow> rows(cells.size());
    std::vector<char> done(cells.size(), 0);
    for (const auto& r : completed) {
        if (r.cell < cells.size() && r.status == "ok" && r.angle == cells[r.cell].angle &&
            r.beta_recipe == cells[r.cell].beta) {
            rows[r.cell] = r;
            done[r.cell] = 1;
        }
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            if (done[i])
                continue;
            const Cell& c = cells[i];
            rows[i] = sweep_cell(i, c.angle, c.beta, c.K, c.depth, seed);
        }
    };
    int n = std::min<int>(thread_count(threads), static_cast<int>(std::max<std::size_t>(1, cells.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows)
{
    std::string out = "cell,angle,beta_recipe,beta,K,depth,status,regime,predicted_pomega,m,theta,dominance,detail\n";
    for (const auto& r : rows) {
        out += std::to_string(r.cell) + ',' + csv_field(r.angle) + ',' + csv_field(r.beta_recipe) +
               ',' + r.beta + ',' + real_text(r.K) + ',' + std::to_string(r.depth) + ',' + r.status +
               ',' + r.regime + ',' + csv_field(r.predicted_pomega) + ',' + std::to_string(r.m) +
               ',' + real_text(r.theta) + ',' + (r.dominance ? "1" : "0") + ',' +
               csv_field(r.detail) + '\n';
    }
    return out;
}

std::vector<SweepRow> parse_sweep_csv(const std::string& text)
{
    std::vector<SweepRow> rows;
    std::istringstream is(text);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) {
        auto f = split_csv_line(line);
        if (f.size() != 13)
            continue;
        SweepRow r;
        r.cell = std::stoull(f[0]);
        r.angle = f[1];
        r.beta_recipe = f[2];
        r.beta = f[3];
        r.K = std::stod(f[4]);
        r.depth = std::stoi(f[5]);
        r.status = f[6];
        r.regime = f[7];
        r.predicted_pomega = f[8];
        r.m = std::stoll(f[9]);
        r.theta = std::stod(f[10]);
        r.dominance = f[11] == "1";
        r.detail = f[12];
        rows.push_back(r);
    }
    return rows;
}

}  // namespace toruslab
