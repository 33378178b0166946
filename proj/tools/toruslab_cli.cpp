#include "toruslab/bad_sets.hpp"
#include "toruslab/classifiers.hpp"
#include "toruslab/lab.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

using namespace toruslab;

namespace {

// Raised for hypothesis-violation reports that are not exceptions of the library.
struct ReportExit {
    int code;
};

struct Common {
    std::string quotients;
    std::string preset;
    std::string out;
    std::uint64_t seed = 1;
    std::string mode;
    int depth = -1;
    int samples = 0;
    bool json = false;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--quotients", c.quotients, "comma-separated partial quotients a_0,a_1,...");
    sub->add_option("--preset", c.preset, "named angle or experiment preset");
    sub->add_option("--out", c.out, "output directory for CSV/JSON/SVG and manifest.json");
    sub->add_option("--seed", c.seed, "seed of the single random generator");
    sub->add_option("--mode", c.mode, "exact or double")->check(CLI::IsMember({"exact", "double"}));
    sub->add_option("--depth", c.depth, "level depth");
    sub->add_option("--samples", c.samples, "number of sampled instances");
    sub->add_flag("--json", c.json, "print JSON to stdout");
}

Angle angle_of(const Common& c)
{
    if (!c.quotients.empty())
        return Angle::from_quotients(parse_quotients(c.quotients));
    if (!c.preset.empty())
        return named_angle(c.preset);
    throw Error(ErrorKind::InvalidArgument, "give --quotients or --preset");
}

std::optional<Mode> mode_of(const Common& c)
{
    if (c.mode.empty())
        return std::nullopt;
    return parse_mode(c.mode);
}

Json common_json(const Common& c)
{
    Json j = {{"seed", c.seed}};
    if (!c.quotients.empty())
        j["quotients"] = c.quotients;
    if (!c.preset.empty())
        j["preset"] = c.preset;
    if (!c.mode.empty())
        j["mode"] = c.mode;
    if (c.depth >= 0)
        j["depth"] = c.depth;
    if (c.samples > 0)
        j["samples"] = c.samples;
    return j;
}

// --key value pairs left over after the declared options.
Json extras_json(const std::vector<std::string>& extras)
{
    Json j = Json::object();
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string key = extras[i];
        if (key.rfind("--", 0) != 0)
            throw Error(ErrorKind::InvalidArgument, "unexpected argument '" + key + "'");
        key = key.substr(2);
        std::string value;
        auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key = key.substr(0, eq);
        } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
            value = extras[++i];
        } else {
            j[key] = true;
            continue;
        }
        std::replace(key.begin(), key.end(), '-', '_');
        if (value == "true" || value == "false") {
            j[key] = value == "true";
        } else if (value.find(',') != std::string::npos) {
            Json arr = Json::array();
            std::stringstream ss(value);
            std::string item;
            while (std::getline(ss, item, ','))
                arr.push_back(item);
            j[key] = arr;
        } else {
            j[key] = value;
        }
    }
    return j;
}

Json set_overrides(const std::vector<std::string>& sets)
{
    std::vector<std::string> flat;
    for (const auto& s : sets) {
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorKind::InvalidArgument, "--set expects key=value, got '" + s + "'");
        flat.push_back("--" + s.substr(0, eq));
        flat.push_back(s.substr(eq + 1));
    }
    return extras_json(flat);
}

void emit(const Common& c, const std::string& command, const Json& config,
          const std::vector<OutputFile>& files, const Json& stdout_json, const std::string& started)
{
    if (!c.out.empty())
        write_outputs(command, config, files, c.out, started);
    if (c.json || c.out.empty())
        std::cout << stdout_json.dump(2) << "\n";
}

std::string angle_text_table(const Angle& a)
{
    std::string s = "n\ta_n\tp_n\tq_n\tlambda_n\n";
    for (int n = 0; n <= a.depth(); ++n)
        s += std::to_string(n) + '\t' + a.a(n).get_str() + '\t' + a.p(n).get_str() + '\t' +
             a.q(n).get_str() + '\t' + to_decimal(a.lambda(n)) + '\n';
    return s;
}

Schedule schedule_of(const std::string& spec)
{
    if (spec == "loglog")
        return schedule_loglog();
    if (spec == "log")
        return schedule_v_default();
    if (spec.rfind("power:", 0) == 0)
        return schedule_power(std::stold(spec.substr(6)));
    throw Error(ErrorKind::InvalidArgument, "schedules are loglog, log or power:<e>");
}

int run(int argc, const char* const* argv);

int replay(const std::string& manifest_path, const std::string& out_dir)
{
    std::ifstream is(manifest_path);
    if (!is)
        throw Error(ErrorKind::InvalidArgument, "cannot read " + manifest_path);
    Json mj = Json::parse(is);
    RunManifest recorded = manifest_from_json(mj);
    if (out_dir.empty())
        throw Error(ErrorKind::InvalidArgument, "--replay needs --out");
    Json result;
    if (recorded.config.contains("argv")) {
        std::vector<std::string> args{"toruslab"};
        const Json& av = recorded.config["argv"];
        for (std::size_t i = 0; i < av.size(); ++i) {
            std::string a = av[i].get<std::string>();
            if (a == "--out") {
                ++i;
                continue;
            }
            args.push_back(a);
        }
        args.push_back("--out");
        args.push_back(out_dir);
        std::vector<const char*> ptrs;
        for (const auto& a : args)
            ptrs.push_back(a.c_str());
        std::streambuf* old = std::cout.rdbuf();
        std::ostringstream sink;
        std::cout.rdbuf(sink.rdbuf());
        int code = run(static_cast<int>(ptrs.size()), ptrs.data());
        std::cout.rdbuf(old);
        std::ifstream fresh_is(std::filesystem::path(out_dir) / "manifest.json");
        RunManifest fresh = manifest_from_json(Json::parse(fresh_is));
        std::vector<std::string> mismatches;
        for (const auto& a : recorded.outputs) {
            auto it = std::find_if(fresh.outputs.begin(), fresh.outputs.end(),
                                   [&](const Artifact& f) { return f.name == a.name; });
            if (it == fresh.outputs.end())
                mismatches.push_back(a.name + ": not produced");
            else if (it->sha256 != a.sha256)
                mismatches.push_back(a.name + ": digest differs");
        }
        result = {{"identical", mismatches.empty()}, {"mismatches", mismatches}, {"exit_code", code}};
    } else {
        ReplayResult r = replay_manifest(manifest_path, out_dir);
        result = {{"identical", r.identical}, {"mismatches", r.mismatches}};
    }
    std::cout << result.dump(2) << "\n";
    return result["identical"].get<bool>() ? 0 : 1;
}

int run(int argc, const char* const* argv)
{
    CLI::App app{"Exact and numerical experiments on torus flows with two stopping points"};
    app.require_subcommand(0, 1);
    std::string replay_path, replay_out;
    app.add_option("--replay", replay_path, "re-run a manifest.json and compare digests");
    app.add_option("--replay-out", replay_out, "output directory for --replay");

    std::vector<std::string> argv_record;
    for (int i = 1; i < argc; ++i)
        argv_record.emplace_back(argv[i]);
    const std::string started = utc_timestamp();
    Json base_config = {{"argv", argv_record}};
    int exit_code = 0;

    // convergents
    Common cv;
    auto* s_conv = app.add_subcommand("convergents", "convergent table of an angle");
    add_common(s_conv, cv);
    s_conv->callback([&] {
        Angle a = angle_of(cv);
        Json j = to_json(a);
        std::string text = j.dump(2) + "\n";
        if (!cv.json && cv.out.empty()) {
            std::cout << angle_text_table(a);
            return;
        }
        emit(cv, "convergents", base_config, {{"convergents.json", text}}, j, started);
    });

    // classify
    Common cl;
    std::string cl_p = "1/2,0", cl_q, cl_beta;
    double cl_dp = 1.0, cl_dq = 1.0;
    bool cl_strict = false;
    auto* s_cls = app.add_subcommand("classify", "regime verdict for an angle and stopping points");
    add_common(s_cls, cl);
    s_cls->add_option("--p", cl_p, "stopping point p as x,y");
    s_cls->add_option("--q", cl_q, "stopping point q as x,y");
    s_cls->add_option("--beta", cl_beta, "place q at p + (0, beta) instead of --q");
    s_cls->add_option("--dp", cl_dp, "Hessian determinant at p");
    s_cls->add_option("--dq", cl_dq, "Hessian determinant at q");
    s_cls->add_flag("--strict", cl_strict, "fail on conflicting certificates");
    s_cls->callback([&] {
        Angle a = angle_of(cl);
        auto pt = [](const std::string& s) {
            auto v = extras_json({"--v", s})["v"];
            if (!v.is_array() || v.size() != 2)
                throw Error(ErrorKind::InvalidArgument, "points are given as x,y");
            return TorusPoint{frac(parse_rational(v[0].get<std::string>())),
                              frac(parse_rational(v[1].get<std::string>()))};
        };
        FlowParams fp{a, pt(cl_p), {}, cl_dp, cl_dq, SpeedModel::QuadraticHessian, Rational(0)};
        if (!cl_q.empty())
            fp.q = pt(cl_q);
        else if (!cl_beta.empty())
            fp.q = {fp.p.x, frac(fp.p.y + parse_rational(cl_beta))};
        else
            throw Error(ErrorKind::InvalidArgument, "give --q or --beta");
        VerdictOptions vo;
        vo.strict = cl_strict;
        RegimeVerdict v = regime_verdict(a, fp, cl.depth >= 0 ? cl.depth : a.horizon(), vo);
        Json j = to_json(v);
        emit(cl, "classify", base_config, {{"verdict.json", j.dump(2) + "\n"}}, j, started);
    });

    // construct-angle
    Common ca;
    std::string ca_kind = "w", ca_seed = "0";
    double ca_nu = 1.0, ca_C = 1.0, ca_gamma = 0.5;
    std::int64_t ca_k = 3;
    int ca_levels = 3;
    auto* s_con = app.add_subcommand("construct-angle", "build a W(nu,k) or rapid-growth angle");
    add_common(s_con, ca);
    s_con->add_option("kind", ca_kind, "w or rapid-growth")->check(CLI::IsMember({"w", "rapid-growth"}));
    s_con->add_option("--nu", ca_nu, "exponent nu");
    s_con->add_option("--k", ca_k, "coprimality modulus k");
    s_con->add_option("--C", ca_C, "growth constant C");
    s_con->add_option("--gamma", ca_gamma, "growth exponent gamma");
    s_con->add_option("--levels", ca_levels, "number of constructed levels");
    s_con->add_option("--seed-prefix", ca_seed, "initial quotients a_0,...");
    s_con->callback([&] {
        auto seed = parse_quotients(ca_seed);
        Angle a = ca_kind == "w" ? construct_w_angle(ca_nu, ca_k, seed, ca_levels)
                                 : construct_rapid_growth_angle(ca_C, ca_gamma, ca_levels, seed);
        RegimeCertificate cert = ca_kind == "w" ? w_membership(a, ca_nu, ca_k, a.horizon())
                                                : growth_check(a, ca_C, ca_gamma, a.horizon());
        Json j = {{"angle", to_json(a)}, {"certificate", to_json(cert)}};
        emit(ca, "construct-angle", base_config,
             {{"angle.json", to_json(a).dump(2) + "\n"}, {"certificate.json", to_json(cert).dump(2) + "\n"}},
             j, started);
    });

    // birkhoff
    Common bk;
    std::string bk_x = "0";
    std::string bk_n = "100";
    auto* s_bk = app.add_subcommand("birkhoff", "Birkhoff sums S_1..S_n of 1/||x + i alpha||");
    add_common(s_bk, bk);
    s_bk->add_option("--x", bk_x, "base point");
    s_bk->add_option("--n", bk_n, "number of terms");
    s_bk->callback([&] {
        Angle a = angle_of(bk);
        std::int64_t n = parse_count(bk_n);
        Mode mode = mode_of(bk).value_or(n <= kExactTermLimit ? Mode::Exact : Mode::Double);
        SumSeries s = birkhoff_S(a, parse_rational(bk_x), n, mode);
        Json j = {{"n", n}, {"mode", to_string(s.mode)}, {"condition_flag", s.condition_flag},
                  {"S_n", s.exact.empty() ? real_text(s.approx.back()) : to_decimal(s.exact.back())}};
        if (!s.exact.empty())
            j["S_n_exact"] = to_fraction(s.exact.back());
        emit(bk, "birkhoff", base_config, {{"sums.csv", sum_series_csv(s)}}, j, started);
    });

    // theta
    Common th;
    std::string th_x = "0", th_beta = "1/3", th_n = "100";
    auto* s_th = app.add_subcommand("theta", "ratio S_n(x)/S_n(x - beta)");
    add_common(s_th, th);
    s_th->add_option("--x", th_x, "base point");
    s_th->add_option("--beta", th_beta, "offset beta");
    s_th->add_option("--n", th_n, "number of terms");
    s_th->callback([&] {
        Angle a = angle_of(th);
        std::int64_t n = parse_count(th_n);
        Mode mode = mode_of(th).value_or(n <= kExactTermLimit ? Mode::Exact : Mode::Double);
        Rational x = parse_rational(th_x), beta = parse_rational(th_beta);
        SumSeries num = birkhoff_S(a, x, n, mode);
        SumSeries den = birkhoff_S(a, frac(x - beta), n, mode);
        double last = num.approx.back() / den.approx.back();
        Json j = {{"n", n}, {"mode", to_string(mode)}, {"theta_n", real_text(last)},
                  {"condition_flag", num.condition_flag || den.condition_flag}};
        if (mode == Mode::Exact)
            j["theta_n_exact"] = to_fraction(num.exact.back() / den.exact.back());
        emit(th, "theta", base_config, {{"theta.csv", theta_series_csv(num, den)}}, j, started);
    });

    // badsets
    Common bs;
    int bs_lo = 2, bs_hi = 10;
    std::string bs_u = "loglog", bs_v = "log";
    auto* s_bs = app.add_subcommand("badsets", "measure ledger of the bad sets D_n");
    add_common(s_bs, bs);
    s_bs->add_option("--n-lo", bs_lo, "first level");
    s_bs->add_option("--n-hi", bs_hi, "last level");
    s_bs->add_option("--u", bs_u, "u_n schedule: loglog, log or power:<e>");
    s_bs->add_option("--v", bs_v, "v_n schedule: loglog, log or power:<e>");
    s_bs->callback([&] {
        Angle a = angle_of(bs);
        auto rows = bad_set_ledger(a, schedule_of(bs_u), schedule_of(bs_v), bs_lo, bs_hi);
        std::string csv = "n,u_n,v_n,measure,measure_exact,partial_sum,v_weighted_partial,v_next_over_u\n";
        Json j = Json::array();
        for (const auto& r : rows) {
            csv += std::to_string(r.n) + ',' + real_text(static_cast<double>(r.u)) + ',' +
                   real_text(static_cast<double>(r.v)) + ',' + real_text(static_cast<double>(r.measure)) +
                   (r.measure_exact ? ",1," : ",0,") + real_text(static_cast<double>(r.partial_sum)) + ',' +
                   real_text(static_cast<double>(r.v_weighted_partial)) + ',' +
                   real_text(static_cast<double>(r.v_next_over_u)) + '\n';
            j.push_back({{"n", r.n}, {"u", static_cast<double>(r.u)}, {"v", static_cast<double>(r.v)},
                         {"measure", static_cast<double>(r.measure)}, {"measure_exact", r.measure_exact},
                         {"partial_sum", static_cast<double>(r.partial_sum)}});
        }
        emit(bs, "badsets", base_config, {{"badsets.csv", csv}}, j, started);
    });

    // verify
    Common vf;
    std::string vf_tag;
    auto* s_vf = app.add_subcommand("verify", "run a registered bound oracle on sampled or given instances");
    add_common(s_vf, vf);
    s_vf->add_option("tag", vf_tag, "lemma tag")->required();
    s_vf->allow_extras();
    s_vf->callback([&] {
        if (vf_tag == "list") {
            std::cout << Json(verify_tags()).dump(2) << "\n";
            return;
        }
        VerifyConfig config;
        if (!vf.quotients.empty())
            config.quotients = parse_quotients(vf.quotients);
        else if (!vf.preset.empty())
            config.quotients = named_angle(vf.preset).quotients();
        config.samples = vf.samples;
        config.seed = vf.seed;
        config.mode = mode_of(vf);
        config.params = extras_json(s_vf->remaining());
        VerifyReport r = verify_suite(vf_tag, config);
        Json j = to_json(r);
        Json cfg = base_config;
        cfg["params"] = config.params;
        Common shown = vf;
        shown.json = true;
        emit(shown, "verify", cfg, {{"verify.json", j.dump(2) + "\n"}}, j, started);
        exit_code = r.exit_code();
    });

    // simulate
    Common sm;
    std::string sm_kind;
    std::string sm_steps, sm_returns;
    std::vector<std::string> sm_sets;
    auto* s_sm = app.add_subcommand("simulate", "run an Euler or special-flow preset");
    add_common(s_sm, sm);
    s_sm->add_option("kind", sm_kind, "euler or special")->required()->check(CLI::IsMember({"euler", "special"}));
    s_sm->add_option("--steps", sm_steps, "Euler steps (accepts 1e7)");
    s_sm->add_option("--returns", sm_returns, "special-flow returns (accepts 1e6)");
    s_sm->add_option("--set", sm_sets, "override key=value");
    s_sm->callback([&] {
        if (sm.preset.empty())
            throw Error(ErrorKind::InvalidArgument, "simulate needs --preset");
        Json overrides = set_overrides(sm_sets);
        if (!sm_steps.empty())
            overrides["steps"] = parse_count(sm_steps);
        if (!sm_returns.empty())
            overrides["returns"] = parse_count(sm_returns);
        if (sm.seed != 1)
            overrides["seed"] = sm.seed;
        PresetOutput p = compute_preset(sm.preset, overrides);
        std::string kind = p.config["kind"].get<std::string>();
        if ((sm_kind == "euler") != (kind == "euler"))
            throw Error(ErrorKind::InvalidArgument, "preset " + sm.preset + " is a " + kind + " preset");
        Json cfg = {{"preset", sm.preset}, {"overrides", overrides}, {"resolved", p.config}};
        emit(sm, "simulate " + sm_kind, cfg, p.files, p.summary, started);
    });

    // preset
    Common ps;
    std::string ps_name;
    std::vector<std::string> ps_sets;
    auto* s_ps = app.add_subcommand("preset", "run a named preset end to end");
    add_common(s_ps, ps);
    s_ps->add_option("name", ps_name, "preset name, or 'list'");
    s_ps->add_option("--set", ps_sets, "override key=value");
    s_ps->callback([&] {
        std::string name = ps_name.empty() ? ps.preset : ps_name;
        if (name.empty() || name == "list") {
            Json j = Json::object();
            for (const auto& n : preset_names())
                j[n] = preset_config(n);
            std::cout << j.dump(2) << "\n";
            return;
        }
        Json overrides = set_overrides(ps_sets);
        PresetOutput p = compute_preset(name, overrides);
        Json cfg = {{"preset", name}, {"overrides", overrides}, {"resolved", p.config}};
        emit(ps, "preset", cfg, p.files, p.summary, started);
    });

    // sweep
    Common sw;
    std::string sw_grid;
    int sw_threads = 0;
    bool sw_resume = false;
    auto* s_sw = app.add_subcommand("sweep", "verdict and dominance rows over a parameter grid");
    add_common(s_sw, sw);
    s_sw->add_option("--grid", sw_grid, "grid JSON file or inline JSON")->required();
    s_sw->add_option("--threads", sw_threads, "worker count (default TORUSLAB_THREADS)");
    s_sw->add_flag("--resume", sw_resume, "keep completed rows of an earlier run in --out");
    s_sw->callback([&] {
        Json grid;
        if (!sw_grid.empty() && sw_grid.front() == '{') {
            grid = Json::parse(sw_grid);
        } else {
            std::ifstream is(sw_grid);
            if (!is)
                throw Error(ErrorKind::InvalidArgument, "cannot read grid " + sw_grid);
            grid = Json::parse(is);
        }
        if (sw.seed != 1 || !grid.contains("seed"))
            grid["seed"] = sw.seed;
        std::vector<SweepRow> completed;
        if (sw_resume && !sw.out.empty()) {
            std::ifstream ms(std::filesystem::path(sw.out) / "manifest.json");
            std::ifstream cs(std::filesystem::path(sw.out) / "sweep.csv");
            if (ms && cs) {
                RunManifest old = manifest_from_json(Json::parse(ms));
                if (old.config.value("grid", Json()) == grid) {
                    std::stringstream buf;
                    buf << cs.rdbuf();
                    completed = parse_sweep_csv(buf.str());
                }
            }
        }
        auto rows = sweep(grid, sw_threads, completed);
        Json summary = {{"cells", rows.size()}};
        std::map<std::string, int> by_status;
        for (const auto& r : rows)
            ++by_status[r.status];
        summary["status"] = by_status;
        Json cfg = {{"grid", grid}};
        std::string csv = sweep_csv(rows);
        if (!sw.out.empty())
            write_outputs("sweep", cfg, {{"sweep.csv", csv}}, sw.out, started);
        if (sw.json)
            std::cout << summary.dump(2) << "\n";
        else if (sw.out.empty())
            std::cout << csv;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        Json j = {{"error", "UsageError"}, {"detail", e.what()}};
        std::cerr << j.dump() << "\n";
        return 1;
    }
    if (!replay_path.empty())
        return replay(replay_path, replay_out);
    if (app.get_subcommands().empty()) {
        Json j = {{"error", "UsageError"}, {"detail", "a subcommand is required"}};
        std::cerr << j.dump() << "\n";
        return 1;
    }
    return exit_code;
}

}  // namespace

int main(int argc, char** argv)
{
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        std::cerr << to_json(e).dump() << "\n";
        return e.kind() == ErrorKind::HypothesisViolated ? 2 : 1;
    } catch (const Json::exception& e) {
        std::cerr << Json{{"error", "InvalidArgument"}, {"detail", e.what()}}.dump() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << Json{{"error", "InternalError"}, {"detail", e.what()}}.dump() << "\n";
        return 1;
    }
}
