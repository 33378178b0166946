// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any fails.
// `acceptance --only k` runs a single criterion.

#include "toruslab/bad_sets.hpp"
#include "toruslab/birkhoff_sums.hpp"
#include "toruslab/cf_core.hpp"
#include "toruslab/error.hpp"
#include "toruslab/flow_dynamics.hpp"
#include "toruslab/lab.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace toruslab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty())
                detail += "; ";
            detail += "FAILED " + what;
        }
    }
    void note(const std::string& what)
    {
        if (!detail.empty())
            detail += "; ";
        detail += what;
    }
};

std::vector<std::int64_t> ones_then(std::vector<std::int64_t> head, std::int64_t v, int count)
{
    head.insert(head.end(), static_cast<std::size_t>(count), v);
    return head;
}

std::string fmt(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Rational random_unit_rational(std::mt19937_64& rng, std::int64_t den)
{
    std::uniform_int_distribution<std::int64_t> pick(1, den - 1);
    return ratio(to_integer(pick(rng)), to_integer(den));
}

// 1. Convergent identities on random angles plus the golden q_11.
Outcome criterion_1()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    int broken = 0;
    for (int t = 0; t < 20; ++t) {
        Angle a = random_angle(rng, 50, 25);
        broken += static_cast<int>(check_convergent_identities(a).size());
    }
    o.require(broken == 0, std::to_string(broken) + " identity violations");
    Angle g = named_angle("golden");
    o.require(g.q(11) == 144, "golden q_11 = 144");
    o.require(check_convergent_identities(g).empty(), "golden identities");
    o.note("20 random angles, 0 violations; golden q_11 = " + g.q(11).get_str());
    return o;
}

// 2. lambda(E_{n,l}) = l q_n lambda^{(n)} exactly.
Outcome criterion_2()
{
    Outcome o;
    std::mt19937_64 rng(7);
    std::vector<Angle> angles{named_angle("sqrt2"), named_angle("golden"),
                              named_angle("0,3,1,4,1,5,9,2,6,5,3,5,8,9,7,9,3,2")};
    angles.push_back(random_angle(rng, 6, 20));
    angles.push_back(random_angle(rng, 12, 20));
    int cases = 0, bad = 0;
    for (const auto& a : angles)
        for (int n = 0; n <= a.horizon() && a.q(n + 1) <= 10000; ++n)
            for (std::int64_t ell = 1; a.q(n + 1) > ell * a.q(n); ++ell) {
                Rational expect = Rational(to_integer(ell)) * a.q(n) * a.lambda(n);
                IntervalUnion E = build_E(a, n, ell);
                EMeasure cert = e_measure_certified(a, n, ell);
                ++cases;
                if (E.measure() != expect || cert.measure != expect || !cert.disjoint)
                    ++bad;
            }
    o.require(bad == 0, std::to_string(bad) + " mismatches");
    o.require(cases > 50, "enough (n, l) pairs");
    o.note(std::to_string(cases) + " (n, l) pairs on 5 angles, all exact");
    return o;
}

// 3. Theta_n(x) Theta_n(J x) = 1.
Outcome criterion_3()
{
    Outcome o;
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> len(1, 200);
    int done = 0, bad = 0, skipped = 0;
    while (done < 1000) {
        Angle a = random_angle(rng, 9, 30);
        Rational x = random_unit_rational(rng, 1000003);
        Rational beta = random_unit_rational(rng, 999983);
        int n = len(rng);
        try {
            Rational jx = j_involution(a, n, beta, x);
            if (theta(a, x, beta, n) * theta(a, jx, beta, n) != 1)
                ++bad;
            ++done;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::OrbitHitsPole)
                throw;
            ++skipped;
        }
    }
    o.require(bad == 0, std::to_string(bad) + " products differ from 1");
    o.note("1000 triples exact, " + std::to_string(skipped) + " redrawn at a pole");
    return o;
}

// 4. The bound-lemma oracle batch.
Outcome criterion_4()
{
    Outcome o;
    const char* tags[] = {"sector-bounds",   "kq-orbit",         "lipschitz-transfer",
                          "rational-shadow", "offgrid-sum",      "smallest-distance",
                          "ground-floor",    "close-return"};
    for (const char* tag : tags) {
        VerifyConfig cfg;
        cfg.samples = 100;
        cfg.seed = 4;
        VerifyReport r = verify_suite(tag, cfg);
        bool ok = r.samples >= 100 && r.passed == r.samples && r.failed == 0 && r.undecided == 0;
        o.require(ok, std::string(tag) + " " + std::to_string(r.passed) + "/" +
                          std::to_string(r.samples));
        o.note(std::string(tag) + " " + std::to_string(r.passed) + "/" +
               std::to_string(r.samples) + " (exact " + std::to_string(r.exact_checks) +
               ", double " + std::to_string(r.double_checks) + ", flags " +
               std::to_string(r.condition_flags) + ")");
    }
    return o;
}

// 5. Scaled extreme-historic dominance.
Outcome criterion_5()
{
    Outcome o;
    VerifyConfig cfg;
    cfg.seed = 5;
    VerifyReport r = verify_suite("dominance", cfg);
    const Json& d = r.details;
    Rational measure = parse_rational(d["E_measure_exact"].get<std::string>());
    Rational bound = parse_rational(d["E_bound"].get<std::string>());
    double fraction = d["dominated_fraction"].get<double>();
    o.require(measure >= bound, "lambda(E) >= nu/(64 b K)");
    o.require(fraction >= 0.99, "dominated fraction " + fmt(fraction));
    o.note("q_n = " + d["q_n"].get<std::string>() + ", l = " + d["ell"].dump() + ", m = " +
           d["m"].dump() + ", lambda(E) = " + d["E_measure"].get<std::string>() + " >= " +
           d["E_bound"].get<std::string>() + ", dominated " + fmt(fraction));
    return o;
}

// 6. Close-return spike for a same-orbit pair.
Outcome criterion_6()
{
    Outcome o;
    Angle a = Angle::from_quotients(ones_then({0}, 2, 39));
    FlowParams fp{a, {Rational(1, 2), Rational(0)}, {Rational(1, 2), frac(7 * a.value())}};
    SectionData sec = section_setup(fp);
    SpecialFlowOptions so;
    so.returns = 100000;
    so.mode = Mode::Double;
    std::mt19937_64 rng(6);
    std::uniform_int_distribution<std::int64_t> tail_index(20000, 90000);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    // Closeness window eps/(q_n log 3 q_n) of the close-return lemma, with eps = 1/100.
    const Rational eps(1, 100);
    for (int s = 0; s < 5; ++s) {
        std::int64_t j = tail_index(rng);
        int n = 0;
        while (a.q(n + 1) <= j)
            ++n;
        long double qn = to_long_double(Rational(a.q(n)));
        Rational width = eps * exact_rational(static_cast<double>(1.0L / (qn * std::log(3 * qn))));
        Rational x = frac(sec.p0 - Rational(to_integer(j)) * a.value() +
                          exact_rational(U(rng)) * width);
        OccupancySeries out = special_flow_simulate(fp, x, so);
        bool ok = std::fabs(out.tail_theta_min - 1.0) <= 0.1 && out.tail_theta_max > 10.0;
        o.require(ok, "sample " + std::to_string(s));
        o.note("j = " + std::to_string(j) + ": tail min " + fmt(out.tail_theta_min) + ", max " +
               fmt(out.tail_theta_max));
    }
    return o;
}

// 7. Box(q) occupancy settles towards sqrt(d_p)/(sqrt(d_p)+sqrt(d_q)).
Outcome criterion_7()
{
    Outcome o;
    Angle a = construct_rapid_growth_angle(1, 0.5, 5);
    FlowParams fp{a, {Rational(1, 2), Rational(0)}, {Rational(1, 2), frac(a.value())}, 4, 1};
    SpecialFlowOptions so;
    so.returns = 1000000;
    so.mode = Mode::Double;
    so.grid.per_decade = 20;
    std::mt19937_64 rng(1);
    Rational x = exact_rational(std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    OccupancySeries s = special_flow_simulate(fp, x, so);
    double target = std::sqrt(4.0) / (std::sqrt(4.0) + std::sqrt(1.0));
    std::vector<double> lo(7, INFINITY), hi(7, -INFINITY);
    for (const auto& r : s.rows) {
        int dec = static_cast<int>(std::floor(std::log10(static_cast<double>(r.n)) - 1e-12));
        if (dec < 1 || dec > 6)
            continue;
        lo[static_cast<std::size_t>(dec)] = std::min(lo[static_cast<std::size_t>(dec)], r.occ_q);
        hi[static_cast<std::size_t>(dec)] = std::max(hi[static_cast<std::size_t>(dec)], r.occ_q);
    }
    // the last decade is (1e5, 1e6]
    double worst = std::max(std::fabs(lo[5] - target), std::fabs(hi[5] - target));
    o.require(worst <= 0.05, "last-decade distance " + fmt(worst));
    std::string widths;
    bool decreasing = true;
    for (int dec = 2; dec <= 5; ++dec) {
        double w = hi[static_cast<std::size_t>(dec)] - lo[static_cast<std::size_t>(dec)];
        double prev = hi[static_cast<std::size_t>(dec - 1)] - lo[static_cast<std::size_t>(dec - 1)];
        if (!(w < prev))
            decreasing = false;
        widths += (widths.empty() ? "" : ", ") + fmt(w);
    }
    o.require(decreasing, "oscillation width decreasing");
    o.note("target " + fmt(target) + ", last decade [" + fmt(lo[5]) + ", " + fmt(hi[5]) +
           "], widths per decade " + widths);
    return o;
}

// 8. beta_0 partial sums, l versus q, and the orbit margin.
Outcome criterion_8()
{
    Outcome o;
    std::vector<Angle> angles{named_angle("sqrt2"), named_angle("golden"), named_angle("fig1"),
                              named_angle("w-construct")};
    std::mt19937_64 rng(8);
    for (int t = 0; t < 6; ++t)
        angles.push_back(random_angle(rng, 20, 30));
    int diff_bad = 0, ell_bad = 0, strict_cases = 0;
    for (const auto& a : angles) {
        for (int N = 0; N + 1 <= a.horizon(); ++N)
            if (circle_norm(beta0_partial(a, N + 1).value - beta0_partial(a, N).value) !=
                a.lambda(N + 1))
                ++diff_bad;
        auto ell = ell_sequence(a, a.horizon() - 1);
        for (int n = 0; n + 1 <= a.horizon(); ++n) {
            const Integer& l = ell[static_cast<std::size_t>(n)];
            if (!(l < a.q(n) + a.q(n + 1)))
                ++ell_bad;
            if (n >= 1 && a.a(n + 1) >= 2) {
                ++strict_cases;
                if (!(l < a.q(n + 1)))
                    ++ell_bad;
            }
        }
    }
    o.require(diff_bad == 0, "partial-sum differences");
    o.require(ell_bad == 0, "l_n inequalities");
    o.note("partial sums and " + std::to_string(strict_cases) + " strict l_n cases exact");

    // Non-golden: the margin stays above the tail bound, so it is positive for every extension.
    Angle s = named_angle("sqrt2");
    int Ns = s.horizon() - 1;
    auto b = beta0_partial(s, Ns);
    OrbitMargin m = not_on_orbit_margin(s, b.value, 1000);
    o.require(m.margin > b.tail_bound, "sqrt2 margin above tail");
    o.note("sqrt2 margin over |k| <= 1000: " + to_decimal(m.margin, 6));

    // All-ones tail after N.
    const int N = 3;
    Angle t = Angle::from_quotients(ones_then({0, 3, 2, 5}, 1, 40));
    Integer lN = ell_sequence(t, N).back();
    Integer k_stated = lN + t.q(N - 1);
    Integer k_derived = lN - t.q(N + 2);
    int M = t.horizon() - 2;
    Rational b0 = beta0_partial(t, M).value;
    Rational tail = t.lambda(M + 1);
    Rational at_stated = circle_norm(b0 - Rational(k_stated) * t.value());
    Rational at_derived = circle_norm(b0 - Rational(k_derived) * t.value());
    OrbitMargin best = not_on_orbit_margin(t, b0, 1000);
    o.require(at_derived == t.lambda(M + 2) && best.argmin == to_int64(k_derived),
              "derived index l_N - q_{N+2}");
    o.require(at_stated <= tail, "margin 0 at l_N + q_{N-1} = " + k_stated.get_str() +
                                     " (distance " + to_decimal(at_stated, 6) + ")");
    o.note("all-ones tail: beta_0 sits at k = l_N - q_{N+2} = " + k_derived.get_str() +
           " (distance " + to_decimal(at_derived, 3) + " = lambda^{(M+2)} -> 0)");
    return o;
}

// 9. Crossing-time closed form and residual.
Outcome criterion_9()
{
    Outcome o;
    struct Form {
        double a, b, c;
    };
    std::vector<Form> forms{{1, 0, 1}, {2, 0.5, 3}, {1, -0.7, 0.8}, {5, 1, 0.5}};
    double worst = 0;
    for (const auto& f : forms)
        for (double delta : {0.05, 0.2, 1.0})
            for (double y : {0.5, 0.1, 0.01, 1e-3, -0.2}) {
                KappaResult k = kappa_quadratic(f.a, f.b, f.c, delta, y);
                worst = std::max(worst, std::fabs(k.quadrature - k.closed_form) / k.closed_form);
            }
    o.require(worst <= 1e-10, "relative agreement " + fmt(worst));
    // kappa itself: |gamma| <= 2/(lambda_min delta). The centred window of the proof gives
    // gamma_0(y) = -(2/(y sqrt d)) arctan(y sqrt d / delta), monotone in y and bounded by 2/delta.
    bool monotone = true, bounded = true;
    double kappa0_gap = 0;
    for (const auto& f : forms) {
        double d = f.a * f.c - f.b * f.b;
        double lmin = 0.5 * (f.a + f.c - std::hypot(f.a - f.c, 2 * f.b));
        double delta = 0.2;
        double prev = 0;
        for (int k = 0; k <= 14; ++k) {
            double y = std::ldexp(1.0, -k);
            KappaResult r = kappa_quadratic(f.a, f.b, f.c, delta, y);
            if (!(std::fabs(r.residual) <= 2.0 / (lmin * delta)))
                bounded = false;
            auto phi = [&](double x) { return 1.0 / (f.a * x * x + 2 * f.b * x * y + f.c * y * y); };
            double peak = -f.b * y / f.a;
            double k0 = integrate_adaptive(phi, (-delta - f.b * y) / f.a, peak).value +
                        integrate_adaptive(phi, peak, (delta - f.b * y) / f.a).value;
            double s = y * std::sqrt(d);
            double closed0 = 2.0 / s * std::atan(delta / s);
            kappa0_gap = std::max(kappa0_gap, std::fabs(k0 - closed0) / closed0);
            double gamma0 = k0 - std::numbers::pi / s;
            if (!(std::fabs(gamma0) <= 2.0 / delta * (1 + 1e-9)))
                bounded = false;
            if (k >= 1 && gamma0 > prev + 1e-9 * std::fabs(prev))
                monotone = false;
            prev = gamma0;
        }
    }
    o.require(kappa0_gap <= 1e-10, "centred-window closed form " + fmt(kappa0_gap));
    o.require(bounded, "residuals within their bounds");
    o.require(monotone, "centred-window residual monotone along y = 2^-k");
    o.note("worst relative gap " + fmt(worst) + " over 60 grid points");
    return o;
}

// 10. Figure presets: outputs, reproducibility, fig1 strips.
Outcome criterion_10()
{
    Outcome o;
    fs::path root = fs::temp_directory_path() / "toruslab_acceptance";
    fs::remove_all(root);
    for (const char* name : {"fig1", "fig2-left", "fig2-right"}) {
        auto t0 = std::chrono::steady_clock::now();
        fs::path dir = root / name;
        RunManifest m = run_preset(name, Json::object(), dir.string());
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool csv = false, svg = false;
        for (const auto& a : m.outputs) {
            csv = csv || a.name.ends_with(".csv");
            svg = svg || a.name.ends_with(".svg");
        }
        o.require(csv && svg, std::string(name) + " CSV and SVG");
        o.require(secs < 120, std::string(name) + " runtime");
        ReplayResult rr = replay_manifest((dir / "manifest.json").string(), (root / (std::string(name) + "-replay")).string());
        o.require(rr.identical, std::string(name) + " replay");
        o.note(std::string(name) + " " + fmt(secs) + " s, replay " + (rr.identical ? "identical" : "differs"));
        if (std::string(name) == "fig1") {
            std::ifstream in(dir / "summary.json");
            Json s = Json::parse(in);
            auto bands = s["x_empty_band_count"].get<int>();
            o.require(bands >= 3, "fig1 strips: " + std::to_string(bands) +
                                      " empty x-bands wider than 0.01 at T = 1e5 (widest gap " +
                                      fmt(s["x_widest_gap"].get<double>()) + ", strand widest " +
                                      fmt(s["strand_widest_gap"].get<double>()) + ")");
        }
    }
    fs::remove_all(root);
    return o;
}

// 11. Escape-series partial sums.
Outcome criterion_11()
{
    Outcome o;
    Angle a = named_angle("sqrt2");
    auto s = escape_series(a, divergence_phi(a), 25);
    bool monotone = true;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1]))
            monotone = false;
    double ratio_25_12 = static_cast<double>(s[24] / s[11]);
    o.require(monotone, "strictly increasing partial sums");
    o.require(ratio_25_12 > 1.5, "S_25 / S_12 = " + fmt(ratio_25_12) + " > 1.5");
    o.note("S_12 = " + fmt(static_cast<double>(s[11])) + ", S_25 = " +
           fmt(static_cast<double>(s[24])));
    return o;
}

struct Criterion {
    const char* title;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv)
{
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0)
            only = std::atoi(argv[i + 1]);

    std::vector<Criterion> all{
        {"continued-fraction identities", 5, criterion_1},
        {"E_{n,l} measure", 5, criterion_2},
        {"Theta symmetry", 10, criterion_3},
        {"bound-lemma oracle batch", 120, criterion_4},
        {"extreme-historic dominance", 180, criterion_5},
        {"close-return spike", 60, criterion_6},
        {"physical-measure trend", 120, criterion_7},
        {"beta_0 machinery", 10, criterion_8},
        {"crossing-time asymptotics", 30, criterion_9},
        {"figure presets", 360, criterion_10},
        {"escape series", 5, criterion_11},
    };
    int failures = 0;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (only != 0 && static_cast<int>(k + 1) != only)
            continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = all[k].run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > all[k].budget_s) {
            out.pass = false;
            out.detail += "; FAILED runtime budget " + fmt(all[k].budget_s) + " s";
        }
        failures += out.pass ? 0 : 1;
        std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << (k + 1) << " ("
                  << all[k].title << ", " << fmt(secs) << " s): " << out.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
