#pragma once

#include "toruslab/birkhoff_sums.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace toruslab {

struct TorusPoint {
    Rational x;
    Rational y;
};

enum class SpeedModel { QuadraticHessian, MinDistance };

const char* to_string(SpeedModel model);

struct FlowParams {
    Angle angle;
    TorusPoint p;
    TorusPoint q;
    double d_p = 1.0;
    double d_q = 1.0;
    SpeedModel speed_model = SpeedModel::QuadraticHessian;
    Rational section_x0 = 0;
};

struct SectionData {
    Rational x0;
    Rational p0;
    Rational q0;
    Rational beta;  // q0 - p0 mod 1
    Rational r_p;   // flow time from the section to p
    Rational r_q;
};

// Flows p and q back along (1, alpha) to the vertical circle {x = x0}.
// Moves x0 when p and q would land on the same section point.
SectionData section_setup(const FlowParams& params);

// q = p + t (1, alpha) mod 1, the unit-speed linear flow.
TorusPoint linear_flow(const Angle& angle, const TorusPoint& p, const Rational& t);

struct KappaResult {
    double closed_form = 0.0;
    double quadrature = 0.0;
    double quadrature_error = 0.0;
    double residual = 0.0;  // quadrature - pi/(sqrt(d)|y|)
};

// Crossing time of the strip [-delta, delta] x {y} at speed a x^2 + 2 b x y + c y^2.
KappaResult kappa_quadratic(double a, double b, double c, double delta, double y);

// Adaptive Gauss-Kronrod (7-15) integral with an absolute-or-relative tolerance.
struct Quadrature {
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
};
Quadrature integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-13);

// Principal two-cusp roof pi/(sqrt(d_p)||y-p0||) + pi/(sqrt(d_q)||y-q0||).
double roof(const FlowParams& params, const SectionData& section, const Rational& y);

enum class RoofModel { Principal, QuadraticBoxes };

struct RecordGrid {
    // Every `every`-th return when positive; otherwise a log10 grid with per_decade points.
    std::int64_t every = 0;
    int per_decade = 20;
};

struct SpecialFlowOptions {
    std::int64_t returns = 1000;
    RoofModel model = RoofModel::Principal;
    double box_r = 0.1;  // half-size of the boxes in the QuadraticBoxes model
    std::optional<Mode> mode;
    RecordGrid grid;
};

struct OccupancyRow {
    std::int64_t n = 0;
    double T = 0.0;
    double A = 0.0;
    double B = 0.0;
    double C = 0.0;
    double occ_p = 0.0;
    double occ_q = 0.0;
    double theta_proxy = 0.0;
    std::optional<Rational> occ_p_exact;
    std::optional<Rational> theta_exact;
};

struct OccupancySeries {
    Mode mode = Mode::Double;
    bool condition_flag = false;
    std::vector<OccupancyRow> rows;
    // Extremes of theta_proxy over every return in the last 90% of the run.
    double tail_theta_min = 0.0;
    double tail_theta_max = 0.0;
};

OccupancySeries special_flow_simulate(const FlowParams& params, const Rational& x,
                                      const SpecialFlowOptions& options);

struct EulerOptions {
    double delta = 0.1;
    std::int64_t steps = 1000;
    double ball_r = 0.05;
    int per_decade = 20;
    bool unit_speed = false;            // phi == 1
    std::int64_t trajectory_limit = 0;  // record the first this many positions
};

struct EulerRow {
    std::int64_t step = 0;
    double t_log10 = 0.0;
    double x = 0.0;
    double y = 0.0;
    double occ_p = 0.0;
    double occ_q = 0.0;
};

struct EulerPoint {
    std::int64_t step;
    double x;
    double y;
    bool in_p;
    bool in_q;
};

struct EulerSeries {
    std::vector<EulerRow> rows;
    std::vector<EulerPoint> trajectory;
    std::int64_t in_p = 0;
    std::int64_t in_q = 0;
};

EulerSeries euler_torus_simulate(const FlowParams& params, std::pair<double, double> start,
                                 const EulerOptions& options);

// Occupancy of an arbitrary axis-aligned box along an Euler run with phi == 1.
double euler_box_occupancy(const Angle& angle, std::pair<double, double> start, double delta,
                           std::int64_t steps, double x0, double x1, double y0, double y1);

struct MuInfinity {
    double weight_p = 0.5;
    double weight_q = 0.5;
};

MuInfinity mu_infinity(double d_p, double d_q);

// (lowest, highest) Box(p) occupancy over the last tail_fraction of the rows.
std::pair<double, double> pomega_estimate(const std::vector<double>& occupancy,
                                          double tail_fraction);

struct EmptyBand {
    double lo;
    double hi;
};

// Maximal circle arcs of width > min_width containing none of the values.
std::vector<EmptyBand> empty_bands(std::vector<double> values, double min_width);

}  // namespace toruslab
