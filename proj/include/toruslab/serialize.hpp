#pragma once

#include "toruslab/bounds.hpp"
#include "toruslab/classifiers.hpp"
#include "toruslab/error.hpp"
#include "toruslab/flow_dynamics.hpp"
#include "toruslab/interval_union.hpp"

#include "json.hpp"

#include <string>
#include <vector>

namespace toruslab {

using Json = nlohmann::ordered_json;

// Shortest text that reads back to the same double.
std::string real_text(double v);

Json to_json(const Angle& angle);
Json to_json(const IntervalUnion& u);
Json to_json(const BoundCheck& c);
Json to_json(const RegimeCertificate& c);
Json to_json(const RegimeVerdict& v);
Json to_json(const Error& e);

std::vector<Integer> parse_quotients(const std::string& text);

// index, S_n, mode, condition_flag[, S_n_exact]
std::string sum_series_csv(const SumSeries& s);
// index, theta_n, mode, condition_flag[, theta_n_exact]
std::string theta_series_csv(const SumSeries& num, const SumSeries& den);
// n, T_n, A_n, B_n, C_n, occ_p, occ_q, theta_proxy
std::string special_csv(const OccupancySeries& s);
// step, t_log10, x, y, in_box_p, in_box_q
std::string euler_csv(const EulerSeries& s);
// step, t_log10, occ_p, occ_q
std::string euler_occupancy_csv(const EulerSeries& s);

struct PlotSeries {
    std::string name;
    std::vector<double> xs;
    std::vector<double> ys;
};

std::string svg_line_plot(const std::vector<PlotSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);
std::string svg_scatter(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::string& title, std::size_t max_points = 20000);

std::string sha256_hex(const std::string& bytes);

}  // namespace toruslab
