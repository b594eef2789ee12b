#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "jko/grid.hpp"
#include "jko/ot1d.hpp"

namespace jko::io {

using Json = nlohmann::json;

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

/// index,x[,y],value — one row per active cell.
void write_grid_function_csv(std::ostream& os, const Grid& grid, std::span<const double> f,
                             const std::string& column = "value");

Json grid_descriptor(const Grid& grid);
/// Grid metadata plus the flat row-major value array (inactive cells included).
Json grid_function_json(const Grid& grid, std::span<const double> f);

/// cell,x,T,phi,phi_grad,residual_ma.
void write_plan_csv(std::ostream& os, const TransportPlanResult& plan);

/// Long-format trajectory rows: step,cell,x[,y],rho[,eps].
void write_trajectory_csv(std::ostream& os, const Grid& grid, std::span<const std::vector<double>> snapshots,
                          double eps = -1.0);

/// Values column of a CSV with a header row; the column is found by name
/// ("value" or "rho") or taken as the last one. Rows are matched to active
/// cells in order.
std::vector<double> read_grid_values_csv(const std::string& path, const Grid& grid);

/// Writes text to path, creating parent directories.
void write_file(const std::string& path, const std::string& text);

}  // namespace jko::io
