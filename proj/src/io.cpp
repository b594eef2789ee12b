#include "jko/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace jko::io {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw std::runtime_error("format_double failed");
    return std::string(buf, end);
}

void write_grid_function_csv(std::ostream& os, const Grid& grid, std::span<const double> f, const std::string& column) {
    if (static_cast<int>(f.size()) != grid.size()) throw std::invalid_argument("grid function size mismatch");
    os << (grid.dim() == 1 ? "index,x," : "index,x,y,") << column << '\n';
    for (int idx : grid.active_cells()) {
        const Point p = grid.center(idx);
        os << idx << ',' << format_double(p.x) << ',';
        if (grid.dim() == 2) os << format_double(p.y) << ',';
        os << format_double(f[idx]) << '\n';
    }
}

Json grid_descriptor(const Grid& grid) {
    Json g;
    g["dim"] = grid.dim();
    g["shape"] = shape_name(grid.shape());
    g["nx"] = grid.nx();
    g["ny"] = grid.ny();
    g["x_min"] = grid.x_min();
    g["x_max"] = grid.x_max();
    if (grid.dim() == 2) {
        g["y_min"] = grid.y_min();
        g["y_max"] = grid.y_max();
    }
    if (grid.shape() == Shape::Disc) {
        const Point c = grid.domain_center();
        g["center"] = {c.x, c.y};
        g["radius"] = grid.domain_radius();
    }
    g["cell_measure"] = grid.cell_measure();
    g["active_cells"] = grid.active_count();
    return g;
}

Json grid_function_json(const Grid& grid, std::span<const double> f) {
    Json j;
    j["grid"] = grid_descriptor(grid);
    j["values"] = std::vector<double>(f.begin(), f.end());
    return j;
}

void write_plan_csv(std::ostream& os, const TransportPlanResult& plan) {
    os << "cell,x,T,phi,phi_grad,residual_ma\n";
    for (std::size_t i = 0; i < plan.x.size(); ++i) {
        os << i << ',' << format_double(plan.x[i]) << ',' << format_double(plan.map_T[i]) << ','
           << format_double(plan.phi[i]) << ',' << format_double(plan.phi_grad[i]) << ','
           << format_double(i < plan.residual_ma.size() ? plan.residual_ma[i] : 0.0) << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const Grid& grid, std::span<const std::vector<double>> snapshots,
                          double eps) {
    os << (grid.dim() == 1 ? "step,cell,x,rho" : "step,cell,x,y,rho") << (eps >= 0.0 ? ",eps\n" : "\n");
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
        for (int idx : grid.active_cells()) {
            const Point p = grid.center(idx);
            os << k << ',' << idx << ',' << format_double(p.x) << ',';
            if (grid.dim() == 2) os << format_double(p.y) << ',';
            os << format_double(snapshots[k][idx]);
            if (eps >= 0.0) os << ',' << format_double(eps);
            os << '\n';
        }
    }
}

std::vector<double> read_grid_values_csv(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    int col = static_cast<int>(header.size()) - 1;
    for (int c = 0; c < static_cast<int>(header.size()); ++c)
        if (header[c] == "value" || header[c] == "rho") col = c;

    std::vector<double> values(grid.size(), 0.0);
    auto cells = grid.active_cells();
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= cells.size()) throw std::runtime_error(path + ": more rows than active cells");
        std::stringstream ss(line);
        std::string cell;
        for (int c = 0; c <= col; ++c)
            if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row " + std::to_string(row + 2));
        try {
            values[cells[row]] = std::stod(cell);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": bad number on row " + std::to_string(row + 2));
        }
        ++row;
    }
    if (row != cells.size())
        throw std::runtime_error(path + ": expected " + std::to_string(cells.size()) + " rows, got " +
                                 std::to_string(row));
    return values;
}

void write_file(const std::string& path, const std::string& text) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace jko::io
