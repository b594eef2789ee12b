#pragma once

#include <memory>
#include <span>
#include <vector>

namespace jko {

enum class Shape { Interval, Box, Disc };

const char* shape_name(Shape s);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

/// Uniform cell-centred lattice over a convex domain.
///
/// 1-D grids are intervals (ny == 1). 2-D grids are either a full box or a
/// disc rasterised on its bounding box: a cell is active when its centre lies
/// in the closed disc. Grid functions are stored over the whole lattice in
/// row-major order (index = j * nx + i); inactive cells carry zero density.
///
/// Grid is an immutable value; copies share the same layout.
class Grid {
public:
    static Grid interval(double a, double b, int n);
    static Grid box(double x0, double x1, double y0, double y1, int nx, int ny);
    /// Disc of radius R about (cx, cy) on an n x n bounding lattice.
    static Grid disc(double cx, double cy, double radius, int n);

    int dim() const { return layout_->dim; }
    Shape shape() const { return layout_->shape; }
    int nx() const { return layout_->nx; }
    int ny() const { return layout_->ny; }
    int size() const { return layout_->nx * layout_->ny; }
    double hx() const { return layout_->hx; }
    double hy() const { return layout_->hy; }
    /// Largest cell width.
    double h() const;
    double cell_measure() const { return layout_->measure; }

    double x_min() const { return layout_->x0; }
    double x_max() const { return layout_->x1; }
    double y_min() const { return layout_->y0; }
    double y_max() const { return layout_->y1; }

    /// Disc centre; interval/box midpoint otherwise.
    Point domain_center() const;
    /// Disc radius; half-length for intervals; half-diagonal for boxes.
    double domain_radius() const;

    int index(int i, int j = 0) const { return j * layout_->nx + i; }
    int ix(int idx) const { return idx % layout_->nx; }
    int iy(int idx) const { return idx / layout_->nx; }
    Point center(int idx) const;
    std::vector<double> x_coords() const;

    bool active(int idx) const { return layout_->active[idx] != 0; }
    /// Active cell with at least one missing or inactive 4-neighbour.
    bool boundary(int idx) const { return layout_->boundary[idx] != 0; }
    std::span<const int> active_cells() const { return layout_->active_list; }
    int active_count() const { return static_cast<int>(layout_->active_list.size()); }

    bool contains(Point p) const;
    /// Euclidean distance from p to the continuous domain (0 inside).
    double distance_to_domain(Point p) const;

    bool operator==(const Grid& other) const;

private:
    struct Layout {
        int dim = 1;
        Shape shape = Shape::Interval;
        int nx = 0;
        int ny = 1;
        double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 0.0;
        double hx = 0.0, hy = 1.0, measure = 0.0;
        double cx = 0.0, cy = 0.0, radius = 0.0;
        std::vector<char> active;
        std::vector<char> boundary;
        std::vector<int> active_list;
    };

    explicit Grid(std::shared_ptr<const Layout> layout) : layout_(std::move(layout)) {}
    static Grid finish(Layout layout);

    std::shared_ptr<const Layout> layout_;
};

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace jko
