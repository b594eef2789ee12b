#include "jko/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace jko {

const char* shape_name(Shape s) {
    switch (s) {
    case Shape::Interval: return "interval";
    case Shape::Box: return "box";
    case Shape::Disc: return "disc";
    }
    return "unknown";
}

Grid Grid::interval(double a, double b, int n) {
    if (!(a < b)) throw std::invalid_argument("interval grid needs a < b");
    if (n < 2) throw std::invalid_argument("grid needs n >= 2 cells");
    Layout l;
    l.dim = 1;
    l.shape = Shape::Interval;
    l.nx = n;
    l.ny = 1;
    l.x0 = a;
    l.x1 = b;
    l.hx = (b - a) / n;
    l.hy = 1.0;
    l.measure = l.hx;
    l.cx = 0.5 * (a + b);
    l.radius = 0.5 * (b - a);
    return finish(std::move(l));
}

Grid Grid::box(double x0, double x1, double y0, double y1, int nx, int ny) {
    if (!(x0 < x1) || !(y0 < y1)) throw std::invalid_argument("box grid needs x0 < x1, y0 < y1");
    if (nx < 2 || ny < 1) throw std::invalid_argument("box grid needs nx >= 2, ny >= 1");
    Layout l;
    l.dim = 2;
    l.shape = Shape::Box;
    l.nx = nx;
    l.ny = ny;
    l.x0 = x0;
    l.x1 = x1;
    l.y0 = y0;
    l.y1 = y1;
    l.hx = (x1 - x0) / nx;
    l.hy = (y1 - y0) / ny;
    l.measure = l.hx * l.hy;
    l.cx = 0.5 * (x0 + x1);
    l.cy = 0.5 * (y0 + y1);
    l.radius = 0.5 * std::hypot(x1 - x0, y1 - y0);
    return finish(std::move(l));
}

Grid Grid::disc(double cx, double cy, double radius, int n) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc grid needs radius > 0");
    if (n < 2) throw std::invalid_argument("grid needs n >= 2 cells");
    Layout l;
    l.dim = 2;
    l.shape = Shape::Disc;
    l.nx = n;
    l.ny = n;
    l.x0 = cx - radius;
    l.x1 = cx + radius;
    l.y0 = cy - radius;
    l.y1 = cy + radius;
    l.hx = 2.0 * radius / n;
    l.hy = 2.0 * radius / n;
    l.measure = l.hx * l.hy;
    l.cx = cx;
    l.cy = cy;
    l.radius = radius;
    return finish(std::move(l));
}

Grid Grid::finish(Layout l) {
    const int total = l.nx * l.ny;
    l.active.assign(total, 1);
    l.boundary.assign(total, 0);
    if (l.shape == Shape::Disc) {
        for (int j = 0; j < l.ny; ++j) {
            for (int i = 0; i < l.nx; ++i) {
                const double x = l.x0 + (i + 0.5) * l.hx - l.cx;
                const double y = l.y0 + (j + 0.5) * l.hy - l.cy;
                l.active[j * l.nx + i] = (x * x + y * y <= l.radius * l.radius) ? 1 : 0;
            }
        }
    }
    auto is_active = [&](int i, int j) {
        return i >= 0 && i < l.nx && j >= 0 && j < l.ny && l.active[j * l.nx + i];
    };
    for (int j = 0; j < l.ny; ++j) {
        for (int i = 0; i < l.nx; ++i) {
            const int idx = j * l.nx + i;
            if (!l.active[idx]) continue;
            l.active_list.push_back(idx);
            bool edge = !is_active(i - 1, j) || !is_active(i + 1, j);
            if (l.dim == 2) edge = edge || !is_active(i, j - 1) || !is_active(i, j + 1);
            l.boundary[idx] = edge ? 1 : 0;
        }
    }
    if (l.active_list.size() < 2) throw std::invalid_argument("grid has fewer than 2 active cells");
    return Grid(std::make_shared<const Layout>(std::move(l)));
}

double Grid::h() const { return dim() == 1 ? hx() : std::max(hx(), hy()); }

Point Grid::domain_center() const { return {layout_->cx, layout_->cy}; }

double Grid::domain_radius() const { return layout_->radius; }

Point Grid::center(int idx) const {
    const auto& l = *layout_;
    const int i = idx % l.nx;
    const int j = idx / l.nx;
    Point p{l.x0 + (i + 0.5) * l.hx, 0.0};
    if (l.dim == 2) p.y = l.y0 + (j + 0.5) * l.hy;
    return p;
}

std::vector<double> Grid::x_coords() const {
    std::vector<double> xs(nx());
    for (int i = 0; i < nx(); ++i) xs[i] = x_min() + (i + 0.5) * hx();
    return xs;
}

bool Grid::contains(Point p) const { return distance_to_domain(p) == 0.0; }

double Grid::distance_to_domain(Point p) const {
    const auto& l = *layout_;
    switch (l.shape) {
    case Shape::Interval:
        return std::max({l.x0 - p.x, p.x - l.x1, 0.0});
    case Shape::Box: {
        const double dx = std::max({l.x0 - p.x, p.x - l.x1, 0.0});
        const double dy = std::max({l.y0 - p.y, p.y - l.y1, 0.0});
        return std::hypot(dx, dy);
    }
    case Shape::Disc:
        return std::max(std::hypot(p.x - l.cx, p.y - l.cy) - l.radius, 0.0);
    }
    return 0.0;
}

bool Grid::operator==(const Grid& o) const {
    if (layout_ == o.layout_) return true;
    const auto& a = *layout_;
    const auto& b = *o.layout_;
    return a.dim == b.dim && a.shape == b.shape && a.nx == b.nx && a.ny == b.ny && a.x0 == b.x0 &&
           a.x1 == b.x1 && a.y0 == b.y0 && a.y1 == b.y1 && a.cx == b.cx && a.cy == b.cy &&
           a.radius == b.radius;
}

void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

}  // namespace jko
