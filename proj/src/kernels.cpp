#include "jko/kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace jko::kernels {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SlopeMax row_slope(std::span<const Point> pts, std::span<const double> f, int i) {
    SlopeMax best;
    const auto n = static_cast<int>(pts.size());
    for (int j = i + 1; j < n; ++j) {
        const double d = std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y);
        if (d <= 0.0) continue;
        const double s = std::abs(f[i] - f[j]) / d;
        if (best.i < 0 || s > best.slope) best = {s, i, j};
    }
    return best;
}

SlopeMax reduce_rows(const std::vector<SlopeMax>& rows) {
    SlopeMax best{0.0, -1, -1};
    for (const auto& r : rows) {
        if (r.i < 0) continue;
        if (best.i < 0 || r.slope > best.slope) best = r;
    }
    if (best.i < 0) best.slope = 0.0;
    return best;
}

// LSE over a strided row of terms base[k * stride] + logk[k].
inline double lse_row(const double* base, int stride, const double* logk, int len) {
    double m = kNegInf;
    for (int k = 0; k < len; ++k) {
        const double t = base[static_cast<long>(k) * stride] + logk[k];
        if (t > m) m = t;
    }
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (int k = 0; k < len; ++k) {
        const double t = base[static_cast<long>(k) * stride] + logk[k];
        if (t != kNegInf) s += std::exp(t - m);
    }
    return m + std::log(s);
}

void check_lse_sizes(const SeparableLogKernel& k, std::span<const double> in, std::span<double> out) {
    const auto n = static_cast<std::size_t>(k.nx) * static_cast<std::size_t>(k.ny);
    if (in.size() != n || out.size() != n || k.log_kx.size() != static_cast<std::size_t>(k.nx) * k.nx ||
        k.log_ky.size() != static_cast<std::size_t>(k.ny) * k.ny)
        throw std::invalid_argument("lse_separable: size mismatch");
}

// Pass over y: tmp(i2, j1) = LSE_j2 in(j1, j2) + log_ky(i2, j2).
inline double pass_y(const SeparableLogKernel& k, std::span<const double> in, int i2, int j1) {
    return lse_row(in.data() + j1, k.nx, k.log_ky.data() + static_cast<long>(i2) * k.ny, k.ny);
}

// Pass over x: out(i1, i2) = LSE_j1 tmp(i2, j1) + log_kx(i1, j1).
inline double pass_x(const SeparableLogKernel& k, const std::vector<double>& tmp, int i1, int i2) {
    return lse_row(tmp.data() + static_cast<long>(i2) * k.nx, 1, k.log_kx.data() + static_cast<long>(i1) * k.nx, k.nx);
}

inline double tangent_max(std::span<const Point> src, std::span<const double> value, std::span<const double> gx,
                          std::span<const double> gy, double alpha, Point t) {
    double best = kNegInf;
    for (std::size_t s = 0; s < src.size(); ++s) {
        const double dx = t.x - src[s].x;
        const double dy = t.y - src[s].y;
        const double v = value[s] + gx[s] * dx + gy[s] * dy + 0.5 * alpha * (dx * dx + dy * dy);
        if (v > best) best = v;
    }
    return best;
}

inline double cone_max(std::span<const Point> src, std::span<const double> value, double lip, Point t) {
    double best = kNegInf;
    for (std::size_t s = 0; s < src.size(); ++s) {
        const double v = value[s] - lip * std::hypot(t.x - src[s].x, t.y - src[s].y);
        if (v > best) best = v;
    }
    return best;
}

inline double conv_at(std::span<const double> in, int nx, std::span<const double> w, int rx, int ry, int i, int j) {
    const int pnx = nx + 2 * rx;
    const int wnx = 2 * rx + 1;
    double s = 0.0;
    for (int b = 0; b <= 2 * ry; ++b) {
        for (int a = 0; a <= 2 * rx; ++a) {
            const double wt = w[static_cast<long>(b) * wnx + a];
            if (wt == 0.0) continue;
            s += wt * in[static_cast<long>(j + 2 * ry - b) * pnx + (i + 2 * rx - a)];
        }
    }
    return s;
}

}  // namespace

namespace serial {

SlopeMax max_pairwise_slope(std::span<const Point> pts, std::span<const double> f) {
    std::vector<SlopeMax> rows(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) rows[i] = row_slope(pts, f, static_cast<int>(i));
    return reduce_rows(rows);
}

void lse_separable(const SeparableLogKernel& k, std::span<const double> in, std::span<double> out) {
    check_lse_sizes(k, in, out);
    std::vector<double> tmp(in.size());
    for (int i2 = 0; i2 < k.ny; ++i2)
        for (int j1 = 0; j1 < k.nx; ++j1) tmp[static_cast<long>(i2) * k.nx + j1] = pass_y(k, in, i2, j1);
    for (int i2 = 0; i2 < k.ny; ++i2)
        for (int i1 = 0; i1 < k.nx; ++i1) out[static_cast<long>(i2) * k.nx + i1] = pass_x(k, tmp, i1, i2);
}

void sup_tangent_quadratics(std::span<const Point> src, std::span<const double> value,
                            std::span<const double> grad_x, std::span<const double> grad_y, double alpha,
                            std::span<const Point> targets, std::span<double> out) {
    for (std::size_t t = 0; t < targets.size(); ++t)
        out[t] = tangent_max(src, value, grad_x, grad_y, alpha, targets[t]);
}

void sup_cones(std::span<const Point> src, std::span<const double> value, double lip, std::span<const Point> targets,
               std::span<double> out) {
    for (std::size_t t = 0; t < targets.size(); ++t) out[t] = cone_max(src, value, lip, targets[t]);
}

void convolve_padded(std::span<const double> in, int nx, int ny, std::span<const double> weights, int rx, int ry,
                     std::span<double> out) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) out[static_cast<long>(j) * nx + i] = conv_at(in, nx, weights, rx, ry, i, j);
}

}  // namespace serial

namespace parallel {

SlopeMax max_pairwise_slope(std::span<const Point> pts, std::span<const double> f) {
    const auto n = static_cast<long>(pts.size());
    std::vector<SlopeMax> rows(pts.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) rows[i] = row_slope(pts, f, static_cast<int>(i));
    return reduce_rows(rows);
}

void lse_separable(const SeparableLogKernel& k, std::span<const double> in, std::span<double> out) {
    check_lse_sizes(k, in, out);
    std::vector<double> tmp(in.size());
    const long total = static_cast<long>(k.nx) * k.ny;
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (long q = 0; q < total; ++q) {
            const int i2 = static_cast<int>(q / k.nx);
            const int j1 = static_cast<int>(q % k.nx);
            tmp[q] = pass_y(k, in, i2, j1);
        }
#pragma omp for schedule(static)
        for (long q = 0; q < total; ++q) {
            const int i2 = static_cast<int>(q / k.nx);
            const int i1 = static_cast<int>(q % k.nx);
            out[q] = pass_x(k, tmp, i1, i2);
        }
    }
}

void sup_tangent_quadratics(std::span<const Point> src, std::span<const double> value,
                            std::span<const double> grad_x, std::span<const double> grad_y, double alpha,
                            std::span<const Point> targets, std::span<double> out) {
    const auto n = static_cast<long>(targets.size());
#pragma omp parallel for schedule(static)
    for (long t = 0; t < n; ++t) out[t] = tangent_max(src, value, grad_x, grad_y, alpha, targets[t]);
}

void sup_cones(std::span<const Point> src, std::span<const double> value, double lip, std::span<const Point> targets,
               std::span<double> out) {
    const auto n = static_cast<long>(targets.size());
#pragma omp parallel for schedule(static)
    for (long t = 0; t < n; ++t) out[t] = cone_max(src, value, lip, targets[t]);
}

void convolve_padded(std::span<const double> in, int nx, int ny, std::span<const double> weights, int rx, int ry,
                     std::span<double> out) {
    const long total = static_cast<long>(nx) * ny;
#pragma omp parallel for schedule(static)
    for (long q = 0; q < total; ++q) {
        const int j = static_cast<int>(q / nx);
        const int i = static_cast<int>(q % nx);
        out[q] = conv_at(in, nx, weights, rx, ry, i, j);
    }
}

}  // namespace parallel

}  // namespace jko::kernels
