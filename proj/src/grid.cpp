#include "nf/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <tuple>

#include "nf/kernels.hpp"

namespace nf {

namespace {

void require_same_domain(const GridFunction& f, const GridFunction& g) {
    if (!(f.domain() == g.domain()))
        throw DomainMismatchError("grid functions live on different domains");
}

double positive(double x) { return x > 0.0 ? x : 0.0; }

} // namespace

Domain::Domain(int dim, double lx, double ly, int nx, int ny)
    : dim_(dim), lx_(lx), ly_(ly), nx_(nx), ny_(ny) {
    if (lx_ <= 0.0 || (dim_ == 2 && ly_ <= 0.0))
        throw InvalidParamsError("domain side lengths must be positive");
    if (nx_ < 3 || (dim_ == 2 && ny_ < 3))
        throw InvalidParamsError("domain needs at least 3 interior nodes per direction");
}

Domain Domain::interval(double length, int n) { return Domain(1, length, 0.0, n, 0); }

Domain Domain::box(double length_x, double length_y, int nx, int ny) {
    return Domain(2, length_x, length_y, nx, ny);
}

GridFunction::GridFunction(const Domain& d) : domain_(d), values_(d.node_count(), 0.0) {}

GridFunction::GridFunction(const Domain& d, std::vector<double> values)
    : domain_(d), values_(std::move(values)) {
    if (values_.size() != d.node_count())
        throw InvalidParamsError("grid function value count does not match the domain");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidParamsError("grid function values must be finite");
}

GridFunction GridFunction::sample(const Domain& d, const std::function<double(double, double)>& f) {
    GridFunction out(d);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(d.node_x(i), d.node_y(i));
    return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& g) {
    require_same_domain(*this, g);
    const double* b = g.values_.data();
    kernels::indexed_map(values_.size(), values_.data(),
                         [a = values_.data(), b](std::size_t i) { return a[i] + b[i]; });
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& g) {
    require_same_domain(*this, g);
    const double* b = g.values_.data();
    kernels::indexed_map(values_.size(), values_.data(),
                         [a = values_.data(), b](std::size_t i) { return a[i] - b[i]; });
    return *this;
}

GridFunction& GridFunction::operator*=(double s) {
    kernels::indexed_map(values_.size(), values_.data(),
                         [a = values_.data(), s](std::size_t i) { return s * a[i]; });
    return *this;
}

GridFunction& GridFunction::axpy(double s, const GridFunction& g) {
    require_same_domain(*this, g);
    const double* b = g.values_.data();
    kernels::indexed_map(values_.size(), values_.data(),
                         [a = values_.data(), b, s](std::size_t i) { return a[i] + s * b[i]; });
    return *this;
}

GridFunction operator+(GridFunction f, const GridFunction& g) { return f += g; }
GridFunction operator-(GridFunction f, const GridFunction& g) { return f -= g; }
GridFunction operator*(double s, GridFunction f) { return f *= s; }

GridFunction laplacian_apply(const GridFunction& f) {
    const Domain& d = f.domain();
    GridFunction out(d);
    if (d.dimension() == 1) {
        kernels::neg_laplacian_1d(f.values().data(), out.values().data(), d.nodes_x(),
                                  1.0 / (d.hx() * d.hx()));
    } else {
        kernels::neg_laplacian_2d(f.values().data(), out.values().data(), d.nodes_x(), d.nodes_y(),
                                  1.0 / (d.hx() * d.hx()), 1.0 / (d.hy() * d.hy()));
    }
    return out;
}

namespace {

// Raw sine transform (unnormalized) along every direction of the field.
void raw_sine_transform(const Domain& d, const double* in, double* out) {
    const int nx = d.nodes_x();
    if (d.dimension() == 1) {
        kernels::sine_apply_rows(kernels::sine_table(nx), in, out, nx, 1);
        return;
    }
    const int ny = d.nodes_y();
    std::vector<double> tmp(static_cast<std::size_t>(nx) * ny);
    kernels::sine_apply_rows(kernels::sine_table(nx), in, tmp.data(), nx, ny);
    kernels::sine_apply_cols(kernels::sine_table(ny), tmp.data(), out, nx, ny);
}

// Unit-L2-norm constant of the eigenbasis fields.
double basis_norm_constant(const Domain& d) {
    return d.dimension() == 1 ? std::sqrt(2.0 / d.length_x())
                              : 2.0 / std::sqrt(d.length_x() * d.length_y());
}

double direction_eigenvalue(double h, int n, int m) {
    const double s = std::sin(0.5 * std::numbers::pi * m / (n + 1));
    return 4.0 / (h * h) * s * s;
}

} // namespace

double laplacian_eigenvalue(const Domain& d, int mx, int my) {
    double ev = direction_eigenvalue(d.hx(), d.nodes_x(), mx);
    if (d.dimension() == 2) ev += direction_eigenvalue(d.hy(), d.nodes_y(), my);
    return ev;
}

GridFunction poisson_solve(const GridFunction& g) {
    const Domain& d = g.domain();
    const int nx = d.nodes_x();
    const int ny = d.dimension() == 1 ? 1 : d.nodes_y();
    const std::size_t n = d.node_count();

    std::vector<double> hat(n);
    raw_sine_transform(d, g.values().data(), hat.data());

    std::vector<double> evx(nx), evy(ny);
    for (int m = 1; m <= nx; ++m) evx[m - 1] = direction_eigenvalue(d.hx(), nx, m);
    if (d.dimension() == 2)
        for (int m = 1; m <= ny; ++m) evy[m - 1] = direction_eigenvalue(d.hy(), ny, m);

    // Round-trip factor of the unnormalized sine matrices.
    double inv_round_trip = 2.0 / (nx + 1);
    if (d.dimension() == 2) inv_round_trip *= 2.0 / (ny + 1);

    for (int my = 0; my < ny; ++my) {
        const double ey = d.dimension() == 2 ? evy[my] : 0.0;
        for (int mx = 0; mx < nx; ++mx) {
            const double ev = evx[mx] + ey;
            if (!(ev > 0.0)) throw SingularJacobianError("poisson solve hit a nonpositive eigenvalue");
            hat[static_cast<std::size_t>(my) * nx + mx] *= inv_round_trip / ev;
        }
    }

    GridFunction out(d);
    raw_sine_transform(d, hat.data(), out.values().data());
    return out;
}

double h1_inner(const GridFunction& f, const GridFunction& g) {
    require_same_domain(f, g);
    const GridFunction lg = laplacian_apply(g);
    const double* a = f.values().data();
    const double* b = lg.values().data();
    return f.domain().cell_volume() *
           kernels::indexed_sum(f.size(), [a, b](std::size_t i) { return a[i] * b[i]; });
}

double h1_norm(const GridFunction& f) { return std::sqrt(h1_inner(f, f)); }

double lp_integral(const GridFunction& f, double r, bool positive_part_only) {
    if (r < 1.0) throw InvalidParamsError("lp_integral requires exponent r >= 1");
    const double* a = f.values().data();
    double s;
    if (positive_part_only)
        s = kernels::indexed_sum(f.size(),
                                 [a, r](std::size_t i) { return std::pow(positive(a[i]), r); });
    else
        s = kernels::indexed_sum(f.size(),
                                 [a, r](std::size_t i) { return std::pow(std::abs(a[i]), r); });
    return f.domain().cell_volume() * s;
}

double pos_power_product_integral(const GridFunction& f, double ef, const GridFunction& g, double eg) {
    require_same_domain(f, g);
    const double* a = f.values().data();
    const double* b = g.values().data();
    const double s = kernels::indexed_sum(f.size(), [a, b, ef, eg](std::size_t i) {
        const double pa = positive(a[i]);
        const double pb = positive(b[i]);
        if (pa == 0.0 || pb == 0.0) return 0.0;
        return std::pow(pa, ef) * std::pow(pb, eg);
    });
    return f.domain().cell_volume() * s;
}

double l2_inner(const GridFunction& f, const GridFunction& g) {
    require_same_domain(f, g);
    const double* a = f.values().data();
    const double* b = g.values().data();
    return f.domain().cell_volume() *
           kernels::indexed_sum(f.size(), [a, b](std::size_t i) { return a[i] * b[i]; });
}

double l2_norm(const GridFunction& f) { return std::sqrt(l2_inner(f, f)); }

GridFunction positive_part(const GridFunction& f) {
    GridFunction out(f.domain());
    const double* a = f.values().data();
    kernels::indexed_map(f.size(), out.values().data(),
                         [a](std::size_t i) { return std::max(a[i], 0.0); });
    return out;
}

GridFunction negative_part(const GridFunction& f) {
    GridFunction out(f.domain());
    const double* a = f.values().data();
    kernels::indexed_map(f.size(), out.values().data(),
                         [a](std::size_t i) { return std::min(a[i], 0.0); });
    return out;
}

double min_value(const GridFunction& f) {
    return *std::min_element(f.values().begin(), f.values().end());
}

double max_value(const GridFunction& f) {
    return *std::max_element(f.values().begin(), f.values().end());
}

double inf_norm(const GridFunction& f) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

namespace {

using DomainKey = std::tuple<int, int, int, double, double>;

DomainKey key_of(const Domain& d) {
    return {d.dimension(), d.nodes_x(), d.nodes_y(), d.length_x(), d.length_y()};
}

std::vector<Mode> build_mode_table(const Domain& d) {
    std::vector<Mode> modes;
    const int nx = d.nodes_x();
    if (d.dimension() == 1) {
        modes.reserve(nx);
        for (int m = 1; m <= nx; ++m) modes.push_back({m, 0, laplacian_eigenvalue(d, m)});
    } else {
        const int ny = d.nodes_y();
        modes.reserve(static_cast<std::size_t>(nx) * ny);
        for (int mx = 1; mx <= nx; ++mx)
            for (int my = 1; my <= ny; ++my)
                modes.push_back({mx, my, laplacian_eigenvalue(d, mx, my)});
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.eigenvalue != b.eigenvalue) return a.eigenvalue < b.eigenvalue;
        return std::pair(a.mx, a.my) < std::pair(b.mx, b.my);
    });
    return modes;
}

} // namespace

const std::vector<Mode>& mode_table(const Domain& d) {
    static std::mutex mtx;
    static std::map<DomainKey, std::vector<Mode>> cache;
    std::scoped_lock lock(mtx);
    auto it = cache.find(key_of(d));
    if (it == cache.end()) it = cache.emplace(key_of(d), build_mode_table(d)).first;
    return it->second;
}

GridFunction mode_field(const Domain& d, const Mode& m) {
    const double cn = basis_norm_constant(d);
    GridFunction out(d);
    const int nx = d.nodes_x();
    const auto& tx = kernels::sine_table(nx);
    if (d.dimension() == 1) {
        for (int j = 0; j < nx; ++j) out[j] = cn * tx.at(m.mx - 1, j);
        return out;
    }
    const int ny = d.nodes_y();
    const auto& ty = kernels::sine_table(ny);
    for (int jy = 0; jy < ny; ++jy)
        for (int jx = 0; jx < nx; ++jx)
            out[static_cast<std::size_t>(jy) * nx + jx] =
                cn * tx.at(m.mx - 1, jx) * ty.at(m.my - 1, jy);
    return out;
}

GridFunction first_eigenmode(const Domain& d) { return mode_field(d, mode_table(d).front()); }

std::vector<double> spectral_transform(const GridFunction& f) {
    const Domain& d = f.domain();
    const int nx = d.nodes_x();
    std::vector<double> hat(f.size());
    raw_sine_transform(d, f.values().data(), hat.data());
    const double scale = d.cell_volume() * basis_norm_constant(d);
    const auto& modes = mode_table(d);
    std::vector<double> coeffs(modes.size());
    for (std::size_t r = 0; r < modes.size(); ++r) {
        const Mode& m = modes[r];
        const std::size_t nat =
            d.dimension() == 1 ? static_cast<std::size_t>(m.mx - 1)
                               : static_cast<std::size_t>(m.my - 1) * nx + (m.mx - 1);
        coeffs[r] = scale * hat[nat];
    }
    return coeffs;
}

GridFunction spectral_synthesize(const Domain& d, std::span<const double> coeffs) {
    const auto& modes = mode_table(d);
    if (coeffs.size() > modes.size())
        throw InvalidParamsError("more spectral coefficients than modes");
    const int nx = d.nodes_x();
    std::vector<double> hat(d.node_count(), 0.0);
    for (std::size_t r = 0; r < coeffs.size(); ++r) {
        const Mode& m = modes[r];
        const std::size_t nat =
            d.dimension() == 1 ? static_cast<std::size_t>(m.mx - 1)
                               : static_cast<std::size_t>(m.my - 1) * nx + (m.mx - 1);
        hat[nat] = coeffs[r];
    }
    GridFunction out(d);
    raw_sine_transform(d, hat.data(), out.values().data());
    out *= basis_norm_constant(d);
    return out;
}

GridFunction spectral_truncate(const GridFunction& f, std::size_t k) {
    const auto& modes = mode_table(f.domain());
    if (k < 1 || k > modes.size())
        throw InvalidParamsError("spectral truncation rank out of range");
    std::vector<double> coeffs = spectral_transform(f);
    coeffs.resize(k);
    return spectral_synthesize(f.domain(), coeffs);
}

void write_csv(const GridFunction& f, std::ostream& out) {
    const Domain& d = f.domain();
    char buf[96];
    if (d.dimension() == 1) {
        out << "x,value\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", d.node_x(i), f[i]);
            out << buf;
        }
        return;
    }
    out << "x,y,value\n";
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", d.node_x(i), d.node_y(i), f[i]);
        out << buf;
    }
}

} // namespace nf
