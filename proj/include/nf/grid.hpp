#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "nf/errors.hpp"

namespace nf {

/// Rectangular box with homogeneous Dirichlet boundary, discretized by
/// interior nodes of a uniform grid. 1D intervals are supported for fast
/// tests; all formulas are dimension-agnostic.
class Domain {
public:
    static Domain interval(double length, int n);
    static Domain box(double length_x, double length_y, int nx, int ny);

    int dimension() const { return dim_; }
    double length_x() const { return lx_; }
    double length_y() const { return ly_; }
    int nodes_x() const { return nx_; }
    int nodes_y() const { return ny_; }

    double hx() const { return lx_ / (nx_ + 1); }
    double hy() const { return ly_ / (ny_ + 1); }
    /// Quadrature weight of one interior node (h in 1D, hx*hy in 2D).
    double cell_volume() const { return dim_ == 1 ? hx() : hx() * hy(); }

    std::size_t node_count() const {
        return static_cast<std::size_t>(nx_) * (dim_ == 1 ? 1 : ny_);
    }
    double node_x(std::size_t idx) const {
        return hx() * (static_cast<int>(idx % nx_) + 1);
    }
    double node_y(std::size_t idx) const {
        return dim_ == 1 ? 0.0 : hy() * (static_cast<int>(idx / nx_) + 1);
    }

    bool operator==(const Domain&) const = default;

private:
    Domain(int dim, double lx, double ly, int nx, int ny);

    int dim_ = 1;
    double lx_ = 1.0, ly_ = 0.0;
    int nx_ = 3, ny_ = 0;
};

/// Nodal values of a Dirichlet-zero function at the interior nodes,
/// row-major with x fastest. Boundary values are implicitly zero.
class GridFunction {
public:
    explicit GridFunction(const Domain& d);
    GridFunction(const Domain& d, std::vector<double> values);

    /// Samples a callable (x) or (x, y) at the interior nodes.
    static GridFunction sample(const Domain& d, const std::function<double(double, double)>& f);

    const Domain& domain() const { return domain_; }
    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    GridFunction& operator+=(const GridFunction& g);
    GridFunction& operator-=(const GridFunction& g);
    GridFunction& operator*=(double s);
    /// this += s * g
    GridFunction& axpy(double s, const GridFunction& g);

private:
    Domain domain_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction f, const GridFunction& g);
GridFunction operator-(GridFunction f, const GridFunction& g);
GridFunction operator*(double s, GridFunction f);

/// Standard second-order centered-difference -Laplacian with zero boundary.
GridFunction laplacian_apply(const GridFunction& f);

/// Inverse of laplacian_apply via sine-transform diagonalization.
GridFunction poisson_solve(const GridFunction& g);

/// Discrete Dirichlet form: cell_volume * sum_nodes f * (-Laplacian g).
double h1_inner(const GridFunction& f, const GridFunction& g);
double h1_norm(const GridFunction& f);

/// Cell-volume-weighted sum of (f+)^r, or |f|^r when positive_part_only is off.
double lp_integral(const GridFunction& f, double r, bool positive_part_only = true);

/// Cell-volume-weighted sum of (f+)^ef * (g+)^eg.
double pos_power_product_integral(const GridFunction& f, double ef, const GridFunction& g, double eg);

/// Plain cell-weighted integral of f * g (no positive parts).
double l2_inner(const GridFunction& f, const GridFunction& g);
double l2_norm(const GridFunction& f);

GridFunction positive_part(const GridFunction& f);
GridFunction negative_part(const GridFunction& f);

double min_value(const GridFunction& f);
double max_value(const GridFunction& f);
double inf_norm(const GridFunction& f);

/// One eigenmode of the discrete Dirichlet Laplacian.
struct Mode {
    int mx = 1;          ///< 1-based per-direction frequency
    int my = 0;          ///< 0 in 1D
    double eigenvalue = 0.0;
};

/// All modes of the domain, ascending by eigenvalue, ties broken by (mx, my).
const std::vector<Mode>& mode_table(const Domain& d);

/// Eigenvalue of the discrete stencil for per-direction frequencies.
double laplacian_eigenvalue(const Domain& d, int mx, int my = 0);

/// Nodal field of one mode, normalized to unit cell-weighted L2 norm.
/// The sign convention keeps the first mode positive.
GridFunction mode_field(const Domain& d, const Mode& m);

/// First (lowest-eigenvalue) normalized eigenmode; positive in the interior.
GridFunction first_eigenmode(const Domain& d);

/// Coefficients of f in the orthonormal eigenbasis, in mode_table order.
std::vector<double> spectral_transform(const GridFunction& f);

/// Reconstruct from leading coefficients in mode_table order (rest zero).
GridFunction spectral_synthesize(const Domain& d, std::span<const double> coeffs);

/// Orthogonal projection (Dirichlet form) onto the k lowest-eigenvalue modes.
GridFunction spectral_truncate(const GridFunction& f, std::size_t k);

/// CSV dump: header x,y,value (x,value in 1D), row-major, 17 significant digits.
void write_csv(const GridFunction& f, std::ostream& out);

} // namespace nf
