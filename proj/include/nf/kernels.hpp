#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Data-parallel node kernels. Every kernel has an OpenMP-parallel production
// version and a plain serial reference (suffix _serial) that the tests and the
// benchmark compare against. Reductions use a fixed block decomposition whose
// summation order does not depend on the thread count, so production results
// are identical whether OpenMP is enabled or not.

namespace nf::kernels {

/// Runtime switch for the OpenMP paths (default on). Affects speed only,
/// never results.
bool parallel_enabled();
void set_parallel(bool on);

/// Block length of the deterministic reduction.
inline constexpr std::size_t reduce_block = 1024;

namespace detail {
void parallel_block_loop(std::size_t num_blocks, void* ctx, void (*body)(void*, std::size_t));
}

/// Deterministic sum of f(0) + ... + f(n-1): per-block partial sums combined
/// in block order. Same arithmetic for any thread count.
template <class F>
double indexed_sum(std::size_t n, F&& f) {
    if (n == 0) return 0.0;
    const std::size_t nb = (n + reduce_block - 1) / reduce_block;
    std::vector<double> partial(nb, 0.0);
    struct Ctx {
        std::size_t n;
        F* f;
        double* partial;
    } ctx{n, &f, partial.data()};
    detail::parallel_block_loop(nb, &ctx, [](void* p, std::size_t b) {
        auto& c = *static_cast<Ctx*>(p);
        const std::size_t lo = b * reduce_block;
        const std::size_t hi = lo + reduce_block < c.n ? lo + reduce_block : c.n;
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += (*c.f)(i);
        c.partial[b] = s;
    });
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) total += partial[b];
    return total;
}

/// Naive left-to-right accumulation; test/bench oracle for indexed_sum.
template <class F>
double indexed_sum_serial(std::size_t n, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(i);
    return s;
}

/// Elementwise out[i] = f(i) over n entries, parallel over blocks.
template <class F>
void indexed_map(std::size_t n, double* out, F&& f) {
    if (n == 0) return;
    const std::size_t nb = (n + reduce_block - 1) / reduce_block;
    struct Ctx {
        std::size_t n;
        double* out;
        F* f;
    } ctx{n, out, &f};
    detail::parallel_block_loop(nb, &ctx, [](void* p, std::size_t b) {
        auto& c = *static_cast<Ctx*>(p);
        const std::size_t lo = b * reduce_block;
        const std::size_t hi = lo + reduce_block < c.n ? lo + reduce_block : c.n;
        for (std::size_t i = lo; i < hi; ++i) c.out[i] = (*c.f)(i);
    });
}

/// 5-point -Laplacian with zero Dirichlet boundary, row-major (x fastest).
void neg_laplacian_2d(const double* f, double* out, int nx, int ny, double inv_hx2, double inv_hy2);
void neg_laplacian_2d_serial(const double* f, double* out, int nx, int ny, double inv_hx2, double inv_hy2);

/// 3-point -u'' with zero Dirichlet boundary.
void neg_laplacian_1d(const double* f, double* out, int n, double inv_h2);
void neg_laplacian_1d_serial(const double* f, double* out, int n, double inv_h2);

/// Dense type-I sine matrix for n interior nodes: entry(m, j) =
/// sin((m+1)(j+1)pi/(n+1)). Symmetric; its square is (n+1)/2 * I.
struct SineTable {
    int n = 0;
    std::vector<double> entries; // n*n, row m holds the m-th mode samples

    explicit SineTable(int n_interior);
    double at(int m, int j) const { return entries[static_cast<std::size_t>(m) * n + j]; }
};

/// Shared table cache keyed by n.
const SineTable& sine_table(int n_interior);

/// Apply the sine matrix along x to each of the ny rows of a row-major field.
void sine_apply_rows(const SineTable& t, const double* in, double* out, int nx, int ny);
void sine_apply_rows_serial(const SineTable& t, const double* in, double* out, int nx, int ny);

/// Apply the sine matrix along y to each of the nx columns.
void sine_apply_cols(const SineTable& t, const double* in, double* out, int nx, int ny);
void sine_apply_cols_serial(const SineTable& t, const double* in, double* out, int nx, int ny);

} // namespace nf::kernels
