#include "nf/kernels.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace nf::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

namespace detail {

void parallel_block_loop(std::size_t num_blocks, void* ctx, void (*body)(void*, std::size_t)) {
    const long nb = static_cast<long>(num_blocks);
#pragma omp parallel for schedule(static) if (parallel_enabled() && nb > 1)
    for (long b = 0; b < nb; ++b) body(ctx, static_cast<std::size_t>(b));
}

} // namespace detail

void neg_laplacian_2d(const double* f, double* out, int nx, int ny, double inv_hx2, double inv_hy2) {
#pragma omp parallel for schedule(static) if (parallel_enabled() && ny > 1)
    for (int iy = 0; iy < ny; ++iy) {
        const double* row = f + static_cast<std::size_t>(iy) * nx;
        const double* below = iy > 0 ? row - nx : nullptr;
        const double* above = iy + 1 < ny ? row + nx : nullptr;
        double* o = out + static_cast<std::size_t>(iy) * nx;
        for (int ix = 0; ix < nx; ++ix) {
            const double left = ix > 0 ? row[ix - 1] : 0.0;
            const double right = ix + 1 < nx ? row[ix + 1] : 0.0;
            const double down = below ? below[ix] : 0.0;
            const double up = above ? above[ix] : 0.0;
            o[ix] = inv_hx2 * (2.0 * row[ix] - left - right) + inv_hy2 * (2.0 * row[ix] - down - up);
        }
    }
}

void neg_laplacian_2d_serial(const double* f, double* out, int nx, int ny, double inv_hx2, double inv_hy2) {
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const std::size_t k = static_cast<std::size_t>(iy) * nx + ix;
            const double left = ix > 0 ? f[k - 1] : 0.0;
            const double right = ix + 1 < nx ? f[k + 1] : 0.0;
            const double down = iy > 0 ? f[k - nx] : 0.0;
            const double up = iy + 1 < ny ? f[k + nx] : 0.0;
            out[k] = inv_hx2 * (2.0 * f[k] - left - right) + inv_hy2 * (2.0 * f[k] - down - up);
        }
    }
}

void neg_laplacian_1d(const double* f, double* out, int n, double inv_h2) {
#pragma omp parallel for schedule(static) if (parallel_enabled() && n > 2048)
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? f[i - 1] : 0.0;
        const double right = i + 1 < n ? f[i + 1] : 0.0;
        out[i] = inv_h2 * (2.0 * f[i] - left - right);
    }
}

void neg_laplacian_1d_serial(const double* f, double* out, int n, double inv_h2) {
    for (int i = 0; i < n; ++i) {
        const double left = i > 0 ? f[i - 1] : 0.0;
        const double right = i + 1 < n ? f[i + 1] : 0.0;
        out[i] = inv_h2 * (2.0 * f[i] - left - right);
    }
}

SineTable::SineTable(int n_interior) : n(n_interior), entries(static_cast<std::size_t>(n) * n) {
    const double step = std::numbers::pi / (n + 1);
    for (int m = 0; m < n; ++m)
        for (int j = 0; j < n; ++j)
            entries[static_cast<std::size_t>(m) * n + j] = std::sin(step * (m + 1) * (j + 1));
}

const SineTable& sine_table(int n_interior) {
    static std::mutex mtx;
    static std::map<int, SineTable> cache;
    std::scoped_lock lock(mtx);
    auto it = cache.find(n_interior);
    if (it == cache.end()) it = cache.emplace(n_interior, SineTable(n_interior)).first;
    return it->second;
}

void sine_apply_rows(const SineTable& t, const double* in, double* out, int nx, int ny) {
#pragma omp parallel for schedule(static) if (parallel_enabled() && ny > 1)
    for (int iy = 0; iy < ny; ++iy) {
        const double* row = in + static_cast<std::size_t>(iy) * nx;
        double* o = out + static_cast<std::size_t>(iy) * nx;
        for (int m = 0; m < nx; ++m) {
            const double* s = t.entries.data() + static_cast<std::size_t>(m) * nx;
            double acc = 0.0;
            for (int j = 0; j < nx; ++j) acc += s[j] * row[j];
            o[m] = acc;
        }
    }
}

void sine_apply_rows_serial(const SineTable& t, const double* in, double* out, int nx, int ny) {
    for (int iy = 0; iy < ny; ++iy) {
        const double* row = in + static_cast<std::size_t>(iy) * nx;
        double* o = out + static_cast<std::size_t>(iy) * nx;
        for (int m = 0; m < nx; ++m) {
            double acc = 0.0;
            for (int j = 0; j < nx; ++j) acc += t.at(m, j) * row[j];
            o[m] = acc;
        }
    }
}

void sine_apply_cols(const SineTable& t, const double* in, double* out, int nx, int ny) {
#pragma omp parallel for schedule(static) if (parallel_enabled() && nx > 1)
    for (int ix = 0; ix < nx; ++ix) {
        for (int m = 0; m < ny; ++m) {
            const double* s = t.entries.data() + static_cast<std::size_t>(m) * ny;
            double acc = 0.0;
            for (int j = 0; j < ny; ++j) acc += s[j] * in[static_cast<std::size_t>(j) * nx + ix];
            out[static_cast<std::size_t>(m) * nx + ix] = acc;
        }
    }
}

void sine_apply_cols_serial(const SineTable& t, const double* in, double* out, int nx, int ny) {
    for (int ix = 0; ix < nx; ++ix) {
        for (int m = 0; m < ny; ++m) {
            double acc = 0.0;
            for (int j = 0; j < ny; ++j) acc += t.at(m, j) * in[static_cast<std::size_t>(j) * nx + ix];
            out[static_cast<std::size_t>(m) * nx + ix] = acc;
        }
    }
}

} // namespace nf::kernels
