#pragma once

#include <Eigen/Sparse>
#include <vector>

#include "nf/grid.hpp"

namespace nf::detail {

using Triplet = Eigen::Triplet<double>;

/// Append the 5-point (3-point in 1D) -Laplacian entries for one species
/// block at the given offset of a block system.
inline void add_neg_laplacian(const Domain& d, std::size_t offset, std::vector<Triplet>& out) {
    const int nx = d.nodes_x();
    const double ihx2 = 1.0 / (d.hx() * d.hx());
    if (d.dimension() == 1) {
        for (int i = 0; i < nx; ++i) {
            const auto row = static_cast<int>(offset) + i;
            out.emplace_back(row, row, 2.0 * ihx2);
            if (i > 0) out.emplace_back(row, row - 1, -ihx2);
            if (i + 1 < nx) out.emplace_back(row, row + 1, -ihx2);
        }
        return;
    }
    const int ny = d.nodes_y();
    const double ihy2 = 1.0 / (d.hy() * d.hy());
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const auto row = static_cast<int>(offset) + iy * nx + ix;
            out.emplace_back(row, row, 2.0 * ihx2 + 2.0 * ihy2);
            if (ix > 0) out.emplace_back(row, row - 1, -ihx2);
            if (ix + 1 < nx) out.emplace_back(row, row + 1, -ihx2);
            if (iy > 0) out.emplace_back(row, row - nx, -ihy2);
            if (iy + 1 < ny) out.emplace_back(row, row + nx, -ihy2);
        }
    }
}

} // namespace nf::detail
