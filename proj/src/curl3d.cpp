#include "msmx/curl3d.hpp"

#include "msmx/errors.hpp"

namespace msmx {

void Box3::validate() const {
    for (int a = 0; a < 3; ++a) {
        if (n[static_cast<std::size_t>(a)] < 4) throw ValidationError("curl grid: need at least 4 samples per axis");
        if (!(h[static_cast<std::size_t>(a)] > 0.0)) throw ValidationError("curl grid: spacing must be positive");
    }
}

std::vector<Vec3> curl_apply(const std::vector<Vec3>& field, const Box3& box) {
    box.validate();
    if (field.size() != box.size()) throw ValidationError("curl: sample count does not match the grid");

    const Mat3 R[3] = {rot_matrix(Axis::X), rot_matrix(Axis::Y), rot_matrix(Axis::Z)};
    std::vector<Vec3> out(field.size());

    const int nx = box.n[0], ny = box.n[1], nz = box.n[2];
    for (int ix = 0; ix < nx; ++ix) {
        const int xp = (ix + 1) % nx, xm = (ix + nx - 1) % nx;
        for (int iy = 0; iy < ny; ++iy) {
            const int yp = (iy + 1) % ny, ym = (iy + ny - 1) % ny;
            for (int iz = 0; iz < nz; ++iz) {
                const int zp = (iz + 1) % nz, zm = (iz + nz - 1) % nz;
                const Vec3 dx = (field[box.idx(xp, iy, iz)] - field[box.idx(xm, iy, iz)]) * (0.5 / box.h[0]);
                const Vec3 dy = (field[box.idx(ix, yp, iz)] - field[box.idx(ix, ym, iz)]) * (0.5 / box.h[1]);
                const Vec3 dz = (field[box.idx(ix, iy, zp)] - field[box.idx(ix, iy, zm)]) * (0.5 / box.h[2]);
                out[box.idx(ix, iy, iz)] = matvec(R[0], dx) + matvec(R[1], dy) + matvec(R[2], dz);
            }
        }
    }
    return out;
}

}  // namespace msmx
