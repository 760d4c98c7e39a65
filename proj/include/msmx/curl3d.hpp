#pragma once

#include <array>
#include <vector>

#include "msmx/core.hpp"

namespace msmx {

// Periodic sample box for 3D fields; index (ix*ny + iy)*nz + iz.
struct Box3 {
    std::array<int, 3> n;  // samples per axis, each >= 4
    std::array<double, 3> h;

    [[nodiscard]] std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * static_cast<std::size_t>(n[1]) * static_cast<std::size_t>(n[2]);
    }
    [[nodiscard]] std::size_t idx(int ix, int iy, int iz) const {
        return (static_cast<std::size_t>(ix) * static_cast<std::size_t>(n[1]) + static_cast<std::size_t>(iy)) *
                   static_cast<std::size_t>(n[2]) +
               static_cast<std::size_t>(iz);
    }

    void validate() const;
};

// curl = R1 D_x + R2 D_y + R3 D_z with periodic central differences.
std::vector<Vec3> curl_apply(const std::vector<Vec3>& field, const Box3& box);

}  // namespace msmx
