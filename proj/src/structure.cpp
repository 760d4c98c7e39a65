#include "msmx/structure.hpp"

namespace msmx {

namespace {

// Writes a 3x3 block scaled by `factor` at block position (br, bc).
void put_block(Mat18& m, int br, int bc, const Mat3& b, double factor) {
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) m[static_cast<std::size_t>(3 * br + r)][static_cast<std::size_t>(3 * bc + c)] = factor * b[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
}

Mat3 identity3() { return Mat3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}; }

Mat18 k_matrix(Axis axis) {
    Mat18 k{};
    const Mat3 r = rot_matrix(axis);
    // block order (H,E,V,U,P,Q): rows H,E carry the curls of U,V; rows V,U
    // mirror them with opposite sign so the matrix is antisymmetric.
    put_block(k, 0, 3, r, 0.5);
    put_block(k, 1, 2, r, -0.5);
    put_block(k, 2, 1, r, -0.5);
    put_block(k, 3, 0, r, 0.5);
    return k;
}

}  // namespace

MsStructure assemble_ms_structure() {
    MsStructure s{};
    const Mat3 id = identity3();
    put_block(s.M, 2, 4, id, -1.0);
    put_block(s.M, 3, 5, id, -1.0);
    put_block(s.M, 4, 2, id, 1.0);
    put_block(s.M, 5, 3, id, 1.0);
    s.K1 = k_matrix(Axis::X);
    s.K2 = k_matrix(Axis::Y);
    s.K3 = k_matrix(Axis::Z);
    return s;
}

State18 mat18_apply(const Mat18& m, const State18& z) {
    State18 out{};
    for (std::size_t r = 0; r < 18; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < 18; ++c) acc += m[r][c] * z[c];
        out[r] = acc;
    }
    return out;
}

TwoFormValue two_forms(const State18& xi, const State18& eta, const MsStructure& s) {
    const State18 mxi = mat18_apply(s.M, xi);
    const State18 kxi = mat18_apply(s.K1, xi);
    TwoFormValue v{};
    for (std::size_t i = 0; i < 18; ++i) {
        v.omega += mxi[i] * eta[i];
        v.kappa += kxi[i] * eta[i];
    }
    return v;
}

}  // namespace msmx
