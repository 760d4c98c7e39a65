#include "msmx/core.hpp"

#include "msmx/errors.hpp"

namespace msmx {

// Generator of the cross product: rot_matrix(a) * v == e_a x v.
Mat3 rot_matrix(Axis axis) {
    switch (axis) {
        case Axis::X:
            return Mat3{{{0.0, 0.0, 0.0}, {0.0, 0.0, -1.0}, {0.0, 1.0, 0.0}}};
        case Axis::Y:
            return Mat3{{{0.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}}};
        case Axis::Z:
            return Mat3{{{0.0, -1.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 0.0, 0.0}}};
    }
    throw ValidationError("unknown axis");
}

}  // namespace msmx
