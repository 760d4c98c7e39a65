#include "msmx/rng.hpp"

#include <cmath>
#include <numbers>

namespace msmx {

double FourierField1D::value(double x) const {
    const double w = 2.0 * std::numbers::pi / length_;
    double out = a_[0];
    for (std::size_t k = 1; k < a_.size(); ++k) {
        const double ph = w * static_cast<double>(k) * (x - x0_);
        out += a_[k] * std::cos(ph) + b_[k] * std::sin(ph);
    }
    return out;
}

double FourierField1D::deriv(double x) const {
    const double w = 2.0 * std::numbers::pi / length_;
    double out = 0.0;
    for (std::size_t k = 1; k < a_.size(); ++k) {
        const double kw = w * static_cast<double>(k);
        const double ph = kw * (x - x0_);
        out += kw * (-a_[k] * std::sin(ph) + b_[k] * std::cos(ph));
    }
    return out;
}

}  // namespace msmx
