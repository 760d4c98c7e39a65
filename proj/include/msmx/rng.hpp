#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace msmx {

// Seeded generator with a fixed bit-to-double mapping so streams are
// reproducible across platforms. std::mt19937_64 output is specified by the
// standard; the distributions are not, so we map bits ourselves.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // [0, 1)
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // symmetric interval [-a, a)
    double symmetric(double a) { return uniform(-a, a); }

    std::uint64_t bits() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

// Random smooth periodic function on [x0, x0 + length): a low-mode Fourier
// sum with coefficients drawn from rng. Smoothness keeps discrete derivatives
// well resolved, which matters when these seed structure-preserving runs.
class FourierField1D {
public:
    FourierField1D(Rng& rng, double x0, double length, int modes, double amplitude)
        : x0_(x0), length_(length) {
        a_.resize(static_cast<std::size_t>(modes) + 1);
        b_.resize(static_cast<std::size_t>(modes) + 1);
        for (std::size_t k = 0; k < a_.size(); ++k) {
            a_[k] = rng.symmetric(amplitude);
            b_[k] = (k == 0) ? 0.0 : rng.symmetric(amplitude);
        }
    }

    double value(double x) const;
    double deriv(double x) const;

private:
    double x0_;
    double length_;
    std::vector<double> a_, b_;  // cos / sin coefficients per mode
};

}  // namespace msmx
