#include "msmx/banded.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "msmx/errors.hpp"

namespace msmx {

BandedMatrix::BandedMatrix(int n, int kl, int ku) : n_(n), kl_(kl), ku_(ku), rows_(2 * kl + ku + 1) {
    if (n < 1 || kl < 0 || ku < 0)
        throw ValidationError("banded matrix: need n >= 1 and nonnegative bandwidths");
    ab_.assign(static_cast<std::size_t>(rows_) * n_, 0.0);
}

double& BandedMatrix::at(int i, int j) {
    if (factored_) throw ValidationError("banded matrix: write after factorization");
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw ValidationError("banded matrix: index out of range");
    if (i - j > kl_ || j - i > ku_)
        throw ValidationError("banded matrix: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") outside band");
    return slot(kl_ + ku_ + i - j, j);
}

double BandedMatrix::get(int i, int j) const {
    if (factored_) throw ValidationError("banded matrix: read after factorization");
    if (i < 0 || i >= n_ || j < 0 || j >= n_)
        throw ValidationError("banded matrix: index out of range");
    if (i - j > kl_ || j - i > ku_) return 0.0;
    return slot(kl_ + ku_ + i - j, j);
}

void BandedMatrix::factor() {
    if (factored_) return;
    ipiv_.resize(n_);
    int ju = 0;  // rightmost column touched by fill so far
    for (int j = 0; j < n_; ++j) {
        const int km = std::min(kl_, n_ - 1 - j);
        int jp = 0;
        double best = std::abs(slot(kl_ + ku_, j));
        for (int k = 1; k <= km; ++k) {
            const double v = std::abs(slot(kl_ + ku_ + k, j));
            if (v > best) {
                best = v;
                jp = k;
            }
        }
        ipiv_[j] = j + jp;
        if (best == 0.0)
            throw NumericalError("banded LU: singular pivot at row " + std::to_string(j));
        ju = std::max(ju, std::min(j + ku_ + jp, n_ - 1));
        if (jp != 0)
            for (int c = j; c <= ju; ++c)
                std::swap(slot(kl_ + ku_ + j - c, c), slot(kl_ + ku_ + j + jp - c, c));
        const double piv = slot(kl_ + ku_, j);
        for (int k = 1; k <= km; ++k) slot(kl_ + ku_ + k, j) /= piv;
        for (int c = j + 1; c <= ju; ++c) {
            const double f = slot(kl_ + ku_ + j - c, c);
            if (f == 0.0) continue;
            for (int k = 1; k <= km; ++k) slot(kl_ + ku_ + j + k - c, c) -= f * slot(kl_ + ku_ + k, j);
        }
    }
    factored_ = true;
}

void BandedMatrix::solve(std::vector<double>& b) {
    if (static_cast<int>(b.size()) != n_)
        throw ValidationError("banded solve: right-hand side has wrong length");
    factor();
    for (int j = 0; j < n_ - 1; ++j) {
        const int jp = ipiv_[j];
        if (jp != j) std::swap(b[j], b[jp]);
        const int km = std::min(kl_, n_ - 1 - j);
        for (int k = 1; k <= km; ++k) b[j + k] -= slot(kl_ + ku_ + k, j) * b[j];
    }
    for (int j = n_ - 1; j >= 0; --j) {
        double s = b[j];
        const int cmax = std::min(n_ - 1, j + kl_ + ku_);
        for (int c = j + 1; c <= cmax; ++c) s -= slot(kl_ + ku_ + j - c, c) * b[c];
        b[j] = s / slot(kl_ + ku_, j);
    }
}

std::vector<double> BandedMatrix::matvec(const std::vector<double>& x) const {
    if (factored_) throw ValidationError("banded matvec: matrix already factored");
    if (static_cast<int>(x.size()) != n_) throw ValidationError("banded matvec: vector has wrong length");
    std::vector<double> y(n_, 0.0);
    for (int j = 0; j < n_; ++j) {
        const double xj = x[j];
        if (xj == 0.0) continue;
        const int ilo = std::max(0, j - ku_), ihi = std::min(n_ - 1, j + kl_);
        for (int i = ilo; i <= ihi; ++i) y[i] += slot(kl_ + ku_ + i - j, j) * xj;
    }
    return y;
}

BandedBlockMatrix::BandedBlockMatrix(int nblocks, int block, int bw)
    : nblocks_(nblocks), block_(block), m_(nblocks * block, bw * block + block - 1, bw * block + block - 1) {
    if (block < 1 || bw < 0) throw ValidationError("block band: need block >= 1 and bw >= 0");
}

void BandedBlockMatrix::add_block(int I, int J, const double* blk, double scale) {
    for (int r = 0; r < block_; ++r)
        for (int c = 0; c < block_; ++c) {
            const double v = blk[r * block_ + c] * scale;
            if (v != 0.0) at(I, J, r, c) += v;
        }
}

}  // namespace msmx
