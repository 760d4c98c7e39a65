#pragma once

#include <vector>

namespace msmx {

// General banded matrix with in-place LU factorization and row pivoting.
// Storage follows the LAPACK band convention: entry (i, j) lives at
// ab(kl + ku + i - j, j), with kl extra upper rows reserved for the
// fill-in that pivoting produces. Factoring overwrites the matrix, so
// assembly must be complete before the first solve.
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int lower() const { return kl_; }
    int upper() const { return ku_; }

    double& at(int i, int j);
    double get(int i, int j) const;  // zero outside the band
    void add(int i, int j, double v) { at(i, j) += v; }

    void factor();
    bool factored() const { return factored_; }

    // Solves A x = b in place. Factors lazily on first use.
    void solve(std::vector<double>& b);

    // y = A x from the stored band; only meaningful before factoring.
    [[nodiscard]] std::vector<double> matvec(const std::vector<double>& x) const;

  private:
    double& slot(int r, int j) { return ab_[static_cast<std::size_t>(j) * rows_ + r]; }
    double slot(int r, int j) const { return ab_[static_cast<std::size_t>(j) * rows_ + r]; }

    int n_;
    int kl_;
    int ku_;
    int rows_;
    bool factored_ = false;
    std::vector<double> ab_;
    std::vector<int> ipiv_;
};

// Square blocks of a fixed size with block couplings up to `bw` off the
// block diagonal, backed by a scalar band of width bw*block + block - 1.
class BandedBlockMatrix {
  public:
    BandedBlockMatrix(int nblocks, int block, int bw);

    int blocks() const { return nblocks_; }
    int block_size() const { return block_; }

    double& at(int I, int J, int r, int c) { return m_.at(I * block_ + r, J * block_ + c); }
    [[nodiscard]] double get(int I, int J, int r, int c) const { return m_.get(I * block_ + r, J * block_ + c); }

    // Accumulates a row-major block*block tile into block (I, J).
    void add_block(int I, int J, const double* blk, double scale = 1.0);

    void solve(std::vector<double>& b) { m_.solve(b); }
    [[nodiscard]] std::vector<double> matvec(const std::vector<double>& x) const { return m_.matvec(x); }
    BandedMatrix& scalar() { return m_; }
    const BandedMatrix& scalar() const { return m_; }

  private:
    int nblocks_;
    int block_;
    BandedMatrix m_;
};

}  // namespace msmx
