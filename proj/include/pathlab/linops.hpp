#pragma once

#include <complex>
#include <span>
#include <vector>

namespace pathlab {

using cplx = std::complex<double>;

/// Dense complex matrix, row-major. Values are immutable in spirit: all
/// operations return fresh matrices, so instances can be shared across
/// threads without synchronisation.
class ComplexMatrix {
public:
    ComplexMatrix() = default;
    ComplexMatrix(std::size_t rows, std::size_t cols);
    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);

    static ComplexMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cplx& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

    const std::vector<cplx>& entries() const { return entries_; }

    ComplexMatrix operator+(const ComplexMatrix& rhs) const;
    ComplexMatrix operator-(const ComplexMatrix& rhs) const;
    ComplexMatrix operator*(const ComplexMatrix& rhs) const;
    ComplexMatrix scaled(cplx factor) const;
    ComplexMatrix adjoint() const;

    std::vector<cplx> apply(std::span<const cplx> v) const;

    double frobenius_norm() const;
    double max_abs() const;
    double one_norm() const; // maximum absolute column sum
    bool all_finite() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> entries_;
};

/// Square matrix validated to satisfy A = A* within 1e-12 relative tolerance.
class HermitianOperator {
public:
    /// Throws std::invalid_argument naming the maximum asymmetry if the
    /// matrix is not Hermitian within tolerance.
    explicit HermitianOperator(ComplexMatrix matrix);

    std::size_t dimension() const { return matrix_.rows(); }
    const ComplexMatrix& matrix() const { return matrix_; }

private:
    ComplexMatrix matrix_;
};

/// Eigenvalues (ascending) and a unitary matrix of column eigenvectors.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    ComplexMatrix eigenvectors;
};

/// Cyclic Jacobi diagonalisation of a Hermitian matrix.
/// Postconditions: ||A - U diag(w) U*|| <= 1e-10 ||A|| and ||U*U - I|| <= 1e-12.
SpectralDecomposition eig_hermitian(const HermitianOperator& a);

/// U diag(exp(z w_k)) U* from the cached decomposition.
ComplexMatrix expm_spectral(const SpectralDecomposition& ed, cplx z);

/// Convenience overload that decomposes and exponentiates in one call.
ComplexMatrix expm_spectral(const HermitianOperator& a, cplx z);

/// U diag(exp(z w_k)) U* applied to a single vector, O(n^2).
std::vector<cplx> expm_spectral_apply(const SpectralDecomposition& ed, cplx z,
                                      std::span<const cplx> v);

/// exp(t A) for a general square matrix by scaling and squaring with a
/// machine-precision Taylor kernel on the scaled matrix.
ComplexMatrix expm_general(const ComplexMatrix& a, double t);

} // namespace pathlab
