#include "pathlab/linops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace pathlab {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, cplx(0.0, 0.0)) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_) {
        throw std::invalid_argument("ComplexMatrix: entry count does not match dimensions");
    }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

ComplexMatrix ComplexMatrix::operator+(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw std::invalid_argument("ComplexMatrix::operator+: shape mismatch");
    }
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out.entries_[i] = entries_[i] + rhs.entries_[i];
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& rhs) const {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) {
        throw std::invalid_argument("ComplexMatrix::operator-: shape mismatch");
    }
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out.entries_[i] = entries_[i] - rhs.entries_[i];
    }
    return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
    if (cols_ != rhs.rows_) {
        throw std::invalid_argument("ComplexMatrix::operator*: shape mismatch");
    }
    ComplexMatrix out(rows_, rhs.cols_);
    // ikj order keeps the inner loop contiguous in both operands.
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const cplx aik = entries_[i * cols_ + k];
            if (aik == cplx(0.0, 0.0)) {
                continue;
            }
            const cplx* brow = &rhs.entries_[k * rhs.cols_];
            cplx* orow = &out.entries_[i * rhs.cols_];
            for (std::size_t j = 0; j < rhs.cols_; ++j) {
                orow[j] += aik * brow[j];
            }
        }
    }
    return out;
}

ComplexMatrix ComplexMatrix::scaled(cplx factor) const {
    ComplexMatrix out(rows_, cols_);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        out.entries_[i] = entries_[i] * factor;
    }
    return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
    ComplexMatrix out(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            out(j, i) = std::conj((*this)(i, j));
        }
    }
    return out;
}

std::vector<cplx> ComplexMatrix::apply(std::span<const cplx> v) const {
    if (v.size() != cols_) {
        throw std::invalid_argument("ComplexMatrix::apply: length mismatch");
    }
    std::vector<cplx> out(rows_, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < rows_; ++i) {
        const cplx* row = &entries_[i * cols_];
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) {
            acc += row[j] * v[j];
        }
        out[i] = acc;
    }
    return out;
}

double ComplexMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto& e : entries_) {
        s += std::norm(e);
    }
    return std::sqrt(s);
}

double ComplexMatrix::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) {
        m = std::max(m, std::abs(e));
    }
    return m;
}

double ComplexMatrix::one_norm() const {
    double best = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += std::abs((*this)(i, j));
        }
        best = std::max(best, s);
    }
    return best;
}

bool ComplexMatrix::all_finite() const {
    for (const auto& e : entries_) {
        if (!std::isfinite(e.real()) || !std::isfinite(e.imag())) {
            return false;
        }
    }
    return true;
}

HermitianOperator::HermitianOperator(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (!matrix_.square()) {
        throw std::invalid_argument("HermitianOperator: matrix must be square");
    }
    if (!matrix_.all_finite()) {
        throw std::invalid_argument("HermitianOperator: non-finite entries");
    }
    const std::size_t n = matrix_.rows();
    double max_asym = 0.0;
    double scale = matrix_.max_abs();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            max_asym = std::max(max_asym, std::abs(matrix_(i, j) - std::conj(matrix_(j, i))));
        }
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    if (max_asym > 1e-12 * scale) {
        std::ostringstream msg;
        msg << "HermitianOperator: matrix is not Hermitian, max asymmetry " << max_asym
            << " exceeds 1e-12 * " << scale;
        throw std::invalid_argument(msg.str());
    }
    // Symmetrise so downstream code sees an exactly Hermitian matrix.
    for (std::size_t i = 0; i < n; ++i) {
        matrix_(i, i) = cplx(matrix_(i, i).real(), 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            const cplx avg = 0.5 * (matrix_(i, j) + std::conj(matrix_(j, i)));
            matrix_(i, j) = avg;
            matrix_(j, i) = std::conj(avg);
        }
    }
}

namespace {

// One cyclic Jacobi pass infrastructure shared by the real and complex paths.
// The rotation zeroing A[p][q] uses the small-magnitude tangent root of
// t^2 - 2*tau*t - 1 = 0 with tau = (A_qq - A_pp) / (2 |A_pq|).
double jacobi_tangent(double tau) {
    const double root = std::hypot(tau, 1.0);
    return tau >= 0.0 ? -1.0 / (tau + root) : 1.0 / (-tau + root);
}

double offdiag_norm_complex(const std::vector<cplx>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            s += 2.0 * std::norm(a[p * n + q]);
        }
    }
    return std::sqrt(s);
}

SpectralDecomposition jacobi_complex(std::vector<cplx> a, std::size_t n) {
    std::vector<cplx> u(n * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        u[i * n + i] = 1.0;
    }
    double scale = 0.0;
    for (const auto& e : a) {
        scale = std::max(scale, std::abs(e));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    const double stop = 1e-15 * scale * static_cast<double>(n);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_norm_complex(a, n) <= stop) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a[p * n + q];
                const double r = std::abs(apq);
                if (r <= 1e-300) {
                    a[p * n + q] = a[q * n + p] = 0.0;
                    continue;
                }
                const cplx phase = apq / r;
                const double app = a[p * n + p].real();
                const double aqq = a[q * n + q].real();
                const double tau = (aqq - app) / (2.0 * r);
                const double t = jacobi_tangent(tau);
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sigma = t * c;
                const cplx s = sigma * std::conj(phase);
                // Columns: col_p' = c col_p + s col_q ; col_q' = -conj(s) col_p + c col_q.
                for (std::size_t i = 0; i < n; ++i) {
                    const cplx aip = a[i * n + p];
                    const cplx aiq = a[i * n + q];
                    a[i * n + p] = c * aip + s * aiq;
                    a[i * n + q] = -std::conj(s) * aip + c * aiq;
                    const cplx uip = u[i * n + p];
                    const cplx uiq = u[i * n + q];
                    u[i * n + p] = c * uip + s * uiq;
                    u[i * n + q] = -std::conj(s) * uip + c * uiq;
                }
                // Rows: row_p' = c row_p + conj(s) row_q ; row_q' = -s row_p + c row_q.
                for (std::size_t j = 0; j < n; ++j) {
                    const cplx apj = a[p * n + j];
                    const cplx aqj = a[q * n + j];
                    a[p * n + j] = c * apj + std::conj(s) * aqj;
                    a[q * n + j] = -s * apj + c * aqj;
                }
                a[p * n + q] = a[q * n + p] = 0.0;
                a[p * n + p] = cplx(a[p * n + p].real(), 0.0);
                a[q * n + q] = cplx(a[q * n + q].real(), 0.0);
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a[i * n + i].real() < a[j * n + j].real();
    });
    SpectralDecomposition ed;
    ed.eigenvalues.resize(n);
    ed.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        ed.eigenvalues[k] = a[order[k] * n + order[k]].real();
        for (std::size_t i = 0; i < n; ++i) {
            ed.eigenvectors(i, k) = u[i * n + order[k]];
        }
    }
    return ed;
}

double offdiag_norm_real(const std::vector<double>& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            s += 2.0 * a[p * n + q] * a[p * n + q];
        }
    }
    return std::sqrt(s);
}

// Real-symmetric fast path; roughly 4x the throughput of the complex sweep.
SpectralDecomposition jacobi_real(std::vector<double> a, std::size_t n) {
    std::vector<double> u(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        u[i * n + i] = 1.0;
    }
    double scale = 0.0;
    for (double e : a) {
        scale = std::max(scale, std::abs(e));
    }
    if (scale == 0.0) {
        scale = 1.0;
    }
    const double stop = 1e-15 * scale * static_cast<double>(n);
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        if (offdiag_norm_real(a, n) <= stop) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                if (std::abs(apq) <= 1e-300) {
                    a[p * n + q] = a[q * n + p] = 0.0;
                    continue;
                }
                const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                const double root = std::hypot(tau, 1.0);
                const double t = tau >= 0.0 ? 1.0 / (tau + root) : -1.0 / (-tau + root);
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a[i * n + p];
                    const double aiq = a[i * n + q];
                    a[i * n + p] = c * aip - s * aiq;
                    a[i * n + q] = s * aip + c * aiq;
                    const double uip = u[i * n + p];
                    const double uiq = u[i * n + q];
                    u[i * n + p] = c * uip - s * uiq;
                    u[i * n + q] = s * uip + c * uiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a[p * n + j];
                    const double aqj = a[q * n + j];
                    a[p * n + j] = c * apj - s * aqj;
                    a[q * n + j] = s * apj + c * aqj;
                }
                a[p * n + q] = a[q * n + p] = 0.0;
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return a[i * n + i] < a[j * n + j];
    });
    SpectralDecomposition ed;
    ed.eigenvalues.resize(n);
    ed.eigenvectors = ComplexMatrix(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        ed.eigenvalues[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) {
            ed.eigenvectors(i, k) = u[i * n + order[k]];
        }
    }
    return ed;
}

} // namespace

SpectralDecomposition eig_hermitian(const HermitianOperator& a) {
    const std::size_t n = a.dimension();
    const auto& m = a.matrix();
    bool real_valued = true;
    for (const auto& e : m.entries()) {
        if (e.imag() != 0.0) {
            real_valued = false;
            break;
        }
    }
    if (real_valued) {
        std::vector<double> re(n * n);
        for (std::size_t i = 0; i < n * n; ++i) {
            re[i] = m.entries()[i].real();
        }
        return jacobi_real(std::move(re), n);
    }
    return jacobi_complex(m.entries(), n);
}

ComplexMatrix expm_spectral(const SpectralDecomposition& ed, cplx z) {
    const std::size_t n = ed.eigenvalues.size();
    const ComplexMatrix& u = ed.eigenvectors;
    ComplexMatrix scaled_adj(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ek = std::exp(z * ed.eigenvalues[k]);
        for (std::size_t j = 0; j < n; ++j) {
            scaled_adj(k, j) = ek * std::conj(u(j, k));
        }
    }
    return u * scaled_adj;
}

ComplexMatrix expm_spectral(const HermitianOperator& a, cplx z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("expm_spectral: z must be finite");
    }
    return expm_spectral(eig_hermitian(a), z);
}

std::vector<cplx> expm_spectral_apply(const SpectralDecomposition& ed, cplx z,
                                      std::span<const cplx> v) {
    const std::size_t n = ed.eigenvalues.size();
    if (v.size() != n) {
        throw std::invalid_argument("expm_spectral_apply: length mismatch");
    }
    const ComplexMatrix& u = ed.eigenvectors;
    std::vector<cplx> coeff(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            acc += std::conj(u(i, k)) * v[i];
        }
        coeff[k] = acc * std::exp(z * ed.eigenvalues[k]);
    }
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            acc += u(i, k) * coeff[k];
        }
        out[i] = acc;
    }
    return out;
}

ComplexMatrix expm_general(const ComplexMatrix& a, double t) {
    if (!a.square()) {
        throw std::invalid_argument("expm_general: matrix must be square");
    }
    if (!a.all_finite() || !std::isfinite(t)) {
        throw std::invalid_argument("expm_general: non-finite input");
    }
    const std::size_t n = a.rows();
    ComplexMatrix m = a.scaled(t);
    const double norm = m.one_norm();
    if (!std::isfinite(norm)) {
        throw std::overflow_error("expm_general: scaled norm is not finite");
    }
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        if (squarings > 60) {
            std::ostringstream msg;
            msg << "expm_general: norm estimate " << norm << " requires " << squarings
                << " squarings, beyond the supported range";
            throw std::overflow_error(msg.str());
        }
        m = m.scaled(std::pow(2.0, -squarings));
    }
    // Taylor the scaled matrix (one-norm <= 1/2); 24 terms reach machine precision.
    ComplexMatrix result = ComplexMatrix::identity(n);
    ComplexMatrix term = ComplexMatrix::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = term * m;
        term = term.scaled(1.0 / static_cast<double>(k));
        result = result + term;
        if (term.max_abs() < 1e-18 * std::max(1.0, result.max_abs())) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        result = result * result;
    }
    if (!result.all_finite()) {
        throw std::runtime_error("expm_general: non-finite result");
    }
    return result;
}

} // namespace pathlab
