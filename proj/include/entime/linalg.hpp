#pragma once

// Dense complex linear algebra substrate: Hermitian eigendecomposition,
// unitary propagators, Kronecker products and composite-index arithmetic.
// Internal units: hbar = 1, k_B = 1; all frequencies and energies dimensionless.

#include <Eigen/Dense>

#include <complex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace entime {

using Complex = std::complex<double>;
using Matrix  = Eigen::MatrixXcd;
using Vector  = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

namespace la {

// Composite systems never exceed desk scale.
inline constexpr int max_composite_dim = 4096;

// ---------- composite index arithmetic ----------

// Lexicographic flattening, leftmost factor slowest:
// flat = (((i_0 * d_1) + i_1) * d_2 + i_2) ...
class CompositeIndex {
public:
    explicit CompositeIndex(std::vector<int> factor_dims)
        : dims_(std::move(factor_dims)) {
        if (dims_.empty())
            throw std::invalid_argument("CompositeIndex: no factors");
        long long prod = 1;
        for (int d : dims_) {
            if (d <= 0)
                throw std::invalid_argument("CompositeIndex: nonpositive factor dim");
            prod *= d;
            if (prod > max_composite_dim)
                throw std::invalid_argument("CompositeIndex: DimensionOverflow ("
                    + std::to_string(prod) + " > " + std::to_string(max_composite_dim) + ")");
        }
        flat_dim_ = static_cast<int>(prod);
    }

    int flat_dim() const { return flat_dim_; }
    int factors() const { return static_cast<int>(dims_.size()); }
    int dim(int m) const { return dims_.at(m); }

    int flatten(const std::vector<int>& idx) const {
        if (static_cast<int>(idx.size()) != factors())
            throw std::invalid_argument("CompositeIndex::flatten: rank mismatch");
        int k = 0;
        for (int m = 0; m < factors(); ++m) {
            if (idx[m] < 0 || idx[m] >= dims_[m])
                throw std::out_of_range("CompositeIndex::flatten: index out of range");
            k = k * dims_[m] + idx[m];
        }
        return k;
    }

    std::vector<int> unflatten(int k) const {
        if (k < 0 || k >= flat_dim_)
            throw std::out_of_range("CompositeIndex::unflatten: index out of range");
        std::vector<int> idx(factors());
        for (int m = factors() - 1; m >= 0; --m) {
            idx[m] = k % dims_[m];
            k /= dims_[m];
        }
        return idx;
    }

private:
    std::vector<int> dims_;
    int flat_dim_ = 0;
};

// ---------- predicates ----------

inline double hermitian_deviation(const Matrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("hermitian_deviation: NonSquare");
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline void require_hermitian(const Matrix& m, const char* who,
                              double rel_tol = 1e-9) {
    if (m.rows() != m.cols())
        throw std::invalid_argument(std::string(who) + ": NonSquare");
    double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return;  // zero matrix is Hermitian
    if (hermitian_deviation(m) > rel_tol * scale)
        throw std::invalid_argument(std::string(who) + ": NotHermitian (deviation "
            + std::to_string(hermitian_deviation(m)) + ")");
}

// ---------- eigendecomposition ----------

struct HermitianEig {
    RealVector eigenvalues;  // ascending
    Matrix eigenvectors;     // columns, orthonormal
};

inline HermitianEig hermitian_eig(const Matrix& m) {
    require_hermitian(m, "hermitian_eig");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: ConvergenceFailure");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

// U(t) = exp(-i h t / hbar), hbar = 1, via eigendecomposition.
inline Matrix matrix_exponential_skew(const Matrix& h, double t) {
    HermitianEig eig = hermitian_eig(h);
    const int n = static_cast<int>(h.rows());
    Vector phases(n);
    for (int k = 0; k < n; ++k)
        phases[k] = std::exp(Complex(0.0, -eig.eigenvalues[k] * t));
    return eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint();
}

// ---------- Kronecker product ----------

// (a (x) b)[(i,k),(j,l)] = a[i][j] * b[k][l], leftmost factor slowest.
inline Matrix kron(const Matrix& a, const Matrix& b) {
    long long rows = static_cast<long long>(a.rows()) * b.rows();
    long long cols = static_cast<long long>(a.cols()) * b.cols();
    if (rows > max_composite_dim || cols > max_composite_dim)
        throw std::invalid_argument("kron: DimensionOverflow ("
            + std::to_string(std::max(rows, cols)) + " > "
            + std::to_string(max_composite_dim) + ")");
    Matrix c(rows, cols);
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return c;
}

inline Vector kron(const Vector& a, const Vector& b) {
    long long dim = static_cast<long long>(a.size()) * b.size();
    if (dim > max_composite_dim)
        throw std::invalid_argument("kron: DimensionOverflow ("
            + std::to_string(dim) + " > " + std::to_string(max_composite_dim) + ")");
    Vector c(dim);
    for (int i = 0; i < a.size(); ++i)
        c.segment(i * b.size(), b.size()) = a[i] * b;
    return c;
}

}  // namespace la
}  // namespace entime
