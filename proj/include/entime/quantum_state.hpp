#pragma once

// State vectors and density matrices: entropy, partial trace, Schmidt
// decomposition, and the bipartite entropy pair.

#include "entime/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace entime {
namespace qs {

// Entropies are reported in nats throughout; this is the one conversion.
inline double nats_to_bits(double s_nats) { return s_nats / std::log(2.0); }

// ---------- states ----------

class PureState {
public:
    PureState(Vector v, la::CompositeIndex space)
        : space_(std::move(space)) {
        if (v.size() != space_.flat_dim())
            throw std::invalid_argument("PureState: vector/space dimension mismatch");
        double n = v.norm();
        if (n < 1e-6)
            throw std::invalid_argument("PureState: norm below 1e-6, not normalizable");
        vector_ = v / n;
    }

    // Single-factor space convenience.
    explicit PureState(Vector v)
        : PureState(std::move(v), la::CompositeIndex({static_cast<int>(v.size())})) {}

    const Vector& vector() const { return vector_; }
    const la::CompositeIndex& space() const { return space_; }
    int dim() const { return space_.flat_dim(); }

private:
    Vector vector_;
    la::CompositeIndex space_;
};

class DensityMatrix {
public:
    DensityMatrix(Matrix m, la::CompositeIndex space)
        : matrix_(std::move(m)), space_(std::move(space)) {
        if (matrix_.rows() != space_.flat_dim() || matrix_.cols() != space_.flat_dim())
            throw std::invalid_argument("DensityMatrix: matrix/space dimension mismatch");
        if (la::hermitian_deviation(matrix_) > 1e-9)
            throw std::invalid_argument("DensityMatrix: NotHermitian");
        if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > 1e-9)
            throw std::invalid_argument("DensityMatrix: trace deviates from 1");
        // Positive semi-definite up to eigensolver noise.
        Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (matrix_ + matrix_.adjoint()));
        if (solver.info() != Eigen::Success)
            throw std::runtime_error("DensityMatrix: ConvergenceFailure");
        eigenvalues_ = solver.eigenvalues();
        if (eigenvalues_.minCoeff() < -1e-9)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue "
                + std::to_string(eigenvalues_.minCoeff()));
    }

    explicit DensityMatrix(Matrix m)
        : DensityMatrix(std::move(m), la::CompositeIndex({static_cast<int>(m.rows())})) {}

    const Matrix& matrix() const { return matrix_; }
    const la::CompositeIndex& space() const { return space_; }
    int dim() const { return space_.flat_dim(); }
    const RealVector& eigenvalues() const { return eigenvalues_; }

private:
    Matrix matrix_;
    la::CompositeIndex space_;
    RealVector eigenvalues_;  // cached from the invariant check
};

struct MixedEnsemble {
    std::vector<double> probabilities;
    std::vector<PureState> states;
};

struct SchmidtDecomposition {
    std::vector<double> coefficients;      // nonnegative, descending
    std::vector<Vector> left_vectors;      // orthonormal
    std::vector<Vector> right_vectors;     // orthonormal
};

// ---------- densities ----------

inline DensityMatrix density_from_pure(const PureState& s) {
    Matrix rho = s.vector() * s.vector().adjoint();
    return DensityMatrix(std::move(rho), s.space());
}

inline DensityMatrix density_from_ensemble(const MixedEnsemble& e) {
    if (e.probabilities.size() != e.states.size() || e.states.empty())
        throw std::invalid_argument("density_from_ensemble: ragged ensemble");
    double total = 0.0;
    for (double p : e.probabilities) {
        if (p < 0.0)
            throw std::invalid_argument("density_from_ensemble: ProbabilityNotNormalized (negative p)");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument("density_from_ensemble: ProbabilityNotNormalized (sum "
            + std::to_string(total) + ")");
    const int d = e.states.front().dim();
    Matrix rho = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < e.states.size(); ++k) {
        if (e.states[k].dim() != d)
            throw std::invalid_argument("density_from_ensemble: mixed dimensions");
        rho += e.probabilities[k] * (e.states[k].vector() * e.states[k].vector().adjoint());
    }
    return DensityMatrix(std::move(rho), e.states.front().space());
}

// ---------- entropy ----------

// S = -sum_k lambda_k ln lambda_k, 0 ln 0 = 0; eigenvalues in [-1e-9, 0)
// are clipped to 0 before the log.
inline double von_neumann_entropy(const DensityMatrix& rho) {
    double s = 0.0;
    for (int k = 0; k < rho.eigenvalues().size(); ++k) {
        double lam = rho.eigenvalues()[k];
        if (lam < -1e-9)
            throw std::invalid_argument("von_neumann_entropy: NegativeEigenvalueBeyondTolerance");
        if (lam <= 0.0) continue;
        s -= lam * std::log(lam);
    }
    // Rounding can push the top eigenvalue a hair above 1, leaving s near
    // -1e-16; entropy is nonnegative, so flush that residue to zero.
    return s < 0.0 ? 0.0 : s;
}

// ---------- partial trace ----------

// keep lists factor positions to retain, ascending; everything else is
// summed out by the explicit index sum.
inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& keep) {
    const la::CompositeIndex& space = rho.space();
    if (space.factors() < 2)
        throw std::invalid_argument("partial_trace: BadSelector (single factor)");
    std::vector<char> kept(space.factors(), 0);
    for (int m : keep) {
        if (m < 0 || m >= space.factors())
            throw std::invalid_argument("partial_trace: BadSelector (factor out of range)");
        if (kept[m])
            throw std::invalid_argument("partial_trace: BadSelector (repeated factor)");
        kept[m] = 1;
    }
    if (keep.empty() || static_cast<int>(keep.size()) == space.factors())
        throw std::invalid_argument("partial_trace: BadSelector (nothing to trace)");
    if (!std::is_sorted(keep.begin(), keep.end()))
        throw std::invalid_argument("partial_trace: BadSelector (selector not ascending)");

    std::vector<int> kept_dims;
    for (int m : keep) kept_dims.push_back(space.dim(m));
    la::CompositeIndex out_space(kept_dims);
    const int d_out = out_space.flat_dim();
    Matrix out = Matrix::Zero(d_out, d_out);

    const int d = space.flat_dim();
    for (int r = 0; r < d; ++r) {
        std::vector<int> ri = space.unflatten(r);
        for (int c = 0; c < d; ++c) {
            std::vector<int> ci = space.unflatten(c);
            bool traced_match = true;
            for (int m = 0; m < space.factors(); ++m)
                if (!kept[m] && ri[m] != ci[m]) { traced_match = false; break; }
            if (!traced_match) continue;
            std::vector<int> ro, co;
            for (int m : keep) { ro.push_back(ri[m]); co.push_back(ci[m]); }
            out(out_space.flatten(ro), out_space.flatten(co)) += rho.matrix()(r, c);
        }
    }
    return DensityMatrix(std::move(out), std::move(out_space));
}

// ---------- Schmidt decomposition ----------

// split = number of leading factors forming the left side.
inline SchmidtDecomposition schmidt(const PureState& s, int split) {
    const la::CompositeIndex& space = s.space();
    if (split < 1 || split >= space.factors())
        throw std::invalid_argument("schmidt: NotBipartite (bad split)");
    int d_left = 1, d_right = 1;
    for (int m = 0; m < split; ++m) d_left *= space.dim(m);
    for (int m = split; m < space.factors(); ++m) d_right *= space.dim(m);

    // Amplitude matrix A[i][j] = a_(i,j), left index slowest.
    Matrix a(d_left, d_right);
    for (int i = 0; i < d_left; ++i)
        for (int j = 0; j < d_right; ++j)
            a(i, j) = s.vector()[i * d_right + j];

    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtDecomposition out;
    const int rank = static_cast<int>(svd.singularValues().size());
    for (int k = 0; k < rank; ++k) {
        out.coefficients.push_back(svd.singularValues()[k]);
        out.left_vectors.push_back(svd.matrixU().col(k));
        out.right_vectors.push_back(svd.matrixV().col(k).conjugate());
    }
    return out;
}

// ---------- bipartite entropy pair ----------

// Two independent partial-trace paths; for any bipartite pure state the
// two marginals share a spectrum, so the values must coincide.
inline std::pair<double, double> entanglement_entropy_pair(const PureState& s, int split) {
    const la::CompositeIndex& space = s.space();
    if (split < 1 || split >= space.factors())
        throw std::invalid_argument("entanglement_entropy_pair: NotBipartite (bad split)");
    std::vector<int> left, right;
    for (int m = 0; m < split; ++m) left.push_back(m);
    for (int m = split; m < space.factors(); ++m) right.push_back(m);
    DensityMatrix rho = density_from_pure(s);
    double s_left = von_neumann_entropy(partial_trace(rho, left));
    double s_right = von_neumann_entropy(partial_trace(rho, right));
    return {s_left, s_right};
}

}  // namespace qs
}  // namespace entime
