#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/KroneckerProduct>

#include "openrabi/errors.hpp"

namespace openrabi {

using Complex = std::complex<double>;
using SpMat = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;
using Triplet = Eigen::Triplet<Complex>;

// Composite Hilbert space of a two-level atom and a Fock-truncated cavity
// mode. Basis ordering is atom-major and fixed: |s,k> maps to index
// s*(n_max+1) + k with s = 0 for |g>, s = 1 for |e>, k = 0..n_max.
class TruncatedSpace {
  public:
    explicit TruncatedSpace(int n_max) : n_max_(n_max) {
        if (n_max < 1)
            throw InvalidParams(
                "n_max must be >= 1: the pair-creation physics needs at "
                "least |g,0> <-> |e,1>");
    }

    int n_max() const { return n_max_; }
    int dim_field() const { return n_max_ + 1; }
    int dim_total() const { return 2 * dim_field(); }
    int index(int atom, int fock) const { return atom * dim_field() + fock; }

    friend bool operator==(const TruncatedSpace& a, const TruncatedSpace& b) {
        return a.n_max_ == b.n_max_;
    }

  private:
    int n_max_;
};

inline TruncatedSpace build_space(int n_max) { return TruncatedSpace(n_max); }

// A sparse complex matrix acting on a TruncatedSpace.
struct Operator {
    TruncatedSpace space;
    SpMat mat;

    Operator(TruncatedSpace s, SpMat m) : space(s), mat(std::move(m)) {
        if (mat.rows() != space.dim_total() || mat.cols() != space.dim_total())
            throw DimensionMismatch("operator matrix does not match its space");
    }

    Operator adjoint() const { return Operator(space, SpMat(mat.adjoint())); }
    DenseMatrix dense() const { return DenseMatrix(mat); }
};

inline void require_same_space(const TruncatedSpace& a, const TruncatedSpace& b) {
    if (!(a == b)) throw DimensionMismatch("operands live on different spaces");
}

inline Operator operator+(const Operator& a, const Operator& b) {
    require_same_space(a.space, b.space);
    return Operator(a.space, SpMat(a.mat + b.mat));
}

inline Operator operator-(const Operator& a, const Operator& b) {
    require_same_space(a.space, b.space);
    return Operator(a.space, SpMat(a.mat - b.mat));
}

inline Operator operator*(const Operator& a, const Operator& b) {
    require_same_space(a.space, b.space);
    return Operator(a.space, SpMat(a.mat * b.mat));
}

inline Operator operator*(Complex c, const Operator& a) {
    return Operator(a.space, SpMat(c * a.mat));
}

inline Operator operator*(double c, const Operator& a) {
    return Complex(c, 0.0) * a;
}

enum class FieldOp { Lower, Raise, Number, X, P };
enum class AtomOp { Raise, Lower, X, Y, Z };

namespace detail {

// 2x2 atomic matrices in the (g, e) ordering of the atom factor.
inline Eigen::Matrix2cd atom_matrix(AtomOp which) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    const Complex i(0.0, 1.0);
    switch (which) {
        case AtomOp::Raise: m(1, 0) = 1.0; break;           // |e><g|
        case AtomOp::Lower: m(0, 1) = 1.0; break;           // |g><e|
        case AtomOp::X: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case AtomOp::Y: m(0, 1) = i; m(1, 0) = -i; break;   // -i(s+ - s-)
        case AtomOp::Z: m(0, 0) = -1.0; m(1, 1) = 1.0; break;
    }
    return m;
}

inline SpMat field_lowering(int dim_field) {
    std::vector<Triplet> trips;
    trips.reserve(dim_field - 1);
    for (int k = 1; k < dim_field; ++k)
        trips.emplace_back(k - 1, k, Complex(std::sqrt(double(k)), 0.0));
    SpMat a(dim_field, dim_field);
    a.setFromTriplets(trips.begin(), trips.end());
    return a;
}

}  // namespace detail

// Kronecker composition under the documented atom-major ordering: the atom
// factor is the slow (left) index.
inline Operator compose(const TruncatedSpace& space, const Eigen::Matrix2cd& atom_part,
                        const SpMat& field_part) {
    if (field_part.rows() != space.dim_field() || field_part.cols() != space.dim_field())
        throw DimensionMismatch("field factor does not match the space");
    SpMat atom_sparse = atom_part.sparseView();
    SpMat out = Eigen::kroneckerProduct(atom_sparse, field_part);
    return Operator(space, std::move(out));
}

inline Operator identity_operator(const TruncatedSpace& space) {
    SpMat id(space.dim_total(), space.dim_total());
    id.setIdentity();
    return Operator(space, std::move(id));
}

inline Operator field_operator(const TruncatedSpace& space, FieldOp which) {
    const SpMat a = detail::field_lowering(space.dim_field());
    const Eigen::Matrix2cd id2 = Eigen::Matrix2cd::Identity();
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (which) {
        case FieldOp::Lower: return compose(space, id2, a);
        case FieldOp::Raise: return compose(space, id2, SpMat(a.adjoint()));
        case FieldOp::Number: return compose(space, id2, SpMat(SpMat(a.adjoint()) * a));
        case FieldOp::X:
            return compose(space, id2, SpMat(inv_sqrt2 * (a + SpMat(a.adjoint()))));
        case FieldOp::P:
            return compose(space, id2,
                           SpMat(Complex(0.0, -inv_sqrt2) * (a - SpMat(a.adjoint()))));
    }
    throw InvalidParams("unknown field operator");
}

inline Operator atom_operator(const TruncatedSpace& space, AtomOp which) {
    SpMat id_field(space.dim_field(), space.dim_field());
    id_field.setIdentity();
    return compose(space, detail::atom_matrix(which), id_field);
}

// Hermitian, unit-trace, positive-semidefinite state on a TruncatedSpace.
// Stored dense: the spaces in play are small and dense storage keeps the
// eigenvalue checks simple.
class DensityMatrix {
  public:
    DensityMatrix(TruncatedSpace space, DenseMatrix entries)
        : space_(space), rho_(std::move(entries)) {
        if (rho_.rows() != space_.dim_total() || rho_.cols() != space_.dim_total())
            throw DimensionMismatch("density matrix does not match its space");
    }

    static DensityMatrix pure(const TruncatedSpace& space, int atom, int fock) {
        if (atom < 0 || atom > 1 || fock < 0 || fock > space.n_max())
            throw InvalidParams("basis state outside the truncated space");
        DenseMatrix m = DenseMatrix::Zero(space.dim_total(), space.dim_total());
        const int idx = space.index(atom, fock);
        m(idx, idx) = 1.0;
        return DensityMatrix(space, std::move(m));
    }

    // Thermal field at occupation n_t, atom in its ground state.
    static DensityMatrix thermal_field_atom_ground(const TruncatedSpace& space, double n_t) {
        if (n_t < 0.0) throw InvalidParams("n_t must be >= 0");
        DenseMatrix m = DenseMatrix::Zero(space.dim_total(), space.dim_total());
        double norm = 0.0;
        std::vector<double> pk(space.dim_field());
        const double q = (n_t > 0.0) ? n_t / (n_t + 1.0) : 0.0;
        double p = 1.0;
        for (int k = 0; k < space.dim_field(); ++k) {
            pk[k] = p;
            norm += p;
            p *= q;
        }
        for (int k = 0; k < space.dim_field(); ++k) {
            const int idx = space.index(0, k);
            m(idx, idx) = pk[k] / norm;
        }
        return DensityMatrix(space, std::move(m));
    }

    const TruncatedSpace& space() const { return space_; }
    const DenseMatrix& matrix() const { return rho_; }
    DenseMatrix& matrix() { return rho_; }

    double trace() const { return rho_.trace().real(); }

    double hermiticity_error() const {
        return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    }

    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (rho_ + rho_.adjoint()),
                                                      Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    // Population of the two highest Fock levels, summed over atom states.
    double tail_population() const {
        double tail = 0.0;
        for (int s = 0; s < 2; ++s)
            for (int k = space_.n_max() - 1; k <= space_.n_max(); ++k)
                tail += rho_(space_.index(s, k), space_.index(s, k)).real();
        return tail;
    }

    void normalize() { rho_ /= rho_.trace().real(); }

    void validate(double herm_tol = 1e-12, double trace_tol = 1e-10,
                  double eig_tol = 1e-8) const {
        const double h = hermiticity_error();
        if (h > herm_tol)
            throw StateInvariantViolation("density matrix hermiticity error " +
                                          std::to_string(h));
        const double t = std::abs(trace() - 1.0);
        if (t > trace_tol)
            throw StateInvariantViolation("density matrix trace error " + std::to_string(t));
        const double e = min_eigenvalue();
        if (e < -eig_tol)
            throw StateInvariantViolation("density matrix minimum eigenvalue " +
                                          std::to_string(e));
    }

  private:
    TruncatedSpace space_;
    DenseMatrix rho_;
};

// Tr(rho * op). Imaginary part is reported so callers can assert it away
// for Hermitian observables.
inline Complex expectation(const DensityMatrix& rho, const Operator& op) {
    require_same_space(rho.space(), op.space);
    Complex sum(0.0, 0.0);
    const DenseMatrix& r = rho.matrix();
    for (int outer = 0; outer < op.mat.outerSize(); ++outer)
        for (SpMat::InnerIterator it(op.mat, outer); it; ++it)
            sum += r(it.col(), it.row()) * it.value();
    return sum;
}

inline double expectation_real(const DensityMatrix& rho, const Operator& op) {
    return expectation(rho, op).real();
}

}  // namespace openrabi
