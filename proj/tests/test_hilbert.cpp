#include "catch_amalgamated.hpp"

#include <random>

#include "openrabi/hilbert.hpp"
#include "test_support.hpp"

using namespace openrabi;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("truncated space dimensions and ordering") {
    CHECK(build_space(1).dim_total() == 4);
    CHECK(build_space(10).dim_total() == 22);
    CHECK(build_space(15).dim_field() == 16);
    CHECK_THROWS_AS(build_space(0), InvalidParams);

    const TruncatedSpace s(3);
    // atom-major: g-block first, then e-block
    CHECK(s.index(0, 0) == 0);
    CHECK(s.index(0, 3) == 3);
    CHECK(s.index(1, 0) == 4);
    CHECK(s.index(1, 3) == 7);
}

TEST_CASE("ladder operator matrix elements") {
    const TruncatedSpace s(6);
    const Operator a = field_operator(s, FieldOp::Lower);
    const DenseMatrix ad = a.dense();
    // <s,k-1| a |s,k> = sqrt(k), identity on the atom factor
    for (int atom = 0; atom < 2; ++atom)
        for (int k = 1; k <= 6; ++k)
            CHECK_THAT(ad(s.index(atom, k - 1), s.index(atom, k)).real(),
                       WithinRel(std::sqrt(double(k)), 1e-15));
    // a|g,1> -> |g,0> with amplitude 1
    CHECK_THAT(ad(s.index(0, 0), s.index(0, 1)).real(), WithinAbs(1.0, 1e-15));
    // only the k -> k-1 band is populated
    CHECK(a.mat.nonZeros() == 2 * 6);
}

TEST_CASE("number operator is diagonal and equals a^+ a") {
    const TruncatedSpace s(8);
    const Operator n = field_operator(s, FieldOp::Number);
    const Operator a = field_operator(s, FieldOp::Lower);
    const Operator prod = a.adjoint() * a;
    CHECK((n.dense() - prod.dense()).cwiseAbs().maxCoeff() < 1e-14);
    // n|e,3> has eigenvalue 3
    DenseMatrix nd = n.dense();
    CHECK_THAT(nd(s.index(1, 3), s.index(1, 3)).real(), WithinAbs(3.0, 1e-15));
}

TEST_CASE("[x,p] equals i except in the last Fock level") {
    const TruncatedSpace s(10);
    const Operator x = field_operator(s, FieldOp::X);
    const Operator p = field_operator(s, FieldOp::P);
    const DenseMatrix comm = (x * p - p * x).dense();
    // truncation picture: [x,p] = i [a,a^+] = i diag(1,...,1,-n_max) per
    // atom block
    DenseMatrix expected = DenseMatrix::Zero(s.dim_total(), s.dim_total());
    for (int atom = 0; atom < 2; ++atom) {
        for (int k = 0; k < s.n_max(); ++k)
            expected(s.index(atom, k), s.index(atom, k)) = Complex(0.0, 1.0);
        expected(s.index(atom, s.n_max()), s.index(atom, s.n_max())) =
            Complex(0.0, -double(s.n_max()));
    }
    CHECK((comm - expected).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("Pauli algebra is exact") {
    const TruncatedSpace s(5);
    const Operator sx = atom_operator(s, AtomOp::X);
    const Operator sy = atom_operator(s, AtomOp::Y);
    const Operator sz = atom_operator(s, AtomOp::Z);
    const Operator sp = atom_operator(s, AtomOp::Raise);
    const Operator sm = atom_operator(s, AtomOp::Lower);
    const Operator id = identity_operator(s);

    CHECK(((sx * sx).dense() - id.dense()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(((sx * sy - sy * sx).dense() - (2.0 * Complex(0.0, 1.0) * sz).dense())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK(((0.5 * (sx + Complex(0.0, 1.0) * sy)).dense() - sp.dense())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    CHECK((sm.dense() - sp.adjoint().dense()).cwiseAbs().maxCoeff() == 0.0);

    // sigma_z |g,0> = -|g,0>; sigma_+ |g,k> = |e,k> for every k
    const DenseMatrix szd = sz.dense();
    CHECK(szd(s.index(0, 0), s.index(0, 0)) == Complex(-1.0, 0.0));
    const DenseMatrix spd = sp.dense();
    for (int k = 0; k <= s.n_max(); ++k)
        CHECK(spd(s.index(1, k), s.index(0, k)) == Complex(1.0, 0.0));
}

TEST_CASE("composite operators factor as atom (x) field") {
    const TruncatedSpace s(4);
    std::mt19937_64 rng(7);
    const Eigen::Matrix2cd atom = testsupport::random_hermitian(2, rng);
    const DenseMatrix field = testsupport::random_hermitian(s.dim_field(), rng);
    const Operator composite = compose(s, atom, field.sparseView());
    const DenseMatrix dense = composite.dense();
    for (int sa = 0; sa < 2; ++sa)
        for (int sb = 0; sb < 2; ++sb)
            for (int ka = 0; ka < s.dim_field(); ++ka)
                for (int kb = 0; kb < s.dim_field(); ++kb)
                    CHECK_THAT(std::abs(dense(s.index(sa, ka), s.index(sb, kb)) -
                                        atom(sa, sb) * field(ka, kb)),
                               WithinAbs(0.0, 1e-14));
}

TEST_CASE("hermiticity of the named observables") {
    const TruncatedSpace s(6);
    for (FieldOp op : {FieldOp::Number, FieldOp::X, FieldOp::P}) {
        const Operator o = field_operator(s, op);
        CHECK((o.dense() - o.adjoint().dense()).cwiseAbs().maxCoeff() < 1e-15);
    }
    for (AtomOp op : {AtomOp::X, AtomOp::Y, AtomOp::Z}) {
        const Operator o = atom_operator(s, op);
        CHECK((o.dense() - o.adjoint().dense()).cwiseAbs().maxCoeff() == 0.0);
    }
    const Operator a = field_operator(s, FieldOp::Lower);
    const Operator adag = field_operator(s, FieldOp::Raise);
    CHECK((adag.dense() - a.adjoint().dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("expectation values against hand-computed states") {
    const TruncatedSpace s(8);
    const DensityMatrix vacuum = DensityMatrix::pure(s, 0, 0);
    const Operator n = field_operator(s, FieldOp::Number);
    CHECK_THAT(expectation_real(vacuum, n), WithinAbs(0.0, 1e-15));

    // closure anchors on |g,0>: <2 x^2 sz> = -1, <(xp+px) sz> = 0
    const Operator x = field_operator(s, FieldOp::X);
    const Operator p = field_operator(s, FieldOp::P);
    const Operator sz = atom_operator(s, AtomOp::Z);
    const Operator zeta_op = 2.0 * (x * x * sz);
    const Operator alpha_op = (x * p + p * x) * sz;
    CHECK_THAT(expectation_real(vacuum, zeta_op), WithinAbs(-1.0, 1e-14));
    CHECK_THAT(expectation_real(vacuum, alpha_op), WithinAbs(0.0, 1e-14));

    CHECK_THROWS_AS(expectation(vacuum, field_operator(TruncatedSpace(4), FieldOp::X)),
                    DimensionMismatch);
}

TEST_CASE("expectation of a Hermitian operator is real for any state") {
    const TruncatedSpace s(5);
    std::mt19937_64 rng(42);
    const Operator x_sy = field_operator(s, FieldOp::X) * atom_operator(s, AtomOp::Y);
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix rho = testsupport::random_density(s, rng);
        CHECK(std::abs(expectation(rho, x_sy).imag()) < 1e-10);
        CHECK(std::abs(expectation(rho, field_operator(s, FieldOp::Number)).imag()) <
              1e-10);
    }
}

TEST_CASE("density matrix invariants and factories") {
    const TruncatedSpace s(9);
    const DensityMatrix pure = DensityMatrix::pure(s, 1, 2);
    pure.validate();
    CHECK_THAT(pure.trace(), WithinAbs(1.0, 1e-15));
    CHECK(pure.min_eigenvalue() >= -1e-15);

    const double n_t = 0.1;
    const DensityMatrix thermal = DensityMatrix::thermal_field_atom_ground(s, n_t);
    thermal.validate();
    // truncated thermal mean, computed independently here
    double norm = 0.0, mean = 0.0;
    for (int k = 0; k <= s.n_max(); ++k) {
        const double pk = std::pow(n_t / (1.0 + n_t), k);
        norm += pk;
        mean += k * pk;
    }
    mean /= norm;
    CHECK_THAT(expectation_real(thermal, field_operator(s, FieldOp::Number)),
               WithinRel(mean, 1e-12));
    CHECK_THAT(expectation_real(thermal, atom_operator(s, AtomOp::Z)),
               WithinAbs(-1.0, 1e-14));

    CHECK_THROWS_AS(DensityMatrix::pure(s, 0, 99), InvalidParams);
}
