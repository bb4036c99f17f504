#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "openrabi/hilbert.hpp"
#include "openrabi/params.hpp"

namespace openrabi {

// The full generator of the master equation,
//   d rho/dt = -i[H, rho] + sum_k rate_k D[L_k] rho,
// with D[L] rho = (2 L rho L^+ - L^+L rho - rho L^+L)/2.
//
// Two redundant representations are kept: a matrix-free action on density
// matrices (used by the time integrator) and an explicit sparse matrix on
// column-stacked states (used by the steady-state linear solve). The two
// must agree elementwise; tests enforce it.
class Superoperator {
  public:
    struct Workspace {
        DenseMatrix t1, t2;
    };

    explicit Superoperator(TruncatedSpace space)
        : space_(space),
          hamiltonian_(space.dim_total(), space.dim_total()),
          matrix_(space.dim_total() * space.dim_total(),
                  space.dim_total() * space.dim_total()) {
        rebuild_matrix();
    }

    const TruncatedSpace& space() const { return space_; }

    void set_hamiltonian(const Operator& h) {
        require_same_space(space_, h.space);
        hamiltonian_ = h.mat;
        rebuild_matrix();
    }

    void add_collapse(const Operator& l, double rate) {
        require_same_space(space_, l.space);
        if (rate < 0.0) throw InvalidParams("dissipator rate must be >= 0");
        if (rate == 0.0) return;
        Term t;
        t.rate = rate;
        t.L = l.mat;
        t.Ldag = SpMat(l.mat.adjoint());
        t.LdagL = SpMat(t.Ldag * t.L);
        terms_.push_back(std::move(t));
        rebuild_matrix();
    }

    // Column-stacked sparse matrix, dim_total^2 x dim_total^2:
    // vec(A rho B) = (B^T (x) A) vec(rho).
    const SpMat& matrix() const { return matrix_; }

    const SpMat& hamiltonian_matrix() const { return hamiltonian_; }

    // Matrix-free action on a density matrix.
    void apply(const DenseMatrix& rho, DenseMatrix& out, Workspace& ws) const {
        const Complex minus_i(0.0, -1.0);
        ws.t1.noalias() = hamiltonian_ * rho;
        ws.t2.noalias() = rho * hamiltonian_;
        out = minus_i * (ws.t1 - ws.t2);
        for (const Term& t : terms_) {
            ws.t1.noalias() = t.L * rho;
            ws.t2.noalias() = ws.t1 * t.Ldag;
            out.noalias() += t.rate * ws.t2;
            ws.t1.noalias() = t.LdagL * rho;
            out.noalias() -= (0.5 * t.rate) * ws.t1;
            ws.t2.noalias() = rho * t.LdagL;
            out.noalias() -= (0.5 * t.rate) * ws.t2;
        }
    }

    DenseMatrix apply(const DenseMatrix& rho) const {
        Workspace ws;
        DenseMatrix out;
        apply(rho, out, ws);
        return out;
    }

    DenseMatrix apply(const DensityMatrix& rho) const { return apply(rho.matrix()); }

    // Parameters that produced this generator, when it came from assemble().
    const std::optional<SystemParams>& params() const { return params_; }
    const std::optional<ModelKind>& kind() const { return kind_; }
    void set_provenance(const SystemParams& p, ModelKind k) {
        params_ = p;
        kind_ = k;
    }

  private:
    struct Term {
        double rate;
        SpMat L, Ldag, LdagL;
    };

    void rebuild_matrix() {
        const int d = space_.dim_total();
        SpMat id(d, d);
        id.setIdentity();
        const Complex minus_i(0.0, -1.0);
        SpMat ht = hamiltonian_.transpose();
        matrix_ = SpMat(minus_i * (Eigen::kroneckerProduct(id, hamiltonian_) -
                                   Eigen::kroneckerProduct(ht, id)));
        for (const Term& t : terms_) {
            SpMat lconj = t.L.conjugate();
            SpMat mt = t.LdagL.transpose();
            matrix_ += SpMat(t.rate * (Eigen::kroneckerProduct(lconj, t.L) -
                                       0.5 * Eigen::kroneckerProduct(id, t.LdagL) -
                                       0.5 * Eigen::kroneckerProduct(mt, id)));
        }
        matrix_.makeCompressed();
    }

    TruncatedSpace space_;
    SpMat hamiltonian_;
    std::vector<Term> terms_;
    SpMat matrix_;
    std::optional<SystemParams> params_;
    std::optional<ModelKind> kind_;
};

// H = omega n + (omega0/2) sigma_z + g (a s+ + a^+ s-) [+ g (a^+ s+ + a s-)].
// The bracket is the counter-rotating term; JaynesCummings omits it.
inline Operator hamiltonian(const SystemParams& params, const TruncatedSpace& space,
                            ModelKind kind) {
    params.validate();
    const Operator a = field_operator(space, FieldOp::Lower);
    const Operator adag = field_operator(space, FieldOp::Raise);
    const Operator n = field_operator(space, FieldOp::Number);
    const Operator sp = atom_operator(space, AtomOp::Raise);
    const Operator sm = atom_operator(space, AtomOp::Lower);
    const Operator sz = atom_operator(space, AtomOp::Z);

    Operator h = params.omega * n + (0.5 * params.omega0) * sz +
                 params.g * (a * sp + adag * sm);
    if (kind == ModelKind::Rabi) h = h + params.g * (adag * sp + a * sm);
    return h;
}

// rate * D[L] as a standalone superoperator.
inline Superoperator dissipator(const Operator& l, double rate) {
    Superoperator s(l.space);
    s.add_collapse(l, rate);
    return s;
}

// The full generator of the master equation with the thermal, relaxation
// and dephasing channels:
//   gamma(n_t+1) D[s-] + gamma n_t D[s+] + kappa(n_t+1) D[a] + kappa n_t D[a^+]
//   + (gamma_ph/2) D[sigma_z] + (Gamma_ph/2) D[n].
inline Superoperator assemble(const SystemParams& params, const TruncatedSpace& space,
                              ModelKind kind) {
    params.validate();
    Superoperator gen(space);
    gen.set_hamiltonian(hamiltonian(params, space, kind));
    const Operator a = field_operator(space, FieldOp::Lower);
    const Operator adag = field_operator(space, FieldOp::Raise);
    const Operator n = field_operator(space, FieldOp::Number);
    const Operator sp = atom_operator(space, AtomOp::Raise);
    const Operator sm = atom_operator(space, AtomOp::Lower);
    const Operator sz = atom_operator(space, AtomOp::Z);

    gen.add_collapse(sm, params.gamma * (params.n_t + 1.0));
    gen.add_collapse(sp, params.gamma * params.n_t);
    gen.add_collapse(a, params.kappa * (params.n_t + 1.0));
    gen.add_collapse(adag, params.kappa * params.n_t);
    gen.add_collapse(sz, 0.5 * params.gamma_ph);
    gen.add_collapse(n, 0.5 * params.Gamma_ph);
    gen.set_provenance(params, kind);
    return gen;
}

}  // namespace openrabi
