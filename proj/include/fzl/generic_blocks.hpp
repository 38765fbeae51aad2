#ifndef FZL_GENERIC_BLOCKS_HPP
#define FZL_GENERIC_BLOCKS_HPP

#include <string>
#include <vector>

#include "fzl/functionals.hpp"
#include "fzl/operators.hpp"

namespace fzl {

struct BracketProbe {
    const ScalarField& g;
    const ScalarField& h;
    const ParticleEnsemble& e;
    const KernelSet& k;
};

// <M(f)g, h> = 1/2 sum_{i != j} w_i w_j kappa grad~ g . grad~ h
double M_form(const BracketProbe& p, const ParallelSpec& par = {});

// <L(f)g, h> = sum_i w_i grad h . J grad g, J = [[0, I], [-I, 0]]
double L_form(const BracketProbe& p);

// L pairing against the entropy differential. scores must hold the exact
// gradient of the particle entropy sum (symmetrized_scores); the weighted
// score field then sums to zero and the pairing vanishes identically for
// every probe with constant gradient.
double L_form_entropy(const ScalarField& h, const ParticleEnsemble& e,
                      const BlobEval& scores);

// <M(f) dS, dS> with dS = -(log f + 1); nonnegative by construction.
double entropy_production(const ParticleEnsemble& e, const KernelSet& k,
                          const BlobEval& blob, const ParallelSpec& par = {});

struct GenericRhs {
    std::vector<double> position_part; // L dE: free transport
    std::vector<double> velocity_part; // M dS: collision drift
};

// Assembles d/dt z = L dE + M dS through the operators-module fields.
GenericRhs generic_rhs(const ParticleEnsemble& e, const KernelSet& k,
                       const ParallelSpec& par = {});

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double scale = 1.0;
    double tolerance = 0.0; // absolute: tol * scale
    bool pass = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass = true;

    void add(std::string name, double residual, double scale, double tol);
};

// Degeneracy / symmetry / sign verification of the building blocks against a
// probe family. tol is relative; every check compares against tol * scale
// with the scale of the corresponding pairing family.
VerifyReport verify_generic(const ParticleEnsemble& e, const KernelSet& k,
                            const std::vector<ScalarField>& probes, double tol,
                            const ParallelSpec& par = {});

} // namespace fzl

#endif
