#ifndef FZL_ENSEMBLE_HPP
#define FZL_ENSEMBLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fzl/domain.hpp"
#include "fzl/kernels.hpp"
#include "fzl/parallel.hpp"
#include "fzl/quadrature.hpp"
#include "fzl/rng.hpp"
#include "fzl/vec.hpp"

namespace fzl {

struct MomentSpec {
    double a = 0.0; // spatial order
    double b = 0.0; // velocity order
};

// Weighted phase-space particles plus the mollifier widths that define the
// blob reconstruction f(x,v) = sum_i w_i M_alpha(x - x_i) M_beta(v - v_i).
// Weights are immutable after construction; dynamics moves only coordinates.
class ParticleEnsemble {
public:
    ParticleEnsemble() = default;
    ParticleEnsemble(Domain domain, double alpha, double beta,
                     std::vector<double> x, std::vector<double> v,
                     std::vector<double> w, bool uniform_x = false,
                     std::uint64_t seed = 0);

    int size() const { return n_; }
    int dim() const { return domain_.dim; }
    const Domain& domain() const { return domain_; }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }
    bool uniform_x() const { return uniform_x_; }
    std::uint64_t seed() const { return seed_; }

    const std::vector<double>& xs() const { return x_; }
    const std::vector<double>& vs() const { return v_; }
    const std::vector<double>& ws() const { return w_; }

    Vec position(int i) const;
    Vec velocity(int i) const;
    double weight(int i) const { return w_[i]; }

    // Replace coordinates (the integrator's update path). Torus positions are
    // wrapped; weights and widths are untouched.
    ParticleEnsemble with_state(std::vector<double> x, std::vector<double> v) const;

    // mollifier amplitudes of the reconstruction
    double x_amplitude() const { return x_amp_; }
    double v_amplitude() const { return v_amp_; }
    double x_mass_correction() const { return x_renorm_; }

    void check_invariants() const;

private:
    Domain domain_;
    double alpha_ = 1.0, beta_ = 1.0;
    bool uniform_x_ = false;
    std::uint64_t seed_ = 0;
    int n_ = 0;
    std::vector<double> x_, v_, w_;
    double x_amp_ = 1.0, v_amp_ = 1.0, x_renorm_ = 1.0;
    double mollifier_c_ = 1.0; // normalization constant of exp(-<z>) in this dim
};

// Plain bandwidth rule used when the configuration does not pin widths.
double default_width(int n, int d);

// Blob density and scores evaluated at every particle site in one symmetric
// sweep. score_* are the analytic gradients of log f at the sites.
struct BlobEval {
    std::vector<double> density; // N
    std::vector<double> score_x; // N*d
    std::vector<double> score_v; // N*d
};

BlobEval reconstruct_at_particles(const ParticleEnsemble& e, const ParallelSpec& par);

double density_at(const ParticleEnsemble& e, const Vec& x, const Vec& v);

// Two-term blob scores: the plain score at each site plus the contribution
// of the site's own motion inside every other reconstruction denominator.
// This is the exact phase-space gradient of sum_k w_k log f(z_k).
BlobEval symmetrized_scores(const ParticleEnsemble& e, const BlobEval& blob,
                            const ParallelSpec& par);

struct ScorePair {
    Vec x = zero_vec();
    Vec v = zero_vec();
};
ScorePair score_at(const ParticleEnsemble& e, const Vec& x, const Vec& v);

// sum_i w_i (<x_i>^a + <v_i>^b)
double moment(const ParticleEnsemble& e, const MomentSpec& spec);

struct VelocityGridSpec {
    Vec lo = zero_vec();
    Vec hi = zero_vec();
    int points_per_axis = 0;
};

// Quadrature estimate of | <v>^q f |_{L^p_v L^1_x}; the x integral of each
// blob is evaluated by quadrature and the v integral on the supplied grid.
double lp_profile(const ParticleEnsemble& e, double p, double weight_exponent,
                  const VelocityGridSpec& vgrid);

enum class EntropyMode { Particle, Grid };

struct EntropyPlan {
    EntropyMode mode = EntropyMode::Particle;
    // grid mode: velocity box half-width in units of max |v| + mollifier tails
    int points_per_axis = 96;
};

// H(f) = int f log f. Particle mode evaluates log f at the particle sites;
// grid mode is the d=2 tensor-quadrature oracle.
double entropy(const ParticleEnsemble& e, const EntropyPlan& plan = {},
               const ParallelSpec& par = {});

struct InitialCondition {
    enum class Kind { Maxwellian, AnisotropicGaussian, TwoBump, UniformXGaussianV };
    Kind kind = Kind::Maxwellian;
    double temperature = 1.0;
    Vec temperatures = {1.0, 1.0, 1.0}; // anisotropic-gaussian
    double bump_speed = 1.5;            // two-bump mean speed along axis 1
    double bump_temperature = 0.25;

    static InitialCondition parse(const std::string& name, double T);
};

ParticleEnsemble sample_initial(const InitialCondition& cond, int n, std::uint64_t seed,
                                const Domain& domain, double alpha, double beta,
                                bool uniform_x = false);

// Snapshot serialization: commented header carrying (N, d, domain, widths,
// seed) and one row per particle with 17 significant digits.
void write_snapshot(const std::string& path, const ParticleEnsemble& e);
ParticleEnsemble read_snapshot(const std::string& path);

} // namespace fzl

#endif
