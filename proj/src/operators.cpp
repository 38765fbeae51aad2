#include "fzl/operators.hpp"

#include <cmath>
#include <stdexcept>

namespace fzl {

Vec fuzzy_gradient(const ScalarField& phi, const Vec& x, const Vec& v, const Vec& xs,
                   const Vec& vs, const KernelSet& k)
{
    const int d = k.domain.dim;
    Vec z = sub(v, vs, d);
    double z2 = norm2(z, d);
    Vec dg = sub(phi.grad_v(x, v), phi.grad_v(xs, vs), d);
    Vec proj = project_perp_apply(z, z2, dg, d, k.flip_projection);
    double a = k.interaction_weight(z);
    return scale(proj, std::sqrt(a), d);
}

double weak_divergence_pairing(const ScalarField& phi, const PairField& B,
                               const ParticleEnsemble& e, const KernelSet& k)
{
    const int d = e.dim();
    double s = 0.0;
    for (int i = 0; i < e.size(); ++i) {
        Vec xi = e.position(i), vi = e.velocity(i);
        for (int j = 0; j < e.size(); ++j) {
            if (j == i) continue;
            Vec xj = e.position(j), vj = e.velocity(j);
            Vec g = fuzzy_gradient(phi, xi, vi, xj, vj, k);
            s += e.weight(i) * e.weight(j) * dot(g, B(xi, vi, xj, vj), d);
        }
    }
    return s;
}

namespace {

struct FieldSweep {
    const ParticleEnsemble& e;
    const KernelSet& k;

    // per-pair kernel pieces shared by collision-type fields
    struct PairGeom {
        Vec z = zero_vec();
        double z2 = 0.0;
        double kappa = 0.0;
        double a = 0.0;
    };

    PairGeom geom(int i, int j) const
    {
        const int d = e.dim();
        PairGeom g;
        g.z = sub(e.velocity(i), e.velocity(j), d);
        g.z2 = norm2(g.z, d);
        g.kappa = k.spatial_weight(sub(e.position(i), e.position(j), d));
        g.a = k.interaction_weight(g.z);
        return g;
    }
};

} // namespace

namespace {

template <int D, bool Torus, bool WithDissipation>
void collision_sweep(const ParticleEnsemble& e, const PairKernels& pk, bool flip,
                     const double* sv, const ParallelSpec& par,
                     std::vector<std::vector<double>>& scratch,
                     std::vector<double>* diss_partial)
{
    const int n = e.size();
    const double* xs = e.xs().data();
    const double* vs = e.vs().data();
    const double* ws = e.ws().data();
    const double half = 0.5 * pk.side;

    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        auto& acc = scratch[c];
        double dacc = 0.0;
        double z[D], ds[D];
        for (int i = lo; i < hi; ++i) {
            const double* xi = xs + static_cast<std::size_t>(i) * D;
            const double* vi = vs + static_cast<std::size_t>(i) * D;
            const double* si = sv + static_cast<std::size_t>(i) * D;
            const double wi = ws[i];
            for (int j = i + 1; j < n; ++j) {
                const double* xj = xs + static_cast<std::size_t>(j) * D;
                const double* vj = vs + static_cast<std::size_t>(j) * D;
                const double* sj = sv + static_cast<std::size_t>(j) * D;
                double r2x = 0.0, z2 = 0.0, zds = 0.0;
                for (int kk = 0; kk < D; ++kk) {
                    double dxk = xi[kk] - xj[kk];
                    if (Torus) dxk = min_image_coord(dxk, half, pk.side);
                    r2x += dxk * dxk;
                    double zk = vi[kk] - vj[kk];
                    double dsk = si[kk] - sj[kk];
                    z[kk] = zk;
                    ds[kk] = dsk;
                    z2 += zk * zk;
                    zds += zk * dsk;
                }
                if (z2 == 0.0) continue;
                double fac = pk.kappa_r2(r2x) * pk.interaction_r2(z2);
                double cc = zds / z2;
                double* ai = acc.data() + static_cast<std::size_t>(i) * D;
                double* aj = acc.data() + static_cast<std::size_t>(j) * D;
                const double wj = ws[j];
                double p2 = 0.0;
                for (int kk = 0; kk < D; ++kk) {
                    double pr = flip ? ds[kk] + cc * z[kk] : ds[kk] - cc * z[kk];
                    double y = fac * pr;
                    if (WithDissipation) p2 += pr * pr;
                    ai[kk] -= wj * y;
                    aj[kk] += wi * y;
                }
                if (WithDissipation) dacc += wi * wj * fac * p2;
            }
        }
        if (WithDissipation) (*diss_partial)[c] = dacc;
    });
}

template <bool WithDissipation>
std::vector<double> collision_field(const ParticleEnsemble& e, const KernelSet& k,
                                    const BlobEval& blob, const ParallelSpec& par,
                                    double* dissipation_out)
{
    const int n = e.size();
    const int d = e.dim();
    if (n < 2) throw std::invalid_argument("landau_velocity_field needs N >= 2");
    const PairKernels pk(k);
    const double* sv = blob.score_v.data();
    const bool flip = k.flip_projection;

    const int chunks = chunk_count_for(n);
    std::vector<std::vector<double>> scratch(chunks);
    for (auto& s : scratch) s.assign(static_cast<std::size_t>(n) * d, 0.0);
    std::vector<double> diss(WithDissipation ? chunks : 0, 0.0);

    const bool torus = k.domain.is_torus();
    if (d == 2 && torus)
        collision_sweep<2, true, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);
    else if (d == 2)
        collision_sweep<2, false, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);
    else if (d == 3 && torus)
        collision_sweep<3, true, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);
    else if (d == 3)
        collision_sweep<3, false, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);
    else if (torus)
        collision_sweep<1, true, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);
    else
        collision_sweep<1, false, WithDissipation>(e, pk, flip, sv, par, scratch, &diss);

    std::vector<double> out(static_cast<std::size_t>(n) * d, 0.0);
    for (const auto& s : scratch)
        for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += s[idx];
    if (WithDissipation) *dissipation_out = merge_ordered(diss);
    return out;
}

} // namespace

std::vector<double> landau_velocity_field(const ParticleEnsemble& e, const KernelSet& k,
                                          const BlobEval& blob, const ParallelSpec& par)
{
    return collision_field<false>(e, k, blob, par, nullptr);
}

std::vector<double> landau_velocity_field_with_dissipation(const ParticleEnsemble& e,
                                                           const KernelSet& k,
                                                           const BlobEval& blob,
                                                           const ParallelSpec& par,
                                                           double& dissipation_out)
{
    return collision_field<true>(e, k, blob, par, &dissipation_out);
}

std::vector<double> landau_velocity_field(const ParticleEnsemble& e, const KernelSet& k,
                                          const ParallelSpec& par)
{
    BlobEval blob = reconstruct_at_particles(e, par);
    return landau_velocity_field(e, k, blob, par);
}

std::vector<double> transport_field(const ParticleEnsemble& e)
{
    return e.vs();
}

std::vector<double> grazing_divergence_field(const ParticleEnsemble& e,
                                             const GrazingRate& rate, const KernelSet& k,
                                             const BlobEval& blob, const ParallelSpec& par)
{
    if (rate.kind() == GrazingRate::Kind::LandauClosedForm)
        return landau_velocity_field(e, k, blob, par);

    const int n = e.size();
    const int d = e.dim();
    std::vector<double> out(static_cast<std::size_t>(n) * d, 0.0);
    if (rate.kind() == GrazingRate::Kind::Zero) return out;

    for (int i = 0; i < n; ++i) {
        double fi = blob.density[i];
        if (fi < 1e-300)
            throw std::runtime_error("reconstructed density underflow in grazing field");
    }

    FieldSweep sweep{e, k};
    PairContext ctx{e, blob, k};
    const double* ws = e.ws().data();
    const int chunks = chunk_count_for(n);
    std::vector<std::vector<double>> scratch(chunks);
    for (auto& s : scratch) s.assign(static_cast<std::size_t>(n) * d, 0.0);

    run_chunks(n, par.threads, [&](int c, int lo, int hi) {
        auto& acc = scratch[c];
        for (int i = lo; i < hi; ++i) {
            for (int j = i + 1; j < n; ++j) {
                auto g = sweep.geom(i, j);
                if (g.z2 == 0.0) continue;
                Vec dr = sub(rate.pair_rate(i, j, ctx), rate.pair_rate(j, i, ctx), d);
                Vec pr = project_perp_apply(g.z, g.z2, dr, d, k.flip_projection);
                double fac = 0.5 * std::sqrt(g.a);
                for (int kk = 0; kk < d; ++kk) {
                    double y = fac * pr[kk];
                    acc[static_cast<std::size_t>(i) * d + kk] += ws[j] * y;
                    acc[static_cast<std::size_t>(j) * d + kk] -= ws[i] * y;
                }
            }
        }
    });
    for (const auto& s : scratch)
        for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += s[idx];
    return out;
}

std::vector<double> grazing_divergence_field(const ParticleEnsemble& e,
                                             const GrazingRate& rate, const KernelSet& k,
                                             const ParallelSpec& par)
{
    BlobEval blob = reconstruct_at_particles(e, par);
    return grazing_divergence_field(e, rate, k, blob, par);
}

} // namespace fzl
