#include "slelax/driving.hpp"

#include <cmath>

#include "slelax/rng.hpp"

namespace slelax {

void DrivingSpec::validate() const {
    if (!(dt > 0.0))
        throw InvalidSpec("dt must be positive");
    if (!(T > 0.0))
        throw InvalidSpec("T must be positive");
    if (kappa < 0.0)
        throw InvalidSpec("kappa must be nonnegative");
    if (kind == DrivingKind::SleKappaRho && xi0 == 0.0)
        throw InvalidSpec("force point xi0 must be nonzero");
    if (kind == DrivingKind::Table && samples.empty())
        throw InvalidSpec("table driving needs samples");
}

DrivingPath sample_driving(const DrivingSpec& spec) {
    spec.validate();
    DrivingPath p;
    p.dt = spec.dt;
    p.kappa = spec.kappa;

    std::size_t n = static_cast<std::size_t>(std::llround(spec.T / spec.dt));
    if (n == 0)
        n = 1;
    if (spec.kind == DrivingKind::Table)
        n = spec.samples.size() - 1;

    p.t.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k)
        p.t[k] = static_cast<double>(k) * spec.dt;

    switch (spec.kind) {
    case DrivingKind::Zero:
        p.Z.assign(n + 1, 0.0);
        p.B.assign(n + 1, 0.0);
        break;
    case DrivingKind::Table:
        p.Z = spec.samples;
        p.B.assign(n + 1, 0.0);
        break;
    case DrivingKind::Brownian: {
        p.B = brownian_bridge_path(spec.seed, spec.dt, n);
        double sk = std::sqrt(spec.kappa);
        p.Z.resize(n + 1);
        for (std::size_t k = 0; k <= n; ++k)
            p.Z[k] = sk * p.B[k];
        break;
    }
    case DrivingKind::SleKappaRho: {
        p.B = brownian_bridge_path(spec.seed, spec.dt, n);
        double sk = std::sqrt(spec.kappa);
        p.Z.resize(n + 1);
        p.Xi.resize(n + 1);
        p.Z[0] = 0.0;
        p.Xi[0] = spec.xi0;
        // Joint Euler-Maruyama: dXi = -rho dt / (Xi - Z), dZ = sqrt(kappa) dB + dXi.
        const double guard = 1e-9 * std::max(1.0, std::abs(spec.xi0));
        const double gap_sign = spec.xi0 > 0.0 ? 1.0 : -1.0;
        std::size_t k = 0;
        for (; k < n; ++k) {
            double gap = p.Xi[k] - p.Z[k];
            // the gap evolves as -2 dB for rho = -2 and can cross zero
            // between grid points; a sign change is a threshold hit
            if (std::abs(gap) < guard || gap * gap_sign <= 0.0) {
                p.hit_continuation_threshold = true;
                break;
            }
            double dXi = -spec.rho * spec.dt / gap;
            p.Xi[k + 1] = p.Xi[k] + dXi;
            p.Z[k + 1] = p.Z[k] + sk * (p.B[k + 1] - p.B[k]) + dXi;
        }
        if (p.hit_continuation_threshold) {
            p.t.resize(k + 1);
            p.Z.resize(k + 1);
            p.B.resize(k + 1);
            p.Xi.resize(k + 1);
        }
        break;
    }
    }
    return p;
}

} // namespace slelax
