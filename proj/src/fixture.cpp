#include "bephase/fixture.hpp"

#include <cmath>

namespace bephase {

namespace {

std::vector<cplx> unit3(double x, double y, double z) {
    std::vector<cplx> v{x, y, z};
    vnormalize(v);
    return v;
}

}  // namespace

DensityOperator tiles_complement_state(const TilesAngles& t) {
    const double c1 = std::cos(t.b1), s1 = std::sin(t.b1);
    const double c2 = std::cos(t.b2), s2 = std::sin(t.b2);
    const double c3 = std::cos(t.a1), s3 = std::sin(t.a1);
    const double c4 = std::cos(t.a2), s4 = std::sin(t.a2);
    if (s1 * s2 * s3 * s4 * c1 * c2 * c3 * c4 == 0.0)
        throw InvalidParamsError("tiles angles must avoid multiples of pi/2");

    const auto e0 = unit3(1, 0, 0);
    const auto e2 = unit3(0, 0, 1);
    // strictly positive completions orthogonal to the two tilted vectors of each side
    const auto u = unit3(s3, c3, c3 * c4 / s4);
    const auto w = unit3(s1, c1, c1 * c2 / s2);

    const std::vector<std::vector<cplx>> products = {
        kron_vec(e0, unit3(c1, -s1, 0)),
        kron_vec(e2, unit3(0, c2, -s2)),
        kron_vec(unit3(c3, -s3, 0), e2),
        kron_vec(unit3(0, c4, -s4), e0),
        kron_vec(u, w),
    };

    ComplexMatrix rho = ComplexMatrix::identity(9);
    for (const auto& p : products) rho -= outer(p, p);
    rho *= cplx(0.25, 0.0);
    return DensityOperator{3, 3, std::move(rho)};
}

FixtureSearchResult search_ppt_entangled_fixture(std::uint64_t seed, int max_trials) {
    for (int trial = 0; trial < max_trials; ++trial) {
        Rng rng(derive_seed(seed, trial));
        TilesAngles t{rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2), rng.uniform(0.3, 1.2),
                      rng.uniform(0.3, 1.2)};
        DensityOperator state = tiles_complement_state(t);
        if (!ppt_check(state).ppt) continue;  // cannot happen for exact angles; guards round-off
        const double realign = realignment_value(state);
        if (realign > 1.0 + 1e-6) return FixtureSearchResult{t, std::move(state), realign, trial + 1};
    }
    throw FixtureSearchError("no PPT-entangled fixture found within trial budget");
}

const TilesAngles& fixture_angles() {
    // First draw of search_ppt_entangled_fixture(20240101); realignment value
    // 1.02910864... at these angles. Pinned so the fixture is a constant.
    static const TilesAngles pinned{0.4074588819185585, 1.0305854365747764,
                                    0.82610679270883947, 0.63836365173331067};
    return pinned;
}

DensityOperator ppt_entangled_fixture() { return tiles_complement_state(fixture_angles()); }

}  // namespace bephase
