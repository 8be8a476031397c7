#pragma once

#include <cstdint>

#include "bephase/criteria.hpp"
#include "bephase/states.hpp"

namespace bephase {

struct FixtureSearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Four angles parameterize a five-vector orthogonal product basis of
// tile shape on 3 (x) 3:
//   |0> (x) (c1|0> - s1|1>),   |2> (x) (c2|1> - s2|2>),
//   (c3|0> - s3|1>) (x) |2>,   (c4|1> - s4|2>) (x) |0>,
//   u (x) w  with u, w the strictly positive completions.
// The normalized projector complement (I - sum |psi_i><psi_i|) / 4 is PPT for
// every angle choice; entanglement is certified per instance by realignment.
struct TilesAngles {
    double a1, a2, b1, b2;
};

DensityOperator tiles_complement_state(const TilesAngles& angles);

struct FixtureSearchResult {
    TilesAngles angles;
    DensityOperator state;
    double realignment;
    int trials;
};

// Draws angles uniformly from (0.3, 1.2) until PPT holds and the realignment
// value exceeds 1 + 1e-6.
FixtureSearchResult search_ppt_entangled_fixture(std::uint64_t seed, int max_trials = 256);

// The shipped 3 (x) 3 PPT-entangled fixture: pinned angles from
// search_ppt_entangled_fixture(20240101).
const TilesAngles& fixture_angles();
DensityOperator ppt_entangled_fixture();

}  // namespace bephase
