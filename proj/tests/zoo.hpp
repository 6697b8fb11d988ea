#pragma once

// Models shared by the unit, property and acceptance tests.

#include <string>
#include <vector>

#include "wshift/shift_operator.hpp"

namespace wshift::testing {

struct ZooModel {
    std::string name;
    ShiftModel model;
    bool periodic = false;  // periodic on all of Z (closed forms apply)
};

inline std::vector<ZooModel> zoo() {
    using S = SequenceSpec;
    RandomSeq r;
    r.seed = 7;
    r.first = -8;
    r.last = 8;
    r.modulus_lo = 0.5;
    r.modulus_hi = 2.0;
    r.left = 1.0;
    r.right = 1.0;
    return {
        {"constant w=2 d=1", ShiftModel(S::constant(2.0), S::constant(1.0)), true},
        {"unit shift", ShiftModel(S::constant(1.0), S::constant(0.0)), true},
        {"step weights (1,2)", ShiftModel(S::step(1.0, 2.0), S::constant(0.0)), false},
        {"lemniscate", ShiftModel(S::constant(1.0), S::periodic({1.0, -1.0})), true},
        {"periodic weights (1,4)", ShiftModel(S::periodic({1.0, 4.0}), S::constant(0.0)), true},
        {"mixed periods", ShiftModel(S::periodic({1.0, 2.0, 0.5}), S::periodic({0.5, cplx(0.0, -0.5)})), true},
        {"explicit table",
         ShiftModel(S::explicit_table(-3, {1.0, 3.0, 0.5, 2.0, 1.5, 1.0}, 1.0, 2.0), S::step(0.0, 1.0)), false},
        {"random weights", ShiftModel(S::random(r), S::constant(0.3)), false},
        {"zero weight", ShiftModel(S::explicit_table(0, {0.0}, 1.0, 1.0), S::constant(0.5)), false},
    };
}

}  // namespace wshift::testing
