#pragma once

#include <cstddef>

#include "rankbandit/model.hpp"

namespace rankbandit::lp {

enum class Status { Optimal, Infeasible, Unbounded };

/// minimize c'x  subject to  A_eq x = b_eq,  A_le x <= b_le,  x >= 0.
/// Empty matrices are allowed for either constraint block.
struct Problem {
    Vector c;
    Matrix A_eq;
    Vector b_eq;
    Matrix A_le;
    Vector b_le;
};

struct Result {
    Status status = Status::Infeasible;
    Vector x;
    double objective = 0.0;
    double infeasibility = 0.0;  // phase-one optimum (sum of artificials)
    std::size_t pivots = 0;
};

/// Two-phase dense tableau simplex with Bland's anti-cycling rule.
/// `feasibility_tol` bounds the phase-one residual accepted as feasible.
Result solve(const Problem &problem, double feasibility_tol = 1e-9);

const char *to_string(Status s);

}  // namespace rankbandit::lp
