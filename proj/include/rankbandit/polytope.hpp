#pragma once

#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rankbandit/lp.hpp"
#include "rankbandit/model.hpp"
#include "rankbandit/random.hpp"

// Admissible selection matrices. Rows are items labelled by increasing
// utility (row 0 = least preferred), columns are window lengths (column 0 = w=1).
namespace rankbandit {

inline constexpr double kMembershipTol = 1e-9;
inline constexpr double kFeasibilityTol = 1e-8;
inline constexpr double kZeroSnap = 1e-12;

/// Constraint families of the admissible polytope:
///  C1  0 <= P <= 1
///  C2  every column sums to one
///  C3  P(i, w) = 0 when i < w (an item never wins a window longer than its rank)
///  C4  every upper tail sum  sum_{i >= m} P(i, w)  is non-decreasing in w
enum class Constraint { C1 = 1, C2 = 2, C3 = 3, C4 = 4 };

const char *to_string(Constraint c);

struct Violation {
    Constraint constraint;
    std::size_t row = 0;           // item row (C1, C3) or tail start (C4)
    std::size_t window = 0;        // 0-based column
    std::size_t other_window = 0;  // C4 only: the later column
    double amount = 0.0;           // size of the violation

    std::string describe() const;
};

struct AdmissibilityReport {
    bool admissible = true;
    // First violation found in each violated family, ordered C1..C4.
    std::vector<Violation> violations;

    std::optional<Violation> first() const {
        return violations.empty() ? std::nullopt : std::optional<Violation>(violations.front());
    }
    bool violates(Constraint c) const;
};

/// Full membership check. Throws InputError on a non-square matrix.
AdmissibilityReport check_admissible(const Matrix &P, double tol = kMembershipTol);
bool is_admissible(const Matrix &P, double tol = kMembershipTol);

/// For each column, the lowest-utility row with a strictly positive entry.
std::vector<std::size_t> lowest_nonzero_rows(const Matrix &P);

/// Linear description of the polytope over the variables P(i, w) with i >= w
/// (entries below the diagonal band are fixed at zero): column sums as
/// equalities, upper-tail monotonicity between consecutive columns as
/// inequalities. The objective is left at zero.
struct PolytopeProgram {
    std::size_t n = 0;
    lp::Problem problem;
    std::vector<std::size_t> offset;

    std::size_t var(std::size_t i, std::size_t w) const { return offset[w] + (i - w); }
    std::size_t variables() const { return offset[n]; }
    Matrix unpack(const Vector &x) const;
};

PolytopeProgram polytope_program(std::size_t n);

/// Thrown when a target item distribution is not realisable by any P in the polytope.
class InfeasibleTargetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Finds some admissible P with Pq = p by solving the linear program over the
/// polytope's constraint description (variables P(i,w) with i >= w only).
Matrix feasible_matrix(std::span<const double> p, std::span<const double> q);

/// Upper-tail dominance test: sum_{i>=m} p_i >= sum_{w>=m} q_w for every m.
/// This is exactly the set of item distributions reachable as Pq.
bool tail_dominates(std::span<const double> p, std::span<const double> q, double tol = kFeasibilityTol);

/// Closed-form witness for a dominating p: the quantile (comonotone) coupling
/// of window and selected rank. Independent of the LP route.
Matrix coupling_matrix(std::span<const double> p, std::span<const double> q);

struct WeightedPermutation {
    double weight = 0.0;
    Permutation permutation;  // entries are utility-rank labels
};

struct Decomposition {
    std::vector<WeightedPermutation> terms;

    std::size_t support() const { return terms.size(); }
    double total_weight() const;
    Matrix recombine(std::size_t n) const;
    /// Draws a permutation with probability proportional to its weight.
    const Permutation &sample(CounterRng &rng) const;
};

/// Called with each intermediate (normalised) residual matrix during peeling.
using ResidualObserver = std::function<void(const Matrix &)>;

/// Peels integral selection matrices off an admissible P until nothing is
/// left. Throws InputError on an inadmissible input.
Decomposition rfsm_decompose(const Matrix &P, const ResidualObserver &observer = {});

/// Recovers a permutation (rank labels) whose selection matrix equals the
/// integral admissible matrix `P`.
Permutation integral_permutation(const Matrix &P);

std::size_t count_nonzero(const Matrix &P);

}  // namespace rankbandit
