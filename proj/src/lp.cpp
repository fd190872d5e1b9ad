#include "rankbandit/lp.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace rankbandit::lp {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

// Row-major tableau; the last row is the objective, the last column the rhs.
class Tableau {
  public:
    Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0) {}

    double &at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
    double &rhs(std::size_t r) { return at(r, cols_); }
    double &cost(std::size_t c) { return at(rows_, c); }
    double &objective() { return at(rows_, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const std::size_t width = cols_ + 1;
        double *prow = &data_[pr * width];
        const double inv = 1.0 / prow[pc];
        for (std::size_t c = 0; c < width; ++c) prow[c] *= inv;
        prow[pc] = 1.0;
        for (std::size_t r = 0; r <= rows_; ++r) {
            if (r == pr) continue;
            double *row = &data_[r * width];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < width; ++c) row[c] -= f * prow[c];
            row[pc] = 0.0;
        }
    }

  private:
    std::size_t rows_, cols_;
    std::vector<double> data_;
};

// Runs Bland-rule simplex on the current objective row. Columns flagged in
// `blocked` never enter. Returns false if unbounded.
bool run_simplex(Tableau &tab, std::vector<std::size_t> &basis, const std::vector<bool> &blocked,
                 std::size_t &pivots) {
    const std::size_t m = tab.rows();
    const std::size_t ncols = tab.cols();
    for (;;) {
        std::size_t enter = ncols;
        for (std::size_t c = 0; c < ncols; ++c) {
            if (blocked[c]) continue;
            if (tab.cost(c) < -kCostTol) {
                enter = c;
                break;
            }
        }
        if (enter == ncols) return true;

        std::size_t leave = m;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < m; ++r) {
            const double a = tab.at(r, enter);
            if (a <= kPivotTol) continue;
            const double ratio = tab.rhs(r) / a;
            if (ratio < best_ratio - 1e-14 ||
                (std::abs(ratio - best_ratio) <= 1e-14 && leave < m && basis[r] < basis[leave])) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave == m) return false;
        tab.pivot(leave, enter);
        basis[leave] = enter;
        ++pivots;
    }
}

}  // namespace

const char *to_string(Status s) {
    switch (s) {
    case Status::Optimal:
        return "optimal";
    case Status::Infeasible:
        return "infeasible";
    case Status::Unbounded:
        return "unbounded";
    }
    return "unknown";
}

Result solve(const Problem &problem, double feasibility_tol) {
    const std::size_t nvar = static_cast<std::size_t>(problem.c.size());
    const std::size_t meq = static_cast<std::size_t>(problem.A_eq.rows());
    const std::size_t mle = static_cast<std::size_t>(problem.A_le.rows());
    if ((meq > 0 && static_cast<std::size_t>(problem.A_eq.cols()) != nvar) ||
        (mle > 0 && static_cast<std::size_t>(problem.A_le.cols()) != nvar) ||
        static_cast<std::size_t>(problem.b_eq.size()) != meq ||
        static_cast<std::size_t>(problem.b_le.size()) != mle)
        throw InputError("lp::solve: inconsistent problem dimensions");

    const std::size_t m = meq + mle;
    // Layout: [original | slacks (one per <= row) | artificials (one per row needing one)].
    std::vector<bool> needs_artificial(m, false);
    std::size_t nart = 0;
    for (std::size_t r = 0; r < meq; ++r) {
        needs_artificial[r] = true;
        ++nart;
    }
    for (std::size_t r = 0; r < mle; ++r)
        if (problem.b_le(static_cast<Eigen::Index>(r)) < 0.0) {
            needs_artificial[meq + r] = true;
            ++nart;
        }

    const std::size_t slack0 = nvar;
    const std::size_t art0 = nvar + mle;
    const std::size_t ncols = art0 + nart;
    Tableau tab(m, ncols);
    std::vector<std::size_t> basis(m);
    std::vector<bool> is_artificial(ncols, false);

    std::size_t next_art = art0;
    for (std::size_t r = 0; r < m; ++r) {
        const bool eq = r < meq;
        const auto ri = static_cast<Eigen::Index>(eq ? r : r - meq);
        double b = eq ? problem.b_eq(ri) : problem.b_le(ri);
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < nvar; ++c) {
            const auto ci = static_cast<Eigen::Index>(c);
            tab.at(r, c) = sign * (eq ? problem.A_eq(ri, ci) : problem.A_le(ri, ci));
        }
        if (!eq) tab.at(r, slack0 + (r - meq)) = sign;
        tab.rhs(r) = sign * b;
        if (needs_artificial[r]) {
            tab.at(r, next_art) = 1.0;
            is_artificial[next_art] = true;
            basis[r] = next_art++;
        } else {
            basis[r] = slack0 + (r - meq);
        }
    }

    Result result;
    std::vector<bool> blocked(ncols, false);

    // Phase one: minimize the sum of artificials.
    if (nart > 0) {
        for (std::size_t r = 0; r < m; ++r) {
            if (!is_artificial[basis[r]]) continue;
            for (std::size_t c = 0; c <= ncols; ++c)
                if (c == ncols || !is_artificial[c]) tab.at(m, c) -= tab.at(r, c);
        }
        run_simplex(tab, basis, blocked, result.pivots);
        result.infeasibility = -tab.objective();
        double scale = 1.0;
        for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(tab.rhs(r)));
        if (result.infeasibility > feasibility_tol * scale) {
            result.status = Status::Infeasible;
            return result;
        }
        // Drive remaining (zero-level) artificials out of the basis where possible.
        for (std::size_t r = 0; r < m; ++r) {
            if (!is_artificial[basis[r]]) continue;
            for (std::size_t c = 0; c < art0; ++c) {
                if (std::abs(tab.at(r, c)) > 1e-9) {
                    tab.pivot(r, c);
                    basis[r] = c;
                    ++result.pivots;
                    break;
                }
            }
        }
        for (std::size_t c = art0; c < ncols; ++c) blocked[c] = true;
    }

    // Phase two objective row.
    for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) = 0.0;
    for (std::size_t c = 0; c < nvar; ++c) tab.cost(c) = problem.c(static_cast<Eigen::Index>(c));
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = basis[r];
        if (b >= nvar) continue;
        const double cb = problem.c(static_cast<Eigen::Index>(b));
        if (cb == 0.0) continue;
        for (std::size_t c = 0; c <= ncols; ++c) tab.at(m, c) -= cb * tab.at(r, c);
    }

    if (!run_simplex(tab, basis, blocked, result.pivots)) {
        result.status = Status::Unbounded;
        return result;
    }

    result.status = Status::Optimal;
    result.x = Vector::Zero(static_cast<Eigen::Index>(nvar));
    for (std::size_t r = 0; r < m; ++r)
        if (basis[r] < nvar) result.x(static_cast<Eigen::Index>(basis[r])) = std::max(0.0, tab.rhs(r));
    result.objective = problem.c.dot(result.x);
    return result;
}

}  // namespace rankbandit::lp
