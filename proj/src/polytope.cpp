#include "rankbandit/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rankbandit/lp.hpp"

namespace rankbandit {

const char *to_string(Constraint c) {
    switch (c) {
    case Constraint::C1:
        return "C1";
    case Constraint::C2:
        return "C2";
    case Constraint::C3:
        return "C3";
    case Constraint::C4:
        return "C4";
    }
    return "?";
}

std::string Violation::describe() const {
    std::ostringstream os;
    os << to_string(constraint) << ": ";
    switch (constraint) {
    case Constraint::C1:
        os << "entry (" << row << ", " << window << ") outside [0, 1] by " << amount;
        break;
    case Constraint::C2:
        os << "column " << window << " sums to 1 " << (amount >= 0 ? "+ " : "- ") << std::abs(amount);
        break;
    case Constraint::C3:
        os << "entry (" << row << ", " << window << ") must be zero, is " << amount;
        break;
    case Constraint::C4:
        os << "tail from row " << row << " drops by " << amount << " between columns " << window << " and "
           << other_window;
        break;
    }
    return os.str();
}

bool AdmissibilityReport::violates(Constraint c) const {
    return std::any_of(violations.begin(), violations.end(), [c](const Violation &v) { return v.constraint == c; });
}

AdmissibilityReport check_admissible(const Matrix &P, double tol) {
    if (P.rows() != P.cols()) throw InputError("selection matrix must be square");
    const auto n = static_cast<std::size_t>(P.rows());
    AdmissibilityReport report;
    auto add = [&report](Violation v) {
        report.admissible = false;
        report.violations.push_back(v);
    };

    for (std::size_t w = 0; w < n; ++w) {
        bool found = false;
        for (std::size_t i = 0; i < n && !found; ++i) {
            const double x = P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w));
            if (!(x >= -tol && x <= 1.0 + tol)) {
                add({Constraint::C1, i, w, 0, x < 0 ? -x : x - 1.0});
                found = true;
            }
        }
        if (found) break;
    }

    for (std::size_t w = 0; w < n; ++w) {
        const double s = P.col(static_cast<Eigen::Index>(w)).sum();
        if (!(std::abs(s - 1.0) <= tol)) {
            add({Constraint::C2, 0, w, 0, s - 1.0});
            break;
        }
    }

    [&] {
        for (std::size_t w = 1; w < n; ++w)
            for (std::size_t i = 0; i < w; ++i) {
                const double x = P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w));
                if (!(std::abs(x) <= tol)) {
                    add({Constraint::C3, i, w, 0, x});
                    return;
                }
            }
    }();

    // tails(m, w) = sum_{i >= m} P(i, w) for m = 1..n-1 (tail 0 is the whole column).
    if (n >= 2) {
        Matrix tails = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (Eigen::Index w = 0; w < static_cast<Eigen::Index>(n); ++w) {
            double acc = 0.0;
            for (Eigen::Index i = static_cast<Eigen::Index>(n) - 1; i >= 0; --i) {
                acc += P(i, w);
                tails(i, w) = acc;
            }
        }
        [&] {
            for (std::size_t m = 1; m < n; ++m)
                for (std::size_t w = 0; w < n; ++w)
                    for (std::size_t w2 = w + 1; w2 < n; ++w2) {
                        const double drop = tails(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(w)) -
                                            tails(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(w2));
                        if (!(drop <= tol)) {
                            add({Constraint::C4, m, w, w2, drop});
                            return;
                        }
                    }
        }();
    }
    return report;
}

bool is_admissible(const Matrix &P, double tol) { return check_admissible(P, tol).admissible; }

std::vector<std::size_t> lowest_nonzero_rows(const Matrix &P) {
    const auto n = static_cast<std::size_t>(P.rows());
    std::vector<std::size_t> rows(static_cast<std::size_t>(P.cols()), n);
    for (std::size_t w = 0; w < rows.size(); ++w)
        for (std::size_t i = 0; i < n; ++i)
            if (P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) > 0.0) {
                rows[w] = i;
                break;
            }
    return rows;
}

std::size_t count_nonzero(const Matrix &P) {
    return static_cast<std::size_t>((P.array() != 0.0).count());
}

namespace {

void validate_distribution(std::span<const double> v, const char *what) {
    double total = 0.0;
    for (double x : v) {
        if (!(x >= -kFeasibilityTol)) throw InputError(std::string(what) + " has a negative entry");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-9) throw InputError(std::string(what) + " must sum to 1");
}

std::string describe_dominance_gap(std::span<const double> p, std::span<const double> q) {
    double tp = 0.0, tq = 0.0;
    std::ostringstream os;
    for (std::size_t m = p.size(); m-- > 1;) {
        tp += p[m];
        tq += q[m];
        if (tp < tq - kFeasibilityTol) {
            os << "target puts " << tp << " on ranks >= " << m << " but windows force at least " << tq;
            return os.str();
        }
    }
    return "linear program reported infeasible";
}

}  // namespace

bool tail_dominates(std::span<const double> p, std::span<const double> q, double tol) {
    if (p.size() != q.size()) throw InputError("tail_dominates: size mismatch");
    double tp = 0.0, tq = 0.0;
    for (std::size_t m = p.size(); m-- > 1;) {
        tp += p[m];
        tq += q[m];
        if (tp < tq - tol) return false;
    }
    return true;
}

PolytopeProgram polytope_program(std::size_t n) {
    if (n == 0) throw InputError("polytope_program: n must be positive");
    PolytopeProgram pp;
    pp.n = n;
    pp.offset.assign(n + 1, 0);
    for (std::size_t w = 0; w < n; ++w) pp.offset[w + 1] = pp.offset[w] + (n - w);
    const auto nvar = static_cast<Eigen::Index>(pp.offset[n]);
    const auto ni = static_cast<Eigen::Index>(n);

    lp::Problem &prob = pp.problem;
    prob.c = Vector::Zero(nvar);
    prob.A_eq = Matrix::Zero(ni, nvar);
    prob.b_eq = Vector::Ones(ni);
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t i = w; i < n; ++i) prob.A_eq(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(pp.var(i, w))) = 1.0;

    // Only tails starting above the later column are non-trivial.
    std::vector<std::pair<std::size_t, std::size_t>> tails;
    for (std::size_t m = 2; m < n; ++m)
        for (std::size_t w = 0; w + 1 < m; ++w) tails.emplace_back(m, w);
    prob.A_le = Matrix::Zero(static_cast<Eigen::Index>(tails.size()), nvar);
    prob.b_le = Vector::Zero(static_cast<Eigen::Index>(tails.size()));
    for (std::size_t r = 0; r < tails.size(); ++r) {
        const auto [m, w] = tails[r];
        for (std::size_t i = m; i < n; ++i) {
            prob.A_le(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(pp.var(i, w))) += 1.0;
            prob.A_le(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(pp.var(i, w + 1))) -= 1.0;
        }
    }
    return pp;
}

Matrix PolytopeProgram::unpack(const Vector &x) const {
    const auto ni = static_cast<Eigen::Index>(n);
    Matrix P = Matrix::Zero(ni, ni);
    for (std::size_t w = 0; w < n; ++w)
        for (std::size_t i = w; i < n; ++i) {
            double v = x(static_cast<Eigen::Index>(var(i, w)));
            if (v < kZeroSnap) v = 0.0;
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) = v;
        }
    for (Eigen::Index w = 0; w < ni; ++w) P.col(w) /= P.col(w).sum();
    return P;
}

Matrix feasible_matrix(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = p.size();
    if (q.size() != n || n == 0) throw InputError("feasible_matrix: p and q must have the same positive length");
    validate_distribution(p, "target p");
    validate_distribution(q, "window distribution q");

    PolytopeProgram pp = polytope_program(n);
    lp::Problem &prob = pp.problem;
    const auto ni = static_cast<Eigen::Index>(n);
    const auto nvar = static_cast<Eigen::Index>(pp.variables());
    // Append the marginal rows  sum_w q_w P(i, w) = p_i.
    Matrix A(2 * ni, nvar);
    A.topRows(ni) = prob.A_eq;
    A.bottomRows(ni).setZero();
    Vector b(2 * ni);
    b.head(ni) = prob.b_eq;
    for (std::size_t i = 0; i < n; ++i) {
        b(ni + static_cast<Eigen::Index>(i)) = p[i];
        for (std::size_t w = 0; w <= i; ++w) A(ni + static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(pp.var(i, w))) = q[w];
    }
    prob.A_eq = std::move(A);
    prob.b_eq = std::move(b);

    const lp::Result res = lp::solve(prob, 1e-10);
    if (res.status != lp::Status::Optimal)
        throw InfeasibleTargetError("target distribution is not admissible: " + describe_dominance_gap(p, q));

    const Matrix P = pp.unpack(res.x);
    Vector qv(ni), pv(ni);
    for (std::size_t i = 0; i < n; ++i) {
        qv(static_cast<Eigen::Index>(i)) = q[i];
        pv(static_cast<Eigen::Index>(i)) = p[i];
    }
    const double residual = (P * qv - pv).cwiseAbs().maxCoeff();
    if (residual > kFeasibilityTol)
        throw InfeasibleTargetError("target distribution is not admissible: residual " + std::to_string(residual));
    return P;
}

Matrix coupling_matrix(std::span<const double> p, std::span<const double> q) {
    const std::size_t n = p.size();
    if (q.size() != n || n == 0) throw InputError("coupling_matrix: size mismatch");
    validate_distribution(p, "target p");
    validate_distribution(q, "window distribution q");
    if (!tail_dominates(p, q))
        throw InfeasibleTargetError("target distribution is not admissible: " + describe_dominance_gap(p, q));

    std::vector<double> Fp(n + 1, 0.0), Fq(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        Fp[i + 1] = Fp[i] + p[i];
        Fq[i + 1] = Fq[i] + q[i];
    }
    Fp[n] = Fq[n] = 1.0;

    const auto ni = static_cast<Eigen::Index>(n);
    Matrix P = Matrix::Zero(ni, ni);
    for (std::size_t w = 0; w < n; ++w) {
        const double a = Fq[w], b = Fq[w + 1];
        if (b - a > 0.0) {
            for (std::size_t i = w; i < n; ++i) {
                const double overlap = std::min(b, Fp[i + 1]) - std::max(a, Fp[i]);
                if (overlap > 0.0) P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) = overlap / (b - a);
            }
        } else {
            std::size_t i = w;
            while (i + 1 < n && Fp[i + 1] <= a) ++i;
            P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) = 1.0;
        }
        P.col(static_cast<Eigen::Index>(w)) /= P.col(static_cast<Eigen::Index>(w)).sum();
    }
    return P;
}

double Decomposition::total_weight() const {
    double s = 0.0;
    for (const auto &t : terms) s += t.weight;
    return s;
}

Matrix Decomposition::recombine(std::size_t n) const {
    const auto ni = static_cast<Eigen::Index>(n);
    Matrix P = Matrix::Zero(ni, ni);
    for (const auto &t : terms) P += t.weight * selection_matrix(t.permutation);
    return P;
}

const Permutation &Decomposition::sample(CounterRng &rng) const {
    const double u = rng.uniform() * total_weight();
    double acc = 0.0;
    for (const auto &t : terms) {
        acc += t.weight;
        if (u < acc) return t.permutation;
    }
    return terms.back().permutation;
}

Permutation integral_permutation(const Matrix &P) {
    const auto n = static_cast<std::size_t>(P.rows());
    if (P.rows() != P.cols()) throw InputError("integral_permutation: matrix must be square");
    for (Eigen::Index w = 0; w < P.cols(); ++w)
        for (Eigen::Index i = 0; i < P.rows(); ++i) {
            const double x = P(i, w);
            if (std::abs(x) > kMembershipTol && std::abs(x - 1.0) > kMembershipTol)
                throw InputError("integral_permutation: matrix is not 0/1");
        }
    if (const auto rep = check_admissible(P); !rep.admissible)
        throw InputError("integral_permutation: inadmissible matrix (" + rep.first()->describe() + ")");

    std::vector<bool> placed(n, false);
    std::vector<std::size_t> order;
    order.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
        std::size_t chosen = n;
        for (std::size_t i = 0; i < n; ++i)
            if (P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(w)) > 0.5) {
                chosen = i;
                break;
            }
        if (placed[chosen]) chosen = static_cast<std::size_t>(std::find(placed.begin(), placed.end(), false) - placed.begin());
        placed[chosen] = true;
        order.push_back(chosen);
    }
    return Permutation(std::move(order));
}

Decomposition rfsm_decompose(const Matrix &P, const ResidualObserver &observer) {
    if (const auto rep = check_admissible(P); !rep.admissible)
        throw InputError("rfsm_decompose: inadmissible matrix (" + rep.first()->describe() + ")");
    const auto n = static_cast<std::size_t>(P.rows());
    const auto ni = static_cast<Eigen::Index>(n);

    // Work on the unnormalised residual: every column of R sums to the
    // remaining mass, so peeled weights need no rescaling.
    Matrix R = P;
    for (Eigen::Index w = 0; w < ni; ++w)
        for (Eigen::Index i = 0; i < ni; ++i)
            if (i < w || R(i, w) < kZeroSnap) R(i, w) = 0.0;

    Decomposition out;
    const std::size_t max_iters = count_nonzero(R) + 1;
    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        const std::vector<std::size_t> rows = lowest_nonzero_rows(R);
        if (std::any_of(rows.begin(), rows.end(), [n](std::size_t r) { return r == n; })) break;

        double m = R(static_cast<Eigen::Index>(rows[0]), 0);
        for (std::size_t w = 1; w < n; ++w)
            m = std::min(m, R(static_cast<Eigen::Index>(rows[w]), static_cast<Eigen::Index>(w)));

        Matrix integral = Matrix::Zero(ni, ni);
        for (std::size_t w = 0; w < n; ++w)
            integral(static_cast<Eigen::Index>(rows[w]), static_cast<Eigen::Index>(w)) = 1.0;
        out.terms.push_back({m, integral_permutation(integral)});

        for (std::size_t w = 0; w < n; ++w) {
            double &x = R(static_cast<Eigen::Index>(rows[w]), static_cast<Eigen::Index>(w));
            x -= m;
        }
        for (Eigen::Index w = 0; w < ni; ++w)
            for (Eigen::Index i = 0; i < ni; ++i)
                if (R(i, w) < kZeroSnap) R(i, w) = 0.0;

        if (observer && !R.isZero(0.0)) {
            const double mass = R.col(0).sum();
            if (mass > 0.0) observer(R / mass);
        }
    }
    return out;
}

}  // namespace rankbandit
