#include <doctest.h>

#include <random>

#include "rankbandit/lp.hpp"

using namespace rankbandit;

TEST_CASE("lp solves a textbook maximisation") {
    lp::Problem p;
    p.c = Vector(2);
    p.c << -3, -5;
    p.A_le = Matrix(3, 2);
    p.A_le << 1, 0, 0, 2, 3, 2;
    p.b_le = Vector(3);
    p.b_le << 4, 12, 18;
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective == doctest::Approx(-36));
    CHECK(r.x(0) == doctest::Approx(2));
    CHECK(r.x(1) == doctest::Approx(6));
}

TEST_CASE("lp detects infeasible and unbounded programs") {
    lp::Problem inf;
    inf.c = Vector::Zero(2);
    inf.A_eq = Matrix(1, 2);
    inf.A_eq << 1, 1;
    inf.b_eq = Vector::Constant(1, 1.0);
    inf.A_le = Matrix(1, 2);
    inf.A_le << -1, -1;
    inf.b_le = Vector::Constant(1, -2.0);
    CHECK(lp::solve(inf).status == lp::Status::Infeasible);

    lp::Problem unb;
    unb.c = Vector(2);
    unb.c << -1, 0;
    unb.A_le = Matrix(1, 2);
    unb.A_le << 0, 1;
    unb.b_le = Vector::Constant(1, 1.0);
    CHECK(lp::solve(unb).status == lp::Status::Unbounded);
}

TEST_CASE("lp handles redundant equality rows") {
    lp::Problem p;
    p.c = Vector(3);
    p.c << 1, 2, 3;
    p.A_eq = Matrix(2, 3);
    p.A_eq << 1, 1, 1, 2, 2, 2;
    p.b_eq = Vector(2);
    p.b_eq << 1, 2;
    const auto r = lp::solve(p);
    REQUIRE(r.status == lp::Status::Optimal);
    CHECK(r.objective == doctest::Approx(1.0));
}

namespace {
// Minimum over all basic solutions of {Ax <= b, x >= 0} in three variables.
double vertex_oracle(const Matrix &A, const Vector &b, const Vector &c) {
    const Eigen::Index m = A.rows(), d = A.cols();
    Matrix G(m + d, d);
    Vector h(m + d);
    G << A, -Matrix::Identity(d, d);
    h << b, Vector::Zero(d);
    double best = 1e300;
    const Eigen::Index k = G.rows();
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = i + 1; j < k; ++j)
            for (Eigen::Index l = j + 1; l < k; ++l) {
                Matrix S(3, 3);
                S << G.row(i), G.row(j), G.row(l);
                Vector rhs(3);
                rhs << h(i), h(j), h(l);
                Eigen::FullPivLU<Matrix> lu(S);
                if (lu.rank() < 3) continue;
                const Vector x = lu.solve(rhs);
                if (((G * x - h).array() <= 1e-9).all()) best = std::min(best, c.dot(x));
            }
    return best;
}
}  // namespace

TEST_CASE("lp optimum matches vertex enumeration on random bounded programs") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0), P(0.1, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        Matrix A(4, 3);
        Vector b(4), c(3);
        for (Eigen::Index i = 0; i < 3; ++i)
            for (Eigen::Index j = 0; j < 3; ++j) A(i, j) = U(gen);
        A.row(3).setOnes();
        for (Eigen::Index i = 0; i < 4; ++i) b(i) = P(gen);
        for (Eigen::Index j = 0; j < 3; ++j) c(j) = U(gen);
        lp::Problem prob{c, Matrix(0, 3), Vector(0), A, b};
        const auto r = lp::solve(prob);
        REQUIRE(r.status == lp::Status::Optimal);
        CHECK(r.objective == doctest::Approx(vertex_oracle(A, b, c)).epsilon(1e-9));
        CHECK(((A * r.x - b).array() <= 1e-9).all());
    }
}
