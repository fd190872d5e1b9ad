#include "rankbandit/osmd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "rankbandit/exploration.hpp"
#include "rankbandit/polytope.hpp"

namespace rankbandit {

LossEstimate make_loss_estimate(std::size_t index, double payoff, double prob, double offset) {
    if (!(prob > 0.0)) throw InputError("loss estimate needs a positive selection probability");
    return {index, (offset - payoff) / prob};
}

UtilityRelabel UtilityRelabel::from_rank_utilities(std::span<const double> u) {
    const std::size_t n = u.size();
    UtilityRelabel out;
    out.sigma.resize(n);
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = u[i];
        if (!(v >= 1.0 && v <= static_cast<double>(n)) || v != std::floor(v))
            throw InputError("changing utilities must take the values 1..n (apply rank_reduce first)");
        const auto r = static_cast<std::size_t>(v) - 1;
        if (seen[r]) throw InputError("changing utilities must be a permutation of 1..n");
        seen[r] = true;
        out.sigma[i] = r;
    }
    return out;
}

std::vector<double> rank_reduce(std::span<const double> u) {
    const UtilityProfile prof(std::vector<double>(u.begin(), u.end()));
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = static_cast<double>(prof.rank(i) + 1);
    return out;
}

MarginalSet::MarginalSet(std::vector<double> q) : q_(std::move(q)) {
    validate_window_model(Multinomial{q_}, q_.size());
    const std::size_t n = q_.size();
    tails_.assign(n + 1, 0.0);
    for (std::size_t m = n; m-- > 0;) tails_[m] = tails_[m + 1] + q_[m];
    tails_[0] = 1.0;
    while (first_ + 1 < n && q_[first_] == 0.0) ++first_;
    for (std::size_t m = 1; m <= first_; ++m) tails_[m] = 1.0;
}

bool MarginalSet::contains(std::span<const double> x, double tol) const {
    const std::size_t n = size();
    if (x.size() != n) return false;
    double tail = 0.0;
    for (std::size_t m = n; m-- > 0;) {
        if (x[m] < -tol) return false;
        tail += x[m];
        if (tail < tails_[m] - tol) return false;
    }
    return std::abs(tail - 1.0) <= tol;
}

namespace {

std::string dump(const char *what, std::span<const double> v) {
    std::ostringstream os;
    os.precision(17);
    os << what << "=[";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
    os << "]";
    return os.str();
}

}  // namespace

std::vector<double> MarginalSet::minimize(std::span<const double> a, std::span<const double> start,
                                          std::size_t max_iter, double tol, std::size_t *iterations) const {
    const std::size_t n = size();
    if (a.size() != n || start.size() != n) throw InputError("MarginalSet::minimize: size mismatch");
    const std::size_t f = first_;
    const std::size_t nv = n - f - 1;  // free tail variables z_{f+1..n-1}

    std::vector<double> z(nv), L(nv);
    {
        double tail = 0.0;
        for (std::size_t j = n; j-- > f + 1;) {
            tail += start[j];
            z[j - f - 1] = tail;
            L[j - f - 1] = tails_[j];
        }
    }
    // Z(j) with Z(f) = 1 and Z(n) = 0.
    auto Z = [&](const std::vector<double> &zz, std::size_t j) {
        if (j == f) return 1.0;
        if (j == n) return 0.0;
        return zz[j - f - 1];
    };
    auto marginals = [&](const std::vector<double> &zz, std::vector<double> &x) {
        for (std::size_t i = f; i < n; ++i) x[i] = Z(zz, i) - Z(zz, i + 1);
    };
    auto objective = [&](const std::vector<double> &x) {
        double s = 0.0;
        for (std::size_t i = f; i < n; ++i) s += a[i] * x[i] - 2.0 * std::sqrt(x[i]);
        return s;
    };
    auto positive = [&](const std::vector<double> &x) {
        for (std::size_t i = f; i < n; ++i)
            if (!(x[i] > 0.0)) return false;
        return true;
    };

    std::vector<double> x(n, 0.0), xn(n, 0.0);
    marginals(z, x);
    if (!positive(x)) throw ProjectionError("projection start is not strictly inside the set; " + dump("start", start));

    double scale = 1.0;
    for (std::size_t i = f; i < n; ++i) scale = std::max(scale, std::abs(a[i]));

    std::vector<double> dphi(n), h(n), g(nv), d(nv), zn(nv), cp(nv), dp(nv);
    std::vector<bool> active(nv);
    double residual = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    bool stalled = false;
    for (; iter < max_iter; ++iter) {
        for (std::size_t i = f; i < n; ++i) {
            const double s = std::sqrt(x[i]);
            dphi[i] = a[i] - 1.0 / s;
            h[i] = 0.5 / (x[i] * s);
        }
        residual = 0.0;
        for (std::size_t v = 0; v < nv; ++v) {
            const std::size_t j = f + 1 + v;
            g[v] = dphi[j] - dphi[j - 1];
            residual = std::max(residual, std::abs(z[v] - std::max(L[v], z[v] - g[v])));
        }
        if (residual <= 1e-13 * scale) break;

        const double eps = std::min(1e-9, residual);
        for (std::size_t v = 0; v < nv; ++v) active[v] = (z[v] - L[v] <= eps) && g[v] > 0.0;

        // Tridiagonal Newton system on the free variables (Thomas algorithm).
        std::size_t prev = nv;
        for (std::size_t v = 0; v < nv; ++v) {
            const std::size_t j = f + 1 + v;
            const double diag = h[j] + h[j - 1];
            if (active[v]) {
                d[v] = -g[v] / diag;
                prev = nv;
                continue;
            }
            const bool linked = prev == v - 1 && v > 0;
            const double sub = linked ? -h[j - 1] : 0.0;
            const double sup = (v + 1 < nv && !active[v + 1]) ? -h[j] : 0.0;
            const double denom = diag - (linked ? sub * cp[v - 1] : 0.0);
            cp[v] = sup / denom;
            dp[v] = (-g[v] - (linked ? sub * dp[v - 1] : 0.0)) / denom;
            prev = v;
        }
        for (std::size_t v = nv; v-- > 0;) {
            if (active[v]) continue;
            d[v] = dp[v];
            if (v + 1 < nv && !active[v + 1]) d[v] -= cp[v] * d[v + 1];
        }

        const double f0 = objective(x);
        // Near the optimum objective differences drop below rounding error;
        // allow that much slack so Newton steps are not rejected on noise.
        double magnitude = 0.0;
        for (std::size_t i = f; i < n; ++i) magnitude += std::abs(a[i] * x[i]) + 2.0 * std::sqrt(x[i]);
        const double noise = 64.0 * std::numeric_limits<double>::epsilon() * magnitude;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 80; ++ls, alpha *= 0.5) {
            double decrease = 0.0;
            for (std::size_t v = 0; v < nv; ++v) {
                zn[v] = std::max(L[v], z[v] + alpha * d[v]);
                decrease += g[v] * (zn[v] - z[v]);
            }
            marginals(zn, xn);
            if (!positive(xn)) continue;
            if (objective(xn) <= f0 + 1e-4 * decrease + noise) {
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            stalled = true;
            break;
        }
        z.swap(zn);
        x.swap(xn);
    }
    if (iterations) *iterations = iter;

    bool finite = true;
    for (double v : x) finite = finite && std::isfinite(v);
    if (!finite || !positive(x) || residual > tol * scale) {
        std::ostringstream os;
        os << "mirror-descent projection failed after " << iter << " iterations (KKT residual " << residual
           << (stalled ? ", line search stalled" : "") << "); " << dump("a", a) << "; " << dump("x", x) << "; "
           << dump("q", q_);
        throw ProjectionError(os.str());
    }
    return x;
}

std::vector<double> MarginalSet::project(std::span<const double> y) const {
    const std::size_t n = size();
    if (y.size() != n) throw InputError("project: size mismatch");
    std::vector<double> a(n, 0.0);
    for (std::size_t i = first_; i < n; ++i) {
        if (!(y[i] > 0.0)) throw InputError("project: point must be strictly positive on free ranks");
        a[i] = 1.0 / std::sqrt(y[i]);
    }
    return minimize(a, initial_point());
}

std::vector<double> MarginalSet::initial_point() const {
    const std::size_t n = size();
    if (is_lazy(q_)) return std::vector<double>(n, 1.0 / static_cast<double>(n));
    return pivot_marginals(std::vector<double>(n, 1.0 / static_cast<double>(n)), q_);
}

OsmdState::OsmdState(std::vector<double> q, double eta) : set_(std::move(q)), eta_(eta), x_(set_.initial_point()) {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw InputError("learning rate must be positive");
}

void OsmdState::feed(const LossEstimate &loss) {
    if (loss.index >= x_.size()) throw InputError("loss estimate index out of range");
    if (loss.value == 0.0) return;
    std::vector<double> full(x_.size(), 0.0);
    full[loss.index] = loss.value;
    feed(full);
}

void OsmdState::feed(std::span<const double> loss) {
    const std::size_t n = x_.size();
    if (loss.size() != n) throw InputError("loss vector has the wrong size");
    if (std::all_of(loss.begin(), loss.end(), [](double v) { return v == 0.0; })) return;
    std::vector<double> a(n, 0.0);
    for (std::size_t i = set_.first_free(); i < n; ++i) a[i] = eta_ * loss[i] + 1.0 / std::sqrt(x_[i]);
    x_ = set_.minimize(a, x_, 200, 1e-8, &last_iterations_);
}

double default_learning_rate(std::size_t horizon) {
    if (horizon == 0) throw InputError("horizon must be positive");
    return std::sqrt(2.0 / static_cast<double>(horizon));
}

namespace {
double initial_rate(const BloConfig &cfg) {
    if (cfg.eta) return *cfg.eta;
    return default_learning_rate(cfg.horizon ? *cfg.horizon : 1);
}
}  // namespace

BloRanker::BloRanker(BloConfig cfg, CounterRng rng)
    : cfg_(std::move(cfg)), rng_(rng), state_(cfg_.q, initial_rate(cfg_)) {
    epoch_end_ = cfg_.horizon ? std::numeric_limits<std::size_t>::max() : 1;
}

void BloRanker::maybe_restart(std::size_t t) {
    if (cfg_.horizon) return;
    while (t > epoch_end_) {
        ++epoch_;
        const std::size_t len = std::size_t{1} << epoch_;
        epoch_end_ += len;
        state_ = OsmdState(cfg_.q, cfg_.eta ? *cfg_.eta : default_learning_rate(len));
    }
}

Permutation BloRanker::act(std::size_t t, const UtilityProfile &u) {
    const std::size_t n = cfg_.q.size();
    if (u.size() != n) throw InputError("osmd: utility profile has the wrong size");
    maybe_restart(t);
    const std::vector<double> &p = state_.act();
    const Matrix P = cfg_.witness == WitnessMethod::LinearProgram ? feasible_matrix(p, cfg_.q) : coupling_matrix(p, cfg_.q);
    const Decomposition dec = rfsm_decompose(P);
    const Permutation ranked = dec.sample(rng_);

    Pending info{std::vector<std::size_t>(n), std::vector<double>(n, 0.0), epoch_};
    for (std::size_t i = 0; i < n; ++i) info.rank_of_item[i] = u.rank(i);
    for (Eigen::Index i = 0; i < P.rows(); ++i)
        for (Eigen::Index w = 0; w < P.cols(); ++w) info.realised[static_cast<std::size_t>(i)] += P(i, w) * cfg_.q[static_cast<std::size_t>(w)];
    pending_[t] = std::move(info);
    return u.to_items(ranked);
}

void BloRanker::feed(std::size_t t, std::size_t selected, double payoff) {
    auto it = pending_.find(t);
    if (it == pending_.end()) throw InputError("osmd: feedback for an unknown trial");
    const Pending info = std::move(it->second);
    pending_.erase(it);
    if (info.epoch != epoch_) return;  // stale feedback from a finished epoch
    const std::size_t r = info.rank_of_item.at(selected);
    state_.feed(make_loss_estimate(r, payoff, info.realised[r], cfg_.loss_offset));
}

}  // namespace rankbandit
