#include "lsq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "errors.hpp"

namespace contagion {

namespace {

double sum_sq(std::span<const double> r) {
    double s = 0.0;
    for (double v : r)
        s += v * v;
    return s;
}

// Gaussian elimination with partial pivoting for the small damped normal
// systems (n <= 6 in practice).
std::vector<double> solve_dense(std::vector<double> A, std::vector<double> rhs) {
    const std::size_t n = rhs.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(A[row * n + col]) > std::abs(A[piv * n + col]))
                piv = row;
        if (A[piv * n + col] == 0.0)
            throw error(errc::numeric, "singular normal equations");
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k)
                std::swap(A[col * n + k], A[piv * n + k]);
            std::swap(rhs[col], rhs[piv]);
        }
        const double d = A[col * n + col];
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = A[row * n + col] / d;
            if (f == 0.0)
                continue;
            for (std::size_t k = col; k < n; ++k)
                A[row * n + k] -= f * A[col * n + k];
            rhs[row] -= f * rhs[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t k = i + 1; k < n; ++k)
            s -= A[i * n + k] * x[k];
        x[i] = s / A[i * n + i];
    }
    return x;
}

} // namespace

std::vector<double> forward_jacobian(const ResidualFn& resid, std::span<const double> x,
                                     const Box& box, double fd_rel_step,
                                     std::span<const double> r0, int* fevals) {
    const std::size_t n = x.size();
    const std::size_t m = r0.size();
    std::vector<double> J(m * n);
    std::vector<double> xt(x.begin(), x.end());
    for (std::size_t j = 0; j < n; ++j) {
        // A residual routed through an adaptive integrator can be blind to a
        // perturbation smaller than its discretization (e.g. a switch year
        // moving less than the gap between stage evaluations). An exactly
        // zero column would silently freeze the coordinate, so widen the
        // probe step until the response resolves or the attempts run out.
        double h = fd_rel_step * std::max(std::abs(x[j]), 0.1);
        for (int attempt = 0; attempt < 4; ++attempt, h *= 64.0) {
            double hj = h;
            if (x[j] + hj > box.hi[j])
                hj = -hj; // backward difference at the upper bound
            double target = std::clamp(x[j] + hj, box.lo[j], box.hi[j]);
            if (target == x[j])
                break; // the box leaves no room to probe
            xt[j] = target;
            const std::vector<double> rj = resid(xt);
            if (fevals)
                ++*fevals;
            xt[j] = x[j];
            hj = target - x[j];
            bool live = false;
            for (std::size_t i = 0; i < m; ++i) {
                J[i * n + j] = (rj[i] - r0[i]) / hj;
                live = live || J[i * n + j] != 0.0;
            }
            if (live)
                break;
        }
    }
    return J;
}

LsqResult lm_box(const ResidualFn& resid, std::vector<double> x0, const Box& box,
                 const InnerSolveConfig& config) {
    const std::size_t n = x0.size();
    if (box.lo.size() != n || box.hi.size() != n)
        throw error(errc::invalid_argument, "bound arrays do not match parameter count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!(box.lo[j] <= box.hi[j]))
            throw error(errc::invalid_argument, "bounds not well ordered");
        x0[j] = std::clamp(x0[j], box.lo[j], box.hi[j]);
    }

    LsqResult res;
    res.x = std::move(x0);
    std::vector<double> r = resid(res.x);
    res.fevals = 1;
    res.objective = sum_sq(r);

    double lambda = config.lambda_init;
    constexpr double lambda_max = 1e12;

    while (res.fevals + static_cast<int>(n) < config.max_fevals) {
        const std::vector<double> J =
            forward_jacobian(resid, res.x, box, config.fd_rel_step, r, &res.fevals);
        const std::size_t m = r.size();

        // Gradient of the objective is 2 J^T r; the factor 2 cancels in the
        // normal equations.
        std::vector<double> g(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                g[j] += J[i * n + j] * r[i];

        // Coordinates pinned at a bound with the gradient pushing outward
        // stay fixed for this linearization.
        std::vector<std::size_t> free;
        for (std::size_t j = 0; j < n; ++j) {
            const double eps = 1e-10 * (1.0 + std::abs(res.x[j]));
            const bool at_lo = res.x[j] <= box.lo[j] + eps && g[j] > 0.0;
            const bool at_hi = res.x[j] >= box.hi[j] - eps && g[j] < 0.0;
            if (!at_lo && !at_hi)
                free.push_back(j);
        }
        if (free.empty()) {
            res.converged = true; // every coordinate blocked by its bound
            break;
        }

        const std::size_t nf = free.size();
        std::vector<double> A(nf * nf, 0.0);
        std::vector<double> gf(nf);
        for (std::size_t p = 0; p < nf; ++p) {
            gf[p] = g[free[p]];
            for (std::size_t q = p; q < nf; ++q) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i)
                    s += J[i * n + free[p]] * J[i * n + free[q]];
                A[p * nf + q] = s;
                A[q * nf + p] = s;
            }
        }

        bool accepted = false;
        bool done = false;
        while (res.fevals < config.max_fevals) {
            std::vector<double> damped = A;
            for (std::size_t p = 0; p < nf; ++p) {
                const double d = A[p * nf + p];
                damped[p * nf + p] = d + lambda * (d > 0.0 ? d : 1.0);
            }
            std::vector<double> neg_g(nf);
            for (std::size_t p = 0; p < nf; ++p)
                neg_g[p] = -gf[p];

            std::vector<double> step;
            try {
                step = solve_dense(std::move(damped), std::move(neg_g));
            } catch (const error&) {
                lambda *= 4.0;
                if (lambda > lambda_max) {
                    res.converged = true;
                    done = true;
                    break;
                }
                continue;
            }

            std::vector<double> trial = res.x;
            double step_norm = 0.0;
            for (std::size_t p = 0; p < nf; ++p) {
                trial[free[p]] = std::clamp(trial[free[p]] + step[p], box.lo[free[p]],
                                            box.hi[free[p]]);
                const double moved = trial[free[p]] - res.x[free[p]];
                step_norm += moved * moved;
            }
            step_norm = std::sqrt(step_norm);
            if (step_norm < config.step_tol) {
                res.converged = true;
                done = true;
                break;
            }

            std::vector<double> rt = resid(trial);
            ++res.fevals;
            const double ft = sum_sq(rt);
            if (ft < res.objective) {
                const double rel_drop = (res.objective - ft) / std::max(res.objective, 1e-300);
                res.x = std::move(trial);
                r = std::move(rt);
                res.objective = ft;
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                if (rel_drop < config.obj_tol) {
                    res.converged = true;
                    done = true;
                }
                break;
            }
            lambda *= 4.0;
            if (lambda > lambda_max) {
                // No descent direction left at this damping: stationary
                // within the evaluation noise.
                res.converged = true;
                done = true;
                break;
            }
        }
        if (done)
            break;
        if (!accepted && res.fevals >= config.max_fevals)
            break;
    }
    return res;
}

} // namespace contagion
