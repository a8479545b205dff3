#include "abccs/estimating.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "abccs/parallel.hpp"

namespace abccs {

double fd_step(double theta_j) { return 1e-5 * std::max(1.0, std::abs(theta_j)); }

ParamVec composite_score(const CompositeLikelihood& cl, const ParamVec& theta, const Dataset& y) {
    if (cl.score) {
        ParamVec s = cl.score(theta, y);
        for (std::size_t j = 0; j < s.size(); ++j)
            if (!std::isfinite(s[j]))
                throw EvaluationError("composite_score: non-finite closed-form score at coordinate " +
                                          std::to_string(j),
                                      j);
        return s;
    }
    const std::size_t d = cl.dim;
    ParamVec s(d);
    ParamVec shifted = theta;
    for (std::size_t j = 0; j < d; ++j) {
        const double h = fd_step(theta[j]);
        shifted[j] = theta[j] + h;
        const double up = cl.logcl(shifted, y);
        shifted[j] = theta[j] - h;
        const double down = cl.logcl(shifted, y);
        shifted[j] = theta[j];
        if (!std::isfinite(up) || !std::isfinite(down))
            throw EvaluationError("composite_score: non-finite logcl in stencil at coordinate " +
                                      std::to_string(j),
                                  j);
        s[j] = (up - down) / (2.0 * h);
    }
    return s;
}

namespace {

double inf_norm(const ParamVec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

// Finite-difference Jacobian of the score, column j = d score / d theta_j.
Matrix score_jacobian(const CompositeLikelihood& cl, const ParamVec& theta, const Dataset& y,
                      std::size_t* eval_count = nullptr) {
    const std::size_t d = cl.dim;
    Matrix K(d, d);
    ParamVec shifted = theta;
    for (std::size_t j = 0; j < d; ++j) {
        const double h = fd_step(theta[j]);
        shifted[j] = theta[j] + h;
        const ParamVec up = composite_score(cl, shifted, y);
        shifted[j] = theta[j] - h;
        const ParamVec down = composite_score(cl, shifted, y);
        shifted[j] = theta[j];
        for (std::size_t i = 0; i < d; ++i) K(i, j) = (up[i] - down[i]) / (2.0 * h);
        if (eval_count) *eval_count += cl.score ? 2 : 4 * d;
    }
    return K;
}

struct Objective {
    const CompositeLikelihood& cl;
    const Dataset& y;
    const std::function<bool(const ParamVec&)>& in_support;
    std::size_t evals = 0;

    double operator()(const ParamVec& theta) {
        ++evals;
        if (in_support && !in_support(theta)) return 1e300;
        const double v = cl.logcl(theta, y);
        return std::isfinite(v) ? -v : 1e300;
    }
};

// Standard Nelder-Mead on the negated composite log-likelihood.
ParamVec nelder_mead(Objective& f, const ParamVec& init, double step_scale,
                     std::size_t max_evals) {
    const std::size_t d = init.size();
    std::vector<ParamVec> x(d + 1, init);
    std::vector<double> fx(d + 1);
    for (std::size_t j = 0; j < d; ++j) x[j + 1][j] += step_scale * std::max(1.0, std::abs(init[j]));
    for (std::size_t i = 0; i <= d; ++i) fx[i] = f(x[i]);

    std::vector<std::size_t> order(d + 1);
    while (f.evals < max_evals) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        const std::size_t best = order[0], worst = order[d], second = order[d - 1];
        if (std::abs(fx[worst] - fx[best]) < 1e-12 * (1.0 + std::abs(fx[best]))) break;

        ParamVec centroid(d, 0.0);
        for (std::size_t i = 0; i <= d; ++i)
            if (i != worst)
                for (std::size_t j = 0; j < d; ++j) centroid[j] += x[i][j] / static_cast<double>(d);

        auto blend = [&](double t) {
            ParamVec p(d);
            for (std::size_t j = 0; j < d; ++j) p[j] = centroid[j] + t * (centroid[j] - x[worst][j]);
            return p;
        };

        const ParamVec xr = blend(1.0);
        const double fr = f(xr);
        if (fr < fx[order[0]]) {
            const ParamVec xe = blend(2.0);
            const double fe = f(xe);
            if (fe < fr) {
                x[worst] = xe;
                fx[worst] = fe;
            } else {
                x[worst] = xr;
                fx[worst] = fr;
            }
        } else if (fr < fx[second]) {
            x[worst] = xr;
            fx[worst] = fr;
        } else {
            const bool outside = fr < fx[worst];
            const ParamVec xc = blend(outside ? 0.5 : -0.5);
            const double fc = f(xc);
            if (fc < std::min(fr, fx[worst])) {
                x[worst] = xc;
                fx[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= d; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < d; ++j) x[i][j] = 0.5 * (x[i][j] + x[best][j]);
                    fx[i] = f(x[i]);
                }
            }
        }
    }
    const std::size_t best =
        static_cast<std::size_t>(std::min_element(fx.begin(), fx.end()) - fx.begin());
    return x[best];
}

}  // namespace

ParamVec solve_mcle(const CompositeLikelihood& cl, const Dataset& y, const ParamVec& init,
                    const std::function<bool(const ParamVec&)>& in_support,
                    const McleOptions& options) {
    Objective f{cl, y, in_support};
    if (f(init) >= 1e300) throw DomainError("solve_mcle: init outside support");

    auto score_norm = [&](const ParamVec& theta) -> double {
        f.evals += cl.score ? 1 : 2 * cl.dim;
        return inf_norm(composite_score(cl, theta, y));
    };

    const double init_norm = score_norm(init);
    const double tol = options.tol_factor * (1.0 + init_norm);

    ParamVec best = init;
    double best_norm = init_norm;
    if (best_norm < tol) return best;

    ParamVec theta = nelder_mead(f, init, options.simplex_step, options.max_evaluations * 3 / 4);
    try {
        const double nm_norm = score_norm(theta);
        if (nm_norm < best_norm) {
            best = theta;
            best_norm = nm_norm;
        }
    } catch (const EvaluationError&) {
        theta = best;
    }

    // Newton polish on the score root, damped on the score norm.
    ParamVec current = best;
    double current_norm = best_norm;
    for (int iter = 0; iter < 50 && f.evals < options.max_evaluations; ++iter) {
        if (current_norm < tol) return current;
        Matrix K;
        ParamVec s;
        try {
            s = composite_score(cl, current, y);
            K = score_jacobian(cl, current, y, &f.evals);
        } catch (const EvaluationError&) {
            break;
        }
        ParamVec delta;
        try {
            ParamVec rhs = s;
            for (double& v : rhs) v = -v;
            delta = lu_solve(K, rhs);
        } catch (const DecompositionError&) {
            break;
        }
        bool improved = false;
        double scale = 1.0;
        for (int halvings = 0; halvings < 30; ++halvings, scale *= 0.5) {
            ParamVec trial = current;
            for (std::size_t j = 0; j < trial.size(); ++j) trial[j] += scale * delta[j];
            if (in_support && !in_support(trial)) continue;
            double trial_norm;
            try {
                trial_norm = score_norm(trial);
            } catch (const EvaluationError&) {
                continue;
            }
            if (trial_norm < current_norm) {
                current = trial;
                current_norm = trial_norm;
                improved = true;
                break;
            }
        }
        if (current_norm < best_norm) {
            best = current;
            best_norm = current_norm;
        }
        if (!improved) break;
    }
    if (best_norm < tol) return best;
    throw ConvergenceError("solve_mcle: no convergence after " + std::to_string(f.evals) +
                               " evaluations (score norm " + std::to_string(best_norm) + ")",
                           best, best_norm);
}

namespace {

Matrix symmetrized(const Matrix& a) {
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
    return out;
}

Matrix score_covariance(const std::vector<ParamVec>& scores, const ParamVec& mean) {
    const std::size_t d = mean.size();
    const std::size_t r = scores.size();
    Matrix J(d, d);
    for (const auto& s : scores)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j) J(i, j) += (s[i] - mean[i]) * (s[j] - mean[j]);
    for (std::size_t i = 0; i < d * d; ++i) J.data()[i] /= static_cast<double>(r - 1);
    return J;
}

double omega_from(const Matrix& H, const Matrix& J) {
    return trace(lu_solve(H, J)) / static_cast<double>(J.rows());
}

}  // namespace

GodambeEstimate estimate_HJ(const ModelSpec& model, const CompositeLikelihood& cl,
                            const ParamVec& theta, std::size_t R, const RngStream& rng,
                            std::size_t n_workers) {
    if (R < 100) throw DomainError("estimate_HJ: R must be >= 100");
    const std::size_t d = cl.dim;

    std::vector<ParamVec> scores(R);
    std::vector<Matrix> jacobians(R);
    parallel_for(R, n_workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t r = b; r < e; ++r) {
            RngStream sub = rng.substream(r);
            const Dataset y = model.simulate(theta, sub);
            scores[r] = composite_score(cl, theta, y);
            jacobians[r] = score_jacobian(cl, theta, y);
        }
    });

    ParamVec mean_score(d, 0.0);
    for (const auto& s : scores)
        for (std::size_t j = 0; j < d; ++j) mean_score[j] += s[j] / static_cast<double>(R);

    GodambeEstimate est;
    est.theta = theta;
    est.replications = R;
    est.J = symmetrized(score_covariance(scores, mean_score));

    Matrix H(d, d);
    std::vector<Matrix> H_r(R);
    for (std::size_t r = 0; r < R; ++r) {
        H_r[r] = symmetrized(-1.0 * jacobians[r]);
        H = H + H_r[r];
    }
    H = (1.0 / static_cast<double>(R)) * H;
    est.H = H;

    try {
        est.B_c = cholesky(est.J);
    } catch (const DecompositionError& e) {
        throw EstimationError(std::string("estimate_HJ: J not positive definite (") + e.what() +
                              "); increase R");
    }

    Matrix JinvH;
    try {
        JinvH = solve_spd(est.J, est.H);
        est.G = symmetrized(matmul(est.H, JinvH));
        const Matrix HinvJ = lu_solve(est.H, est.J);
        est.V = symmetrized(lu_solve(est.H, transpose(HinvJ)));
        est.omega_bar = trace(HinvJ) / static_cast<double>(d);
    } catch (const DecompositionError& e) {
        throw EstimationError(std::string("estimate_HJ: derived matrices failed (") + e.what() +
                              "); increase R");
    }

    // Per-entry Monte Carlo standard errors.
    est.mc_se_H = Matrix(d, d);
    est.mc_se_J = Matrix(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double vh = 0.0, vj = 0.0;
            for (std::size_t r = 0; r < R; ++r) {
                const double dh = H_r[r](i, j) - est.H(i, j);
                const double cj =
                    (scores[r][i] - mean_score[i]) * (scores[r][j] - mean_score[j]) - est.J(i, j);
                vh += dh * dh;
                vj += cj * cj;
            }
            est.mc_se_H(i, j) = std::sqrt(vh / (R - 1.0) / R);
            est.mc_se_J(i, j) = std::sqrt(vj / (R - 1.0) / R);
        }

    est.hj_gap = frobenius_norm(est.H - est.J) / frobenius_norm(est.J);

    // Batch means for the standard errors of omega_bar and the H-J gap.
    const std::size_t n_batches = 10;
    const std::size_t per_batch = R / n_batches;
    std::vector<double> omega_b, gap_b;
    for (std::size_t b = 0; b < n_batches; ++b) {
        const std::size_t lo = b * per_batch;
        const std::size_t hi = (b + 1 == n_batches) ? R : lo + per_batch;
        std::vector<ParamVec> batch_scores(scores.begin() + lo, scores.begin() + hi);
        ParamVec bm(d, 0.0);
        for (const auto& s : batch_scores)
            for (std::size_t j = 0; j < d; ++j) bm[j] += s[j] / static_cast<double>(hi - lo);
        Matrix Jb = score_covariance(batch_scores, bm);
        Matrix Hb(d, d);
        for (std::size_t r = lo; r < hi; ++r) Hb = Hb + H_r[r];
        Hb = (1.0 / static_cast<double>(hi - lo)) * Hb;
        try {
            omega_b.push_back(omega_from(Hb, Jb));
            gap_b.push_back(frobenius_norm(Hb - Jb) / frobenius_norm(Jb));
        } catch (const DecompositionError&) {
            // skip degenerate batch
        }
    }
    auto batch_se = [](const std::vector<double>& v) {
        if (v.size() < 3) return std::numeric_limits<double>::quiet_NaN();
        double m = 0.0;
        for (double x : v) m += x / static_cast<double>(v.size());
        double s2 = 0.0;
        for (double x : v) s2 += (x - m) * (x - m);
        return std::sqrt(s2 / (v.size() - 1.0) / v.size());
    };
    est.omega_bar_se = batch_se(omega_b);
    est.hj_gap_se = batch_se(gap_b);
    return est;
}

ParamVec rescaled_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                        const Dataset& y) {
    const ParamVec s = composite_score(cl, est.theta, y);
    return forward_subst(est.B_c, s);
}

ParamVec adjusted_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                        const Dataset& y) {
    const ParamVec s = composite_score(cl, est.theta, y);
    return matvec(est.H, solve_spd(est.J, s));
}

ParamVec rescaled_adjusted_score(const GodambeEstimate& est, const CompositeLikelihood& cl,
                                 const Dataset& y) {
    const ParamVec g = adjusted_score(est, cl, y);
    // B_g = H (B_c^T)^{-1}: form it explicitly and solve the general system.
    const std::size_t d = g.size();
    Matrix BcT_inv = Matrix::identity(d);
    for (std::size_t j = 0; j < d; ++j) {
        auto col = back_subst_transposed(est.B_c, BcT_inv.col(j));
        for (std::size_t i = 0; i < d; ++i) BcT_inv(i, j) = col[i];
    }
    const Matrix B_g = matmul(est.H, BcT_inv);
    return lu_solve(B_g, g);
}

double calibration_weight(const GodambeEstimate& est) {
    try {
        return omega_from(est.H, est.J);
    } catch (const DecompositionError& e) {
        throw EstimationError(std::string("calibration_weight: H is singular (") + e.what() + ")");
    }
}

}  // namespace abccs
