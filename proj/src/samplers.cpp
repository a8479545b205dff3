#include "abccs/samplers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>

#include "abccs/parallel.hpp"

namespace abccs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void validate_sample(WeightedSample& ws) {
    double total = 0.0;
    for (double w : ws.weights) total += w;
    if (!(total > 0.0)) throw EmptySampleError("weighted sample has zero total weight");
    for (double& w : ws.weights) w /= total;
}

WeightedSample gather_accepted(const Matrix& proposals, const std::vector<double>& dists,
                               const std::vector<double>& raw_weights, double epsilon) {
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < dists.size(); ++i)
        if (dists[i] <= epsilon && raw_weights[i] > 0.0) keep.push_back(i);
    WeightedSample ws;
    ws.draws = Matrix(keep.size(), proposals.cols());
    ws.weights.resize(keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r) {
        for (std::size_t j = 0; j < proposals.cols(); ++j) ws.draws(r, j) = proposals(keep[r], j);
        ws.weights[r] = raw_weights[keep[r]];
    }
    validate_sample(ws);
    return ws;
}

}  // namespace

double distance(const std::vector<double>& a, const std::vector<double>& b,
                const DistanceSpec& spec) {
    if (a.size() != b.size()) throw DomainError("distance: length mismatch");
    if (spec.kind == DistanceKind::l1) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
        return s;
    }
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    if (spec.precision_matrix) {
        const auto md = matvec(*spec.precision_matrix, diff);
        double q = 0.0;
        for (std::size_t i = 0; i < diff.size(); ++i) q += diff[i] * md[i];
        return std::sqrt(std::max(0.0, q));
    }
    double q = 0.0;
    for (double v : diff) q += v * v;
    return std::sqrt(q);
}

double select_epsilon(const std::vector<double>& distances, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("select_epsilon: alpha outside (0,1]");
    std::vector<double> finite;
    finite.reserve(distances.size());
    for (double d : distances)
        if (std::isfinite(d)) finite.push_back(d);
    if (finite.empty()) throw DomainError("select_epsilon: no finite distances");
    const auto k = static_cast<std::size_t>(
        std::ceil(alpha * static_cast<double>(finite.size())));
    const std::size_t idx = std::max<std::size_t>(1, k) - 1;
    std::nth_element(finite.begin(), finite.begin() + static_cast<std::ptrdiff_t>(idx),
                     finite.end());
    return finite[idx];
}

WeightedSample abc_reject(const PriorSampler& prior_sampler, const ModelSpec& model,
                          const SummaryFn& summary, const DistanceSpec& dist,
                          const std::vector<double>& target_obs, std::size_t n_proposals,
                          double alpha, const RngStream& rng, std::size_t n_workers) {
    if (n_proposals < 1) throw DomainError("abc_reject: n_proposals must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("abc_reject: alpha outside (0,1]");
    if (static_cast<double>(n_proposals) < 1.0 / alpha)
        throw DomainError("abc_reject: n_proposals < 1/alpha accepts nothing");

    Matrix proposals(n_proposals, model.dim());
    std::vector<double> dists(n_proposals);
    std::atomic<std::size_t> failures{0};
    parallel_for(n_proposals, n_workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            RngStream sub = rng.substream(i);
            const ParamVec theta = prior_sampler(sub);
            for (std::size_t j = 0; j < theta.size(); ++j) proposals(i, j) = theta[j];
            const Dataset y = model.simulate(theta, sub);
            try {
                const auto eta = summary(y);
                const double d = distance(eta, target_obs, dist);
                dists[i] = std::isfinite(d) ? d : kInf;
                if (!std::isfinite(d)) ++failures;
            } catch (const Error&) {
                dists[i] = kInf;
                ++failures;
            }
        }
    });

    const double epsilon = select_epsilon(dists, alpha);
    WeightedSample ws =
        gather_accepted(proposals, dists, std::vector<double>(n_proposals, 1.0), epsilon);
    ws.meta.seed = rng.seed();
    ws.meta.epsilon = epsilon;
    ws.meta.alpha = alpha;
    ws.meta.n_proposals = n_proposals;
    ws.meta.acceptance_rate = static_cast<double>(ws.size()) / static_cast<double>(n_proposals);
    ws.meta.n_summary_failures = failures.load();
    return ws;
}

WeightedSample abc_importance(const TProposal& proposal, const LogDensity& log_prior,
                              const ModelSpec& model, const SummaryFn& summary,
                              const DistanceSpec& dist, const std::vector<double>& target_obs,
                              std::size_t n_proposals, double alpha, const RngStream& rng,
                              std::size_t n_workers) {
    if (n_proposals < 1) throw DomainError("abc_importance: n_proposals must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("abc_importance: alpha outside (0,1]");
    const Matrix L = cholesky(proposal.scale_matrix);

    const std::size_t d = model.dim();
    Matrix proposals(n_proposals, d);
    std::vector<double> dists(n_proposals, kInf);
    std::vector<double> raw_weights(n_proposals, 0.0);
    std::atomic<std::size_t> failures{0};
    std::atomic<std::size_t> in_support_count{0};

    parallel_for(n_proposals, n_workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i) {
            RngStream sub = rng.substream(i);
            std::vector<double> z = draw_mv_normal(sub, std::vector<double>(d, 0.0), L);
            const double t_scale =
                std::sqrt(static_cast<double>(proposal.df) / sub.chi_squared(proposal.df));
            ParamVec theta = proposal.location;
            for (std::size_t j = 0; j < d; ++j) theta[j] += t_scale * z[j];
            for (std::size_t j = 0; j < d; ++j) proposals(i, j) = theta[j];

            const double lp = log_prior(theta);
            if (!std::isfinite(lp)) continue;  // outside prior support: weight 0, no distance
            ++in_support_count;
            raw_weights[i] =
                std::exp(lp - mv_student_t_logpdf(theta, proposal.df, proposal.location, L));
            const Dataset y = model.simulate(theta, sub);
            try {
                const auto eta = summary(y);
                const double dd = distance(eta, target_obs, dist);
                dists[i] = std::isfinite(dd) ? dd : kInf;
                if (!std::isfinite(dd)) ++failures;
            } catch (const Error&) {
                dists[i] = kInf;
                ++failures;
            }
        }
    });

    if (in_support_count.load() == 0)
        throw EmptySampleError("abc_importance: every proposal fell outside the prior support");

    const double epsilon = select_epsilon(dists, alpha);
    WeightedSample ws = gather_accepted(proposals, dists, raw_weights, epsilon);
    ws.meta.seed = rng.seed();
    ws.meta.epsilon = epsilon;
    ws.meta.alpha = alpha;
    ws.meta.n_proposals = n_proposals;
    ws.meta.acceptance_rate = static_cast<double>(ws.size()) / static_cast<double>(n_proposals);
    ws.meta.n_summary_failures = failures.load();
    return ws;
}

WeightedSample resample(const WeightedSample& ws, std::size_t m_out, RngStream& rng) {
    if (m_out < 1) throw DomainError("resample: m_out must be >= 1");
    if (ws.size() == 0) throw EmptySampleError("resample: empty input");
    std::vector<double> cumulative(ws.weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < ws.weights.size(); ++i) {
        acc += ws.weights[i];
        cumulative[i] = acc;
    }
    cumulative.back() = 1.0;

    WeightedSample out;
    out.draws = Matrix(m_out, ws.dim());
    out.weights.assign(m_out, 1.0 / static_cast<double>(m_out));
    out.meta = ws.meta;
    for (std::size_t r = 0; r < m_out; ++r) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - cumulative.begin()), ws.size() - 1);
        for (std::size_t j = 0; j < ws.dim(); ++j) out.draws(r, j) = ws.draws(idx, j);
    }
    return out;
}

WeightedSample rw_metropolis(const LogDensity& log_target, const ParamVec& init,
                             const Matrix& proposal_scale, std::size_t n_iter,
                             std::size_t burn_in, RngStream& rng) {
    if (burn_in >= n_iter) throw DomainError("rw_metropolis: burn_in >= n_iter");
    double current_lp = log_target(init);
    if (!std::isfinite(current_lp))
        throw DomainError("rw_metropolis: log target not finite at init");
    const Matrix L = cholesky(proposal_scale);
    const std::size_t d = init.size();

    WeightedSample out;
    out.draws = Matrix(n_iter - burn_in, d);
    out.weights.assign(n_iter - burn_in, 1.0 / static_cast<double>(n_iter - burn_in));

    ParamVec current = init;
    std::size_t accepted = 0;
    for (std::size_t it = 0; it < n_iter; ++it) {
        const ParamVec candidate = draw_mv_normal(rng, current, L);
        const double cand_lp = log_target(candidate);
        const double log_u = std::log(rng.uniform_open());
        if (std::isfinite(cand_lp) && log_u <= cand_lp - current_lp) {
            current = candidate;
            current_lp = cand_lp;
            ++accepted;
        }
        if (it >= burn_in)
            for (std::size_t j = 0; j < d; ++j) out.draws(it - burn_in, j) = current[j];
    }
    out.meta.seed = rng.seed();
    out.meta.n_proposals = n_iter;
    out.meta.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(n_iter);
    return out;
}

}  // namespace abccs
