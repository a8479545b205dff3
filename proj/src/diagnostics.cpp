#include "abccs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "abccs/models/smith.hpp"
#include "abccs/normal.hpp"
#include "abccs/parallel.hpp"

namespace abccs {

namespace {

struct WeightedColumn {
    std::vector<double> values;
    std::vector<double> weights;  // normalized

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * values[i];
        return m;
    }
    double sd() const {
        const double m = mean();
        double v = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i)
            v += weights[i] * (values[i] - m) * (values[i] - m);
        return std::sqrt(v);
    }
    /// Weighted empirical quantile: smallest value with cumulative weight >= p.
    double quantile(double p) const {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        double acc = 0.0;
        for (std::size_t idx : order) {
            acc += weights[idx];
            if (acc >= p - 1e-15) return values[idx];
        }
        return values[order.back()];
    }
};

WeightedColumn column_of(const WeightedSample& sample, std::size_t component) {
    WeightedColumn col;
    col.values = sample.draws.col(component);
    col.weights = sample.weights;
    return col;
}

}  // namespace

PosteriorSummary summarize(const WeightedSample& sample, const std::vector<std::string>& names) {
    if (sample.size() == 0) throw EmptySampleError("summarize: empty sample");
    PosteriorSummary out;
    double sumsq = 0.0;
    for (double w : sample.weights) sumsq += w * w;
    out.ess = 1.0 / sumsq;
    for (std::size_t j = 0; j < sample.dim(); ++j) {
        const WeightedColumn col = column_of(sample, j);
        ParamSummary ps;
        ps.name = j < names.size() ? names[j] : "param" + std::to_string(j);
        ps.mean = col.mean();
        ps.sd = col.sd();
        ps.q025 = col.quantile(0.025);
        ps.median = col.quantile(0.5);
        ps.q975 = col.quantile(0.975);
        out.params.push_back(ps);
    }
    return out;
}

std::pair<double, double> weighted_mean_se(const WeightedSample& sample, std::size_t component) {
    const WeightedColumn col = column_of(sample, component);
    const double m = col.mean();
    double v = 0.0;
    for (std::size_t i = 0; i < col.values.size(); ++i) {
        const double d = col.values[i] - m;
        v += col.weights[i] * col.weights[i] * d * d;
    }
    return {m, std::sqrt(v)};
}

double kl_divergence_1d(const models::DensityTable& reference, const WeightedSample& sample,
                        std::size_t component) {
    if (sample.size() == 0) throw EmptySampleError("kl_divergence_1d: empty sample");
    const WeightedColumn col = column_of(sample, component);
    const double sd = col.sd();
    if (!(sd > 0.0)) throw DomainError("kl_divergence_1d: zero-variance sample");

    // Silverman bandwidth on the weighted sample, with ESS as the sample size.
    const double iqr = col.quantile(0.75) - col.quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    double ess = 0.0;
    for (double w : col.weights) ess += w * w;
    ess = 1.0 / ess;
    const double bw = 0.9 * spread * std::pow(ess, -0.2);

    const std::size_t g = reference.grid.size();
    std::vector<double> kde(g, 0.0);
    for (std::size_t i = 0; i < col.values.size(); ++i) {
        const double x = col.values[i], w = col.weights[i];
        for (std::size_t j = 0; j < g; ++j)
            kde[j] += w * std_normal_pdf((reference.grid[j] - x) / bw) / bw;
    }

    double kl = 0.0;
    for (std::size_t j = 0; j < g; ++j) {
        const double p = reference.density[j];
        if (p <= 0.0) continue;
        const double q = std::max(kde[j], 1e-12);
        const double step_w = (j == 0 || j + 1 == g) ? 0.5 : 1.0;
        kl += step_w * p * std::log(p / q);
    }
    const double dx = reference.grid[1] - reference.grid[0];
    return kl * dx;
}

StudyResult run_study(const StudyConfig& config) {
    if (config.methods.size() != config.method_names.size())
        throw ConfigError("run_study: method/name count mismatch");
    StudyResult result;
    result.method_names = config.method_names;
    result.true_theta = config.true_theta;
    result.seed = config.seed;
    result.trials.resize(config.n_trials);

    parallel_for(config.n_trials, config.n_workers, [&](std::size_t b, std::size_t e) {
        for (std::size_t t = b; t < e; ++t) {
            StudyResult::Trial& trial = result.trials[t];
            trial.stream_base = static_cast<std::uint64_t>(t) * kStudyTrialStride;
            RngStream data_rng(config.seed, trial.stream_base);
            Dataset y_obs;
            try {
                y_obs = config.simulate(config.true_theta, data_rng);
            } catch (const std::exception& ex) {
                trial.errors.assign(config.methods.size(), std::string("simulate: ") + ex.what());
                trial.method_means.resize(config.methods.size());
                continue;
            }
            for (std::size_t k = 0; k < config.methods.size(); ++k) {
                RngStream method_rng(config.seed,
                                     trial.stream_base + 1 + static_cast<std::uint64_t>(k) *
                                                                 kStudyMethodStride);
                trial.method_means.emplace_back();
                trial.errors.emplace_back();
                try {
                    const WeightedSample ws = config.methods[k](y_obs, method_rng);
                    ParamVec mean(ws.dim(), 0.0);
                    for (std::size_t r = 0; r < ws.size(); ++r)
                        for (std::size_t j = 0; j < ws.dim(); ++j)
                            mean[j] += ws.weights[r] * ws.draws(r, j);
                    trial.method_means.back() = std::move(mean);
                } catch (const std::exception& ex) {
                    trial.errors.back() = ex.what();
                }
            }
        }
    });
    return result;
}

ExtremalCurve extremal_curve(const std::vector<Matrix>& sigma_draws,
                             const std::vector<double>& weights,
                             const std::vector<std::array<double, 2>>& h_values) {
    if (sigma_draws.empty()) throw DomainError("extremal_curve: no Sigma draws");
    if (!weights.empty() && weights.size() != sigma_draws.size())
        throw DomainError("extremal_curve: weight count mismatch");

    ExtremalCurve curve;
    std::vector<std::size_t> valid;
    for (std::size_t i = 0; i < sigma_draws.size(); ++i) {
        const Matrix& s = sigma_draws[i];
        if (s(0, 0) > 0.0 && s(1, 1) > 0.0 && s(0, 0) * s(1, 1) - s(0, 1) * s(1, 0) > 0.0)
            valid.push_back(i);
        else
            ++curve.skipped_draws;
    }
    if (valid.empty()) throw DomainError("extremal_curve: no positive definite draws");

    WeightedColumn col;
    col.values.resize(valid.size());
    col.weights.resize(valid.size());
    double total = 0.0;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        col.weights[i] = weights.empty() ? 1.0 : weights[valid[i]];
        total += col.weights[i];
    }
    for (double& w : col.weights) w /= total;

    for (const auto& h : h_values) {
        for (std::size_t i = 0; i < valid.size(); ++i)
            col.values[i] = models::sm_extremal_coeff(h, sigma_draws[valid[i]]);
        ExtremalCurvePoint pt;
        pt.distance = std::sqrt(h[0] * h[0] + h[1] * h[1]);
        pt.mean = col.mean();
        pt.q025 = col.quantile(0.025);
        pt.median = col.quantile(0.5);
        pt.q975 = col.quantile(0.975);
        curve.points.push_back(pt);
    }
    return curve;
}

}  // namespace abccs
