#include "ncvar/rollout.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ncvar/common.hpp"
#include "ncvar/distribution.hpp"
#include "ncvar/risk.hpp"
#include "ncvar/rng.hpp"

namespace ncvar {

SampledKernel sample_kernel(const Mdp& mdp, const AmbiguitySpec& ambiguity, std::uint64_t seed) {
    if (ambiguity.kind != AmbiguityKind::rn_fixed &&
        ambiguity.kind != AmbiguityKind::rn_decision_dependent &&
        ambiguity.kind != AmbiguityKind::none)
        throw ValidationError("kernel sampling needs a density-ratio ambiguity set");
    ambiguity.check(mdp);

    Rng rng(seed);
    SampledKernel kernel;
    kernel.probs.resize(std::size_t(mdp.n_states()));
    for (int x = 0; x < mdp.n_states(); ++x) {
        kernel.probs[std::size_t(x)].resize(std::size_t(mdp.n_actions(x)));
        for (int a = 0; a < mdp.n_actions(x); ++a) {
            const auto& row = mdp.transitions(x, a);
            const double cap_ratio = ambiguity.budget(x, a);
            auto& out = kernel.probs[std::size_t(x)][std::size_t(a)];
            out.resize(row.size());
            if (cap_ratio == 1.0) {
                // a unit cap admits only the nominal row
                for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j].prob;
                continue;
            }

            double cap_total = 0.0;
            for (const Transition& t : row) cap_total += t.prob * cap_ratio;
            if (cap_total < 1.0 - kMassTol)
                throw ValidationError("row caps cannot carry unit mass");

            // draw raw ratios, then repair the total by scaling down or by
            // water-filling the head-room up
            double total = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                out[j] = row[j].prob * rng.next_range(0.0, cap_ratio);
                total += out[j];
            }
            if (total >= 1.0) {
                for (double& q : out) q /= total;
            } else {
                double headroom = cap_total - total;
                const double deficit = 1.0 - total;
                if (headroom <= 0.0) throw ValidationError("row caps cannot carry unit mass");
                for (std::size_t j = 0; j < row.size(); ++j) {
                    const double room = row[j].prob * cap_ratio - out[j];
                    out[j] += deficit * room / headroom;
                }
                // sweep rounding into an uncapped entry
                double sum = std::accumulate(out.begin(), out.end(), 0.0);
                double residual = 1.0 - sum;
                for (std::size_t j = 0; j < row.size() && residual != 0.0; ++j) {
                    const double cap_j = row[j].prob * cap_ratio;
                    const double adjusted = std::clamp(out[j] + residual, 0.0, cap_j);
                    residual -= adjusted - out[j];
                    out[j] = adjusted;
                }
            }
        }
    }
    return kernel;
}

KernelSource KernelSource::sampled(const SampledKernel& k, std::uint64_t seed) {
    KernelSource source;
    source.kind = KernelKind::sampled;
    source.kernel = &k;
    source.descriptor = "sampled(" + std::to_string(seed) + ")";
    return source;
}

KernelSource KernelSource::adversarial() {
    KernelSource source;
    source.kind = KernelKind::adversarial;
    source.descriptor = "adversarial";
    return source;
}

namespace {

// categorical draw by CDF walk; the last positive entry absorbs rounding
std::size_t draw_index(std::span<const double> weights, double unit) {
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        acc += weights[j];
        last_positive = j;
        if (unit < acc) return j;
    }
    return last_positive;
}

bool absorbing_zero(const Mdp& mdp, int x, int action) {
    if (mdp.cost(x, action) != 0.0) return false;
    const auto& row = mdp.transitions(x, action);
    return row.size() == 1 && row[0].state == x;
}

} // namespace

RolloutReport run_rollout(const Mdp& mdp, const Policy& policy, const KernelSource& source,
                          int start, double alpha_start, const RolloutConfig& config) {
    if (config.episodes < 1) throw ValidationError("rollout needs at least one episode");
    if (config.horizon < 1) throw ValidationError("rollout needs a positive horizon");
    if (start < 0 || start >= mdp.n_states()) throw ValidationError("start state out of range");
    if (!(alpha_start > 0.0) || alpha_start > policy.grid().y_max())
        throw ValidationError("initial confidence level out of range");
    if (source.kind == KernelKind::sampled && source.kernel == nullptr)
        throw ValidationError("sampled kernel source without a kernel");
    const double tail = std::pow(mdp.gamma(), double(config.horizon)) * mdp.value_bound();
    if (!(tail < 1e-6))
        throw ValidationError("horizon too short: the truncated tail exceeds 1e-6");

    const Rng master(config.seed);
    const double y_lo = policy.grid().y_min();
    const double y_hi = policy.grid().y_max();

    RolloutReport report;
    report.n_episodes = config.episodes;
    report.horizon = config.horizon;
    report.alpha = alpha_start;
    report.kernel_descriptor = source.descriptor;
    report.cost_samples.resize(std::size_t(config.episodes));

    PolicyWorkspace ws;
    std::vector<double> adv_row;
    for (int e = 0; e < config.episodes; ++e) {
        Rng rng = master.split(std::uint64_t(e));
        int x = start;
        double y = alpha_start;
        double discount = 1.0;
        double total = 0.0;
        for (int t = 0; t < config.horizon; ++t) {
            const Policy::Decision d = policy.decide(x, y, ws);
            total += discount * mdp.cost(x, d.action);
            if (absorbing_zero(mdp, x, d.action)) break;

            const auto& row = mdp.transitions(x, d.action);
            std::size_t pick = 0;
            switch (source.kind) {
            case KernelKind::nominal: {
                ws.probs.resize(row.size());
                for (std::size_t j = 0; j < row.size(); ++j) ws.probs[j] = row[j].prob;
                pick = draw_index(ws.probs, rng.next_unit());
                break;
            }
            case KernelKind::sampled: {
                const auto& q = source.kernel->probs[std::size_t(x)][std::size_t(d.action)];
                pick = draw_index(q, rng.next_unit());
                break;
            }
            case KernelKind::adversarial: {
                adv_row.resize(row.size());
                for (std::size_t j = 0; j < row.size(); ++j)
                    adv_row[j] = row[j].prob * d.xi[j];
                pick = draw_index(adv_row, rng.next_unit());
                break;
            }
            }
            y = std::clamp(y * d.xi[pick], y_lo, y_hi);
            x = row[pick].state;
            discount *= mdp.gamma();
        }
        report.cost_samples[std::size_t(e)] = total;
    }

    const DiscreteDistribution empirical = DiscreteDistribution::empirical(report.cost_samples);
    report.empirical_mean = empirical.mean();
    report.empirical_cvar = cvar(empirical, alpha_start);
    return report;
}

double bootstrap_cvar_se(std::span<const double> samples, double alpha, int resamples,
                         std::uint64_t seed) {
    if (samples.empty()) throw ValidationError("bootstrap needs samples");
    if (resamples < 2) throw ValidationError("bootstrap needs at least two resamples");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const std::size_t n = sorted.size();

    Rng rng(seed);
    std::vector<int> counts(n, 0);
    std::vector<double> estimates(std::size_t(resamples), 0.0);
    for (int b = 0; b < resamples; ++b) {
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t k = 0; k < n; ++k) ++counts[rng.next_below(n)];
        // cvar of the resampled multiset: walk the sorted outcomes from the top
        double remaining = alpha;
        double acc = 0.0;
        for (std::size_t j = 0; j < n && remaining > 0.0; ++j) {
            if (counts[j] == 0) continue;
            const double mass = double(counts[j]) / double(n);
            const double take = std::min(mass, remaining);
            acc += take * sorted[j];
            remaining -= take;
        }
        estimates[std::size_t(b)] = acc / alpha;
    }
    const double mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) /
                        double(estimates.size());
    double var = 0.0;
    for (double v : estimates) var += (v - mean) * (v - mean);
    var /= double(estimates.size() - 1);
    return std::sqrt(var);
}

} // namespace ncvar
