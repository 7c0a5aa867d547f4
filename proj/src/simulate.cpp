#include "votesig/simulate.hpp"

#include <cmath>
#include <unordered_map>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"
#include "votesig/rng.hpp"

namespace votesig {

void validate(const SimConfig& cfg) {
    if (cfg.n_examples < 1) throw validation_error("simulation needs n_examples >= 1");
    if (cfg.repeat_depth < 1) throw validation_error("simulation needs repeat_depth >= 1");
}

double latent_quantile(const LatentLaw& law, double u) {
    struct Visitor {
        double u;
        double operator()(const DiscreteLaw& l) const {
            double acc = 0.0;
            for (const LawAtom& a : l.atoms) {
                acc += a.weight;
                if (u < acc) return a.q;
            }
            return l.atoms.back().q;
        }
        double operator()(const GridDensity& d) const {
            return d.pl().quantile(std::min(std::max(u, 0.0), 1.0));
        }
        double operator()(const HybridLaw& h) const {
            if (u < h.discrete_weight)
                return Visitor{h.discrete_weight > 0.0 ? u / h.discrete_weight : 0.0}(
                    h.discrete);
            const double rest = 1.0 - h.discrete_weight;
            return Visitor{rest > 0.0 ? (u - h.discrete_weight) / rest : 0.0}(h.density);
        }
    };
    return std::visit(Visitor{u}, law);
}

std::vector<double> sample_latents(const LatentLaw& law, const SimConfig& cfg) {
    validate(law);
    validate(cfg);
    std::vector<double> out;
    out.reserve(cfg.n_examples);
    for (std::size_t i = 0; i < cfg.n_examples; ++i) {
        SplitMix64 rng = substream(cfg.seed, i);
        out.push_back(latent_quantile(law, rng.next_double()));
    }
    return out;
}

GroupedSample simulate_counts(const LatentLaw& law, const SimConfig& cfg) {
    validate(law);
    validate(cfg);
    GroupedSample sample;
    sample.depth = cfg.repeat_depth;
    sample.counts.reserve(cfg.n_examples);
    for (std::size_t i = 0; i < cfg.n_examples; ++i) {
        SplitMix64 rng = substream(cfg.seed, i);
        const double q = latent_quantile(law, rng.next_double());
        sample.counts.push_back(rng.binomial(cfg.repeat_depth, q));
    }
    return sample;
}

McCurve mc_curve(const LatentLaw& law, std::int64_t n_max, const SimConfig& cfg) {
    validate(law);
    validate(cfg);
    if (n_max < 0 || n_max > 100000)
        throw validation_error("mc_curve n_max must lie in [0, 1e5]");

    const std::size_t levels = static_cast<std::size_t>(n_max) + 1;
    std::vector<double> hit(levels, 0.0);
    std::vector<double> rb_sum(levels, 0.0);
    std::vector<double> rb_sumsq(levels, 0.0);

    // Discrete laws repeat the same latent values, so the kernel column
    // P_0..P_n(q) is cached per distinct q.
    const bool cacheable = std::holds_alternative<DiscreteLaw>(law);
    std::unordered_map<double, std::vector<double>> cache;
    const auto kernel_column = [&](double q) -> const std::vector<double>& {
        static thread_local std::vector<double> scratch;
        if (cacheable) {
            auto it = cache.find(q);
            if (it != cache.end()) return it->second;
            std::vector<double> col(levels);
            for (std::size_t n = 0; n < levels; ++n)
                col[n] = majority_accuracy(q, static_cast<std::int64_t>(n));
            return cache.emplace(q, std::move(col)).first->second;
        }
        scratch.assign(levels, 0.0);
        for (std::size_t n = 0; n < levels; ++n)
            scratch[n] = majority_accuracy(q, static_cast<std::int64_t>(n));
        return scratch;
    };

    for (std::size_t i = 0; i < cfg.n_examples; ++i) {
        SplitMix64 rng = substream(cfg.seed, i);
        const double q = latent_quantile(law, rng.next_double());
        // One running sum over the vote prefix; no vote storage.
        std::int64_t correct = rng.bernoulli(q) ? 1 : 0;
        if (correct >= 1) hit[0] += 1.0;
        for (std::size_t n = 1; n < levels; ++n) {
            correct += rng.bernoulli(q) ? 1 : 0;
            correct += rng.bernoulli(q) ? 1 : 0;
            if (correct >= static_cast<std::int64_t>(n) + 1) hit[n] += 1.0;
        }
        const std::vector<double>& col = kernel_column(q);
        for (std::size_t n = 0; n < levels; ++n) {
            rb_sum[n] += col[n];
            rb_sumsq[n] += col[n] * col[n];
        }
    }

    const double n = static_cast<double>(cfg.n_examples);
    McCurve out;
    out.n_examples = cfg.n_examples;
    out.seed = cfg.seed;
    out.values.resize(levels);
    out.stderrs.resize(levels);
    out.rb_values.resize(levels);
    out.rb_stderrs.resize(levels);
    for (std::size_t k = 0; k < levels; ++k) {
        const double p = hit[k] / n;
        out.values[k] = p;
        out.stderrs[k] = std::sqrt(std::max(0.0, p * (1.0 - p) / n));
        const double m = rb_sum[k] / n;
        out.rb_values[k] = m;
        const double var =
            cfg.n_examples >= 2
                ? std::max(0.0, (rb_sumsq[k] - n * m * m) / (n - 1.0))
                : 0.0;
        out.rb_stderrs[k] = std::sqrt(var / n);
    }
    return out;
}

} // namespace votesig
