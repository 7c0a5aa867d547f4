#include "votesig/plurality.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"
#include "votesig/rng.hpp"

namespace votesig {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double composition_count(int m, int k) {
    return std::exp(log_binomial(static_cast<std::int64_t>(m) + k - 1,
                                 static_cast<std::int64_t>(k) - 1));
}

// Depth-first enumeration of multinomial compositions with the
// log-probability accumulated incrementally per assigned class.
class ExactEnumerator {
public:
    ExactEnumerator(const std::vector<double>& p, int m)
        : p_(p), m_(m), counts_(p.size(), 0), lgamma_table_(m + 1) {
        for (int i = 0; i <= m; ++i)
            lgamma_table_[static_cast<std::size_t>(i)] =
                std::lgamma(static_cast<double>(i) + 1.0);
    }

    double run() {
        descend(0, m_, 0.0);
        return acc_;
    }

private:
    void descend(std::size_t cls, int remaining, double logp) {
        if (cls + 1 == p_.size()) {
            if (p_[cls] == 0.0 && remaining > 0) return;
            counts_[cls] = remaining;
            double full = logp + lgamma_table_[static_cast<std::size_t>(m_)] -
                          lgamma_table_[static_cast<std::size_t>(remaining)];
            if (remaining > 0) full += remaining * std::log(p_[cls]);
            tally(std::exp(full));
            return;
        }
        if (p_[cls] == 0.0) {
            counts_[cls] = 0;
            descend(cls + 1, remaining, logp);
            return;
        }
        const double logp_cls = std::log(p_[cls]);
        for (int c = 0; c <= remaining; ++c) {
            counts_[cls] = c;
            descend(cls + 1, remaining - c,
                    logp + c * logp_cls - lgamma_table_[static_cast<std::size_t>(c)]);
        }
    }

    void tally(double prob) {
        int best = counts_[0];
        int ties = 1;
        bool correct_in = true;
        for (std::size_t j = 1; j < counts_.size(); ++j) {
            if (counts_[j] > best) {
                best = counts_[j];
                ties = 1;
                correct_in = false;
            } else if (counts_[j] == best) {
                ++ties;
            }
        }
        if (correct_in) acc_ += prob / ties;
    }

    const std::vector<double>& p_;
    int m_;
    std::vector<int> counts_;
    std::vector<double> lgamma_table_;
    double acc_ = 0.0;
};

} // namespace

void validate(const CategoricalVector& vec) {
    if (vec.p.size() < 2)
        throw validation_error("categorical vector needs K >= 2 classes");
    double sum = 0.0;
    for (double pj : vec.p) {
        if (!(pj >= 0.0))
            throw validation_error("categorical probability negative: " + fmt(pj));
        sum += pj;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw validation_error("categorical probabilities sum to " + fmt(sum) +
                               ", expected 1");
}

double plurality_accuracy_exact(const CategoricalVector& vec, int m) {
    validate(vec);
    if (m < 1) throw validation_error("vote count m must be >= 1");
    const double states = composition_count(m, static_cast<int>(vec.p.size()));
    if (states > 1e7)
        throw validation_error(
            "exact plurality state space ~" + fmt(states) +
            " exceeds 1e7; use Monte Carlo mode");
    return ExactEnumerator(vec.p, m).run();
}

PluralityResult plurality_accuracy_mc(const CategoricalVector& vec, int m,
                                      const MonteCarloMode& mc) {
    validate(vec);
    if (m < 1) throw validation_error("vote count m must be >= 1");
    if (mc.reps < 2) throw validation_error("Monte Carlo needs >= 2 replicates");
    std::vector<double> cum(vec.p.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < vec.p.size(); ++j) {
        acc += vec.p[j];
        cum[j] = acc;
    }
    cum.back() = 1.0;

    std::vector<int> counts(vec.p.size());
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t rep = 0; rep < mc.reps; ++rep) {
        SplitMix64 rng = substream(mc.seed, rep);
        std::fill(counts.begin(), counts.end(), 0);
        for (int v = 0; v < m; ++v) {
            const double u = rng.next_double();
            const std::size_t j = static_cast<std::size_t>(
                std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
            ++counts[std::min(j, counts.size() - 1)];
        }
        int best = counts[0];
        int ties = 1;
        bool correct_in = true;
        for (std::size_t j = 1; j < counts.size(); ++j) {
            if (counts[j] > best) {
                best = counts[j];
                ties = 1;
                correct_in = false;
            } else if (counts[j] == best) {
                ++ties;
            }
        }
        const double x = correct_in ? 1.0 / ties : 0.0;
        sum += x;
        sum_sq += x * x;
    }
    const double n = static_cast<double>(mc.reps);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return PluralityResult{mean, std::sqrt(var / n), false, mc.reps};
}

PluralityResult plurality_accuracy(const CategoricalVector& vec, int m,
                                   const std::optional<MonteCarloMode>& mc) {
    if (mc) return plurality_accuracy_mc(vec, m, *mc);
    return PluralityResult{plurality_accuracy_exact(vec, m), 0.0, true, 0};
}

double plurality_endpoint(const CategoricalVector& vec) {
    validate(vec);
    double best = vec.p[0];
    for (double pj : vec.p) best = std::max(best, pj);
    int ties = 0;
    for (double pj : vec.p)
        if (pj == best) ++ties;
    return vec.p[0] == best ? 1.0 / ties : 0.0;
}

QNotEnoughWitness q_not_enough_witness(double q, int k) {
    if (!(q > 0.0 && q < 1.0))
        throw validation_error("witness needs q in (0,1), got " + fmt(q));
    if (k < 3) throw validation_error("witness needs K >= 3 classes");
    QNotEnoughWitness out;
    out.a_conc = q * q * q + 3.0 * q * q * (1.0 - q);
    out.a_diff = out.a_conc + 0.5 * q * (1.0 - q) * (1.0 - q);
    CategoricalVector conc{{q, 1.0 - q}};
    conc.p.resize(static_cast<std::size_t>(k), 0.0);
    CategoricalVector diff{{q, 0.5 * (1.0 - q), 0.5 * (1.0 - q)}};
    diff.p.resize(static_cast<std::size_t>(k), 0.0);
    out.endpoint_conc = plurality_endpoint(conc);
    out.endpoint_diff = plurality_endpoint(diff);
    return out;
}

namespace {

CategoricalVector symmetric_vector(double q, int k) {
    CategoricalVector vec;
    vec.p.assign(static_cast<std::size_t>(k), (1.0 - q) / (k - 1));
    vec.p[0] = q;
    return vec;
}

PluralityResult symmetric_accuracy(double q, int k, int m,
                                   const std::optional<MonteCarloMode>& mc,
                                   std::uint64_t stream_salt) {
    std::optional<MonteCarloMode> local = mc;
    if (local) local->seed = mix64(local->seed ^ stream_salt);
    return plurality_accuracy(symmetric_vector(q, k), m, local);
}

} // namespace

std::vector<PluralityResult> symmetric_wrong_curve(
    const LatentLaw& law, int k, const std::vector<int>& m_list,
    const std::optional<MonteCarloMode>& mc) {
    if (k < 2) throw validation_error("symmetric wrong-answer curve needs K >= 2");
    validate(law);
    std::vector<PluralityResult> out;
    out.reserve(m_list.size());
    for (std::size_t mi = 0; mi < m_list.size(); ++mi) {
        const int m = m_list[mi];
        struct Visitor {
            int k;
            int m;
            const std::optional<MonteCarloMode>& mc;
            std::uint64_t salt;
            PluralityResult operator()(const DiscreteLaw& l) const {
                double acc = 0.0, var = 0.0;
                bool exact = true;
                std::size_t reps = 0;
                std::uint64_t atom_id = 0;
                for (const LawAtom& a : l.atoms) {
                    const PluralityResult r =
                        symmetric_accuracy(a.q, k, m, mc, salt ^ (atom_id++ << 20));
                    acc += a.weight * r.accuracy;
                    var += a.weight * a.weight * r.stderr_value * r.stderr_value;
                    exact = exact && r.exact;
                    reps += r.reps;
                }
                return PluralityResult{acc, std::sqrt(var), exact, reps};
            }
            PluralityResult operator()(const GridDensity& d) const {
                // Quadrature nodes demand exact per-node accuracies; Monte
                // Carlo noise inside an integrand would not integrate away.
                std::uint64_t node_id = 0;
                double acc = d.pl().integrate_against(
                    [&](double q) {
                        return symmetric_accuracy(q, k, m, {}, salt ^ (node_id++ << 36))
                            .accuracy;
                    },
                    std::min(1.0 / 16.0, 0.25 / std::sqrt(static_cast<double>(m) + 1.0)));
                return PluralityResult{acc, 0.0, true, 0};
            }
            PluralityResult operator()(const HybridLaw& h) const {
                const PluralityResult disc = (*this)(h.discrete);
                const PluralityResult dens = (*this)(h.density);
                return PluralityResult{
                    h.discrete_weight * disc.accuracy +
                        (1.0 - h.discrete_weight) * dens.accuracy,
                    h.discrete_weight * disc.stderr_value, disc.exact && dens.exact,
                    disc.reps + dens.reps};
            }
        };
        out.push_back(std::visit(Visitor{k, m, mc, 0x5151u * (mi + 1)}, law));
    }
    return out;
}

} // namespace votesig
