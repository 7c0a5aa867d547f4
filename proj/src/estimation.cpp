#include "votesig/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "votesig/errors.hpp"
#include "votesig/kernel.hpp"

namespace votesig {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// (c)_l / (J)_l with falling factorials.  Exact integer products cover
// J <= 60; log-domain beyond, where the products would overflow.
double falling_ratio(int c, int j, int l) {
    if (l == 0) return 1.0;
    if (c < l) return 0.0;
    if (j <= 60) {
        double num = 1.0, den = 1.0;
        for (int i = 0; i < l; ++i) {
            num *= static_cast<double>(c - i);
            den *= static_cast<double>(j - i);
        }
        return num / den;
    }
    double acc = 0.0;
    for (int i = 0; i < l; ++i)
        acc += std::log(static_cast<double>(c - i)) -
               std::log(static_cast<double>(j - i));
    return std::exp(acc);
}

// Per-count transformed vector T_k(c), k = 0..L:
//   T_k(c) = sum_l (-1)^l C(k,l) { 2 f_{k+l+1}(c) - f_{k+l}(c) },
// whose population mean is the signed moment s_k.
std::vector<double> transformed_vector(int c, int j, int prefix_len) {
    std::vector<double> t(static_cast<std::size_t>(prefix_len));
    for (int k = 0; k < prefix_len; ++k) {
        double acc = 0.0;
        for (int l = 0; l <= k; ++l) {
            const double coeff = binomial(k, l);
            const double term = 2.0 * falling_ratio(c, j, k + l + 1) -
                                falling_ratio(c, j, k + l);
            acc += (l % 2 == 0 ? coeff : -coeff) * term;
        }
        t[static_cast<std::size_t>(k)] = acc;
    }
    return t;
}

std::vector<std::size_t> count_histogram(const GroupedSample& sample) {
    std::vector<std::size_t> hist(static_cast<std::size_t>(sample.depth) + 1, 0);
    for (int c : sample.counts) ++hist[static_cast<std::size_t>(c)];
    return hist;
}

MomentPrefix prefix_from_weights(const std::vector<double>& weights, int depth,
                                 std::size_t n_examples, bool sample_covariance) {
    const int prefix_len = (depth - 1) / 2 + 1;
    std::vector<std::vector<double>> t_by_count;
    t_by_count.reserve(weights.size());
    for (int c = 0; c < static_cast<int>(weights.size()); ++c)
        t_by_count.push_back(transformed_vector(c, depth, prefix_len));

    MomentPrefix out;
    out.depth = depth;
    out.n_examples = n_examples;
    out.s.assign(static_cast<std::size_t>(prefix_len), 0.0);
    for (std::size_t c = 0; c < weights.size(); ++c)
        for (int k = 0; k < prefix_len; ++k)
            out.s[static_cast<std::size_t>(k)] += weights[c] * t_by_count[c][static_cast<std::size_t>(k)];

    // Covariance of the transformed vector; for finite samples the unbiased
    // N-1 form, then scaled by 1/N to give the estimator covariance.
    out.covariance.assign(static_cast<std::size_t>(prefix_len),
                          std::vector<double>(static_cast<std::size_t>(prefix_len), 0.0));
    for (std::size_t c = 0; c < weights.size(); ++c) {
        if (weights[c] == 0.0) continue;
        for (int a = 0; a < prefix_len; ++a)
            for (int b = 0; b < prefix_len; ++b)
                out.covariance[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] +=
                    weights[c] *
                    (t_by_count[c][static_cast<std::size_t>(a)] - out.s[static_cast<std::size_t>(a)]) *
                    (t_by_count[c][static_cast<std::size_t>(b)] - out.s[static_cast<std::size_t>(b)]);
    }
    if (sample_covariance) {
        const double n = static_cast<double>(n_examples);
        const double factor = n_examples >= 2 ? n / ((n - 1.0) * n) : 0.0;
        for (auto& row : out.covariance)
            for (double& v : row) v *= factor;
    }
    return out;
}

} // namespace

void validate(const GroupedSample& sample) {
    if (sample.depth < 1)
        throw validation_error("repeat depth must be >= 1, got " +
                               std::to_string(sample.depth));
    if (sample.counts.empty()) throw validation_error("grouped sample has no counts");
    for (int c : sample.counts)
        if (c < 0 || c > sample.depth)
            throw validation_error("count " + std::to_string(c) +
                                   " outside [0, depth=" + std::to_string(sample.depth) +
                                   "]");
}

double factorial_moment(const GroupedSample& sample, int l) {
    validate(sample);
    if (l < 0 || l > sample.depth)
        throw validation_error("factorial moment order " + std::to_string(l) +
                               " outside [0, depth=" + std::to_string(sample.depth) +
                               "]");
    if (l == 0) return 1.0;
    const std::vector<std::size_t> hist = count_histogram(sample);
    double acc = 0.0;
    for (int c = 0; c <= sample.depth; ++c)
        if (hist[static_cast<std::size_t>(c)] > 0)
            acc += static_cast<double>(hist[static_cast<std::size_t>(c)]) *
                   falling_ratio(c, sample.depth, l);
    return acc / static_cast<double>(sample.counts.size());
}

MomentPrefix signed_prefix(const GroupedSample& sample) {
    validate(sample);
    const std::vector<std::size_t> hist = count_histogram(sample);
    const double n = static_cast<double>(sample.counts.size());
    std::vector<double> weights(hist.size());
    for (std::size_t c = 0; c < hist.size(); ++c)
        weights[c] = static_cast<double>(hist[c]) / n;
    return prefix_from_weights(weights, sample.depth, sample.counts.size(), true);
}

MomentPrefix signed_prefix_from_pmf(const std::vector<double>& pmf, int depth) {
    if (depth < 1) throw validation_error("repeat depth must be >= 1");
    if (pmf.size() != static_cast<std::size_t>(depth) + 1)
        throw validation_error("pmf must have depth+1 entries");
    double total = 0.0;
    for (double p : pmf) {
        if (!(p >= -1e-15)) throw validation_error("pmf entry negative: " + fmt(p));
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-10)
        throw validation_error("pmf sums to " + fmt(total) + ", expected 1");
    return prefix_from_weights(pmf, depth, 0, false);
}

std::vector<std::pair<int, double>> prefix_to_increments(const MomentPrefix& prefix) {
    if (prefix.s.size() < 2)
        throw validation_error("prefix too short for increments (need s_0, s_1)");
    std::vector<std::pair<int, double>> out;
    for (std::size_t k = 1; k < prefix.s.size(); ++k)
        out.emplace_back(static_cast<int>(k),
                         binomial(2 * static_cast<std::int64_t>(k) - 1,
                                  static_cast<std::int64_t>(k)) *
                             prefix.s[k]);
    return out;
}

SignedSignature plugin_signature(const GroupedSample& sample) {
    validate(sample);
    const std::vector<std::size_t> hist = count_histogram(sample);
    const double n = static_cast<double>(sample.counts.size());
    std::vector<SignatureAtom> atoms;
    for (int c = 0; c <= sample.depth; ++c) {
        if (hist[static_cast<std::size_t>(c)] == 0) continue;
        const double q = static_cast<double>(c) / sample.depth;
        atoms.push_back({q * (1.0 - q), (2.0 * q - 1.0) *
                                            static_cast<double>(hist[static_cast<std::size_t>(c)]) /
                                            n});
    }
    return make_signature(std::move(atoms));
}

std::vector<double> count_pmf(const DiscreteLaw& law, int depth) {
    validate(law);
    if (depth < 1) throw validation_error("repeat depth must be >= 1");
    std::vector<double> pmf(static_cast<std::size_t>(depth) + 1, 0.0);
    for (const LawAtom& a : law.atoms) {
        for (int c = 0; c <= depth; ++c) {
            const double term = binomial(depth, c) *
                                std::pow(a.q, static_cast<double>(c)) *
                                std::pow(1.0 - a.q, static_cast<double>(depth - c));
            pmf[static_cast<std::size_t>(c)] += a.weight * term;
        }
    }
    return pmf;
}

NonidentPair nonident_pair(int depth) {
    if (depth < 1)
        throw validation_error("repeat depth must be >= 1, got " +
                               std::to_string(depth));
    const int n_points = depth + 2;
    const int k_witness = depth / 2 + 1;

    // Alternating-binomial nullspace of the Vandermonde system on equally
    // spaced points: the (J+1)-st divided difference annihilates every
    // polynomial of degree <= J.  A support interval symmetric about 1/2
    // makes the witness polynomial's pairing vanish identically (it is odd
    // about the threshold), so only asymmetric intervals are scanned, and
    // the one with the largest witness difference wins.
    const double intervals[][2] = {{0.10, 0.85}, {0.05, 0.95}, {0.08, 0.90},
                                   {0.01, 0.88}, {0.12, 0.99}, {0.05, 0.85},
                                   {0.02, 0.90}};

    const auto witness = [k_witness](double x) {
        return (2.0 * x - 1.0) *
               std::pow(x * (1.0 - x), static_cast<double>(k_witness));
    };

    double best_diff = -1.0;
    std::vector<double> best_points;
    std::vector<double> best_alpha;
    double best_eps = 0.0;

    for (const auto& iv : intervals) {
        std::vector<double> x(static_cast<std::size_t>(n_points));
        for (int i = 0; i < n_points; ++i)
            x[static_cast<std::size_t>(i)] =
                iv[0] + (iv[1] - iv[0]) * static_cast<double>(i) / (n_points - 1);
        std::vector<double> alpha(static_cast<std::size_t>(n_points));
        double max_abs = 0.0;
        for (int i = 0; i < n_points; ++i) {
            const double mag = binomial(n_points - 1, i);
            alpha[static_cast<std::size_t>(i)] =
                ((n_points - 1 - i) % 2 == 0 ? mag : -mag);
            max_abs = std::max(max_abs, mag);
        }
        for (double& a : alpha) a /= max_abs;

        const double base = 1.0 / n_points;
        const double eps = 0.5 * (base - 0.01); // keeps every weight >= 0.01
        if (eps <= 0.0) continue;
        double d = 0.0;
        for (int i = 0; i < n_points; ++i)
            d += alpha[static_cast<std::size_t>(i)] * witness(x[static_cast<std::size_t>(i)]);
        const double diff = 2.0 * eps * std::fabs(d);
        if (diff > best_diff) {
            best_diff = diff;
            best_points = x;
            best_alpha = alpha;
            best_eps = eps;
        }
    }

    if (best_diff < 1e-6) {
        std::string pts;
        for (double p : best_points) pts += " " + fmt(p);
        throw precision_error(
            "nonident_pair: witness moment difference " + fmt(best_diff) +
            " below 1e-6 at depth " + std::to_string(depth) + "; support points:" + pts);
    }

    const double base = 1.0 / n_points;
    std::vector<LawAtom> a1, a2;
    for (int i = 0; i < n_points; ++i) {
        a1.push_back({best_points[static_cast<std::size_t>(i)],
                      base + best_eps * best_alpha[static_cast<std::size_t>(i)]});
        a2.push_back({best_points[static_cast<std::size_t>(i)],
                      base - best_eps * best_alpha[static_cast<std::size_t>(i)]});
    }
    NonidentPair out;
    out.law1 = make_discrete(std::move(a1));
    out.law2 = make_discrete(std::move(a2));
    out.k_witness = k_witness;
    out.support = std::move(best_points);
    return out;
}

} // namespace votesig
