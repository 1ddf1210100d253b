#include "deepmark/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deepmark {

namespace {

void split_scores(const std::vector<ScoredTrial>& trials, std::vector<double>& real_scores,
                  std::vector<double>& fake_scores) {
    for (const ScoredTrial& t : trials) {
        if (!std::isfinite(t.score))
            throw RangeViolation("metrics: non-finite score for " + t.utterance_id);
        (t.label == Label::Real ? real_scores : fake_scores).push_back(t.score);
    }
    if (real_scores.empty() || fake_scores.empty())
        throw OneClassOnly("metrics: need at least one real and one fake trial");
}

} // namespace

std::pair<double, double> far_frr_at(double tau, const std::vector<ScoredTrial>& trials) {
    std::vector<double> real_scores, fake_scores;
    split_scores(trials, real_scores, fake_scores);

    std::size_t fa = 0;
    for (double s : fake_scores)
        if (s > tau) ++fa;
    std::size_t fr = 0;
    for (double s : real_scores)
        if (s < tau) ++fr;
    return {static_cast<double>(fa) / static_cast<double>(fake_scores.size()),
            static_cast<double>(fr) / static_cast<double>(real_scores.size())};
}

EerResult estimate_eer(const std::vector<ScoredTrial>& trials) {
    std::vector<double> real_scores, fake_scores;
    split_scores(trials, real_scores, fake_scores);
    std::sort(real_scores.begin(), real_scores.end());
    std::sort(fake_scores.begin(), fake_scores.end());

    std::vector<double> all;
    all.reserve(real_scores.size() + fake_scores.size());
    all.insert(all.end(), real_scores.begin(), real_scores.end());
    all.insert(all.end(), fake_scores.begin(), fake_scores.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    std::vector<double> candidates;
    candidates.reserve(all.size() + 1);
    candidates.push_back(all.front() - 1.0);
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        candidates.push_back(0.5 * (all[i] + all[i + 1]));
    candidates.push_back(all.back() + 1.0);

    const auto count_above = [](const std::vector<double>& sorted, double tau) {
        return sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), tau);
    };
    const auto count_below = [](const std::vector<double>& sorted, double tau) {
        return std::lower_bound(sorted.begin(), sorted.end(), tau) - sorted.begin();
    };

    // Tie-break lexicographically: minimal |P_FR - P_FA|, then minimal EER,
    // then smallest tau. The middle key keeps the estimate invariant under
    // the label-swap/score-negation symmetry when several thresholds share
    // the minimal gap.
    EerResult best;
    double best_gap = std::numeric_limits<double>::infinity();
    for (double tau : candidates) {
        const double p_fa = static_cast<double>(count_above(fake_scores, tau)) /
                            static_cast<double>(fake_scores.size());
        const double p_fr = static_cast<double>(count_below(real_scores, tau)) /
                            static_cast<double>(real_scores.size());
        const double gap = std::abs(p_fr - p_fa);
        const double eer = 0.5 * (p_fa + p_fr);
        if (gap < best_gap || (gap == best_gap && eer < best.eer)) {
            best_gap = gap;
            best = {eer, tau, p_fa, p_fr};
        }
    }
    return best;
}

} // namespace deepmark
