// Tests for the error-rate estimators: strict-inequality tie handling,
// the midpoint threshold sweep, and equivalence with a brute-force oracle.

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "deepmark/metrics.hpp"
#include "deepmark/rng.hpp"

using namespace deepmark;

namespace {

std::vector<ScoredTrial> make_trials(const std::vector<double>& real_scores,
                                     const std::vector<double>& fake_scores) {
    std::vector<ScoredTrial> out;
    int i = 0;
    for (double s : real_scores) out.push_back({"R" + std::to_string(i++), Label::Real, s});
    for (double s : fake_scores) out.push_back({"F" + std::to_string(i++), Label::Fake, s});
    return out;
}

// Brute-force oracle: enumerate every candidate threshold with plain loops
// and direct counting. Kept deliberately independent of the library sweep.
EerResult oracle_eer(const std::vector<ScoredTrial>& trials) {
    std::vector<double> distinct;
    for (const auto& t : trials) distinct.push_back(t.score);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

    std::vector<double> taus;
    taus.push_back(distinct.front() - 1.0);
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i)
        taus.push_back((distinct[i] + distinct[i + 1]) / 2.0);
    taus.push_back(distinct.back() + 1.0);

    EerResult best;
    double best_gap = 1e300;
    for (double tau : taus) {
        double fa = 0, fr = 0, n_fake = 0, n_real = 0;
        for (const auto& t : trials) {
            if (t.label == Label::Fake) {
                n_fake += 1;
                if (t.score > tau) fa += 1;
            } else {
                n_real += 1;
                if (t.score < tau) fr += 1;
            }
        }
        const double p_fa = fa / n_fake;
        const double p_fr = fr / n_real;
        const double gap = std::abs(p_fr - p_fa);
        const double eer = (p_fa + p_fr) / 2.0;
        if (gap < best_gap || (gap == best_gap && eer < best.eer)) {
            best_gap = gap;
            best = {eer, tau, p_fa, p_fr};
        }
    }
    return best;
}

} // namespace

TEST_CASE("far_frr_at treats scores equal to tau as neither error") {
    const auto trials = make_trials({0.5}, {0.5});
    const auto [p_fa, p_fr] = far_frr_at(0.5, trials);
    CHECK(p_fa == 0.0);
    CHECK(p_fr == 0.0);
}

TEST_CASE("far_frr_at on separated classes") {
    const auto trials = make_trials({1.0, 1.0}, {0.0, 0.0});
    const auto [p_fa, p_fr] = far_frr_at(0.5, trials);
    CHECK(p_fa == 0.0);
    CHECK(p_fr == 0.0);
}

TEST_CASE("far_frr_at counts strict exceedances") {
    const auto trials = make_trials({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1});
    const auto [p_fa, p_fr] = far_frr_at(0.5, trials);
    CHECK(p_fa == doctest::Approx(1.0 / 3.0));
    CHECK(p_fr == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("far_frr_at requires both classes") {
    CHECK_THROWS_AS(far_frr_at(0.0, make_trials({}, {0.1})), OneClassOnly);
    CHECK_THROWS_AS(far_frr_at(0.0, make_trials({0.1}, {})), OneClassOnly);
}

TEST_CASE("estimate_eer is zero for perfectly separated scores") {
    const auto r = estimate_eer(make_trials({1.0, 1.0, 1.0}, {0.0, 0.0}));
    CHECK(r.eer == 0.0);
}

TEST_CASE("estimate_eer on the fixed three-vs-three case") {
    const auto r = estimate_eer(make_trials({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1}));
    CHECK(r.eer == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.tau_star > 0.3);
    CHECK(r.tau_star < 0.7);
}

TEST_CASE("estimate_eer reaches one under inverted polarity") {
    const auto r = estimate_eer(make_trials({0.0, 0.0}, {1.0, 1.0}));
    CHECK(r.eer == 1.0);
}

TEST_CASE("estimate_eer is invariant under strictly increasing maps") {
    Rng rng(77);
    std::vector<double> real_scores, fake_scores;
    for (int i = 0; i < 30; ++i) real_scores.push_back(rng.gaussian() + 0.5);
    for (int i = 0; i < 25; ++i) fake_scores.push_back(rng.gaussian() - 0.5);
    const double base = estimate_eer(make_trials(real_scores, fake_scores)).eer;

    const auto mapped = [&](auto f) {
        std::vector<double> r2, f2;
        for (double s : real_scores) r2.push_back(f(s));
        for (double s : fake_scores) f2.push_back(f(s));
        return estimate_eer(make_trials(r2, f2)).eer;
    };
    CHECK(mapped([](double x) { return 2.0 * x + 1.0; }) == base);
    CHECK(mapped([](double x) { return std::tanh(x); }) == base);
    CHECK(mapped([](double x) { return x * x * x; }) == base);
}

TEST_CASE("estimate_eer converges to one half for exchangeable scores") {
    Rng rng(99);
    std::vector<double> real_scores, fake_scores;
    for (int i = 0; i < 10000; ++i) real_scores.push_back(rng.next_double());
    for (int i = 0; i < 10000; ++i) fake_scores.push_back(rng.next_double());
    const auto r = estimate_eer(make_trials(real_scores, fake_scores));
    CHECK(std::abs(r.eer - 0.5) <= 0.03);
}

TEST_CASE("estimate_eer matches the brute-force oracle on 1000 random instances") {
    Rng rng(2024);
    for (int instance = 0; instance < 1000; ++instance) {
        const int n_real = static_cast<int>(rng.uniform_int(1, 10));
        const int n_fake = static_cast<int>(rng.uniform_int(1, 10));
        std::vector<double> real_scores, fake_scores;
        const bool quantized = rng.next_double() < 0.5; // provoke score ties
        const auto draw = [&]() {
            const double u = rng.uniform(-1.0, 1.0);
            return quantized ? std::round(u * 4.0) / 4.0 : u;
        };
        for (int i = 0; i < n_real; ++i) real_scores.push_back(draw());
        for (int i = 0; i < n_fake; ++i) fake_scores.push_back(draw());

        const auto trials = make_trials(real_scores, fake_scores);
        const EerResult fast = estimate_eer(trials);
        const EerResult slow = oracle_eer(trials);
        CHECK(fast.eer == slow.eer);
        CHECK(fast.tau_star == slow.tau_star);
        CHECK(fast.p_fa_at_tau == slow.p_fa_at_tau);
        CHECK(fast.p_fr_at_tau == slow.p_fr_at_tau);
    }
}

TEST_CASE("label swap with negated scores leaves the EER unchanged") {
    Rng rng(31337);
    for (int instance = 0; instance < 50; ++instance) {
        std::vector<ScoredTrial> trials;
        for (int i = 0; i < 12; ++i)
            trials.push_back({"T" + std::to_string(i),
                              rng.next_double() < 0.5 ? Label::Real : Label::Fake,
                              rng.uniform(-1.0, 1.0)});
        bool has_real = false, has_fake = false;
        for (const auto& t : trials) {
            has_real |= t.label == Label::Real;
            has_fake |= t.label == Label::Fake;
        }
        if (!has_real || !has_fake) continue;

        std::vector<ScoredTrial> swapped = trials;
        for (auto& t : swapped) {
            t.label = (t.label == Label::Real) ? Label::Fake : Label::Real;
            t.score = -t.score;
        }
        CHECK(estimate_eer(trials).eer == estimate_eer(swapped).eer);
    }
}

TEST_CASE("estimate_eer rejects non-finite scores") {
    auto trials = make_trials({0.5}, {0.1});
    trials[0].score = std::nan("");
    CHECK_THROWS_AS(estimate_eer(trials), RangeViolation);
}
