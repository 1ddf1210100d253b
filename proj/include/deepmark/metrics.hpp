#pragma once

#include <string>
#include <vector>

#include "deepmark/errors.hpp"
#include "deepmark/protocol.hpp"

namespace deepmark {

struct ScoredTrial {
    std::string utterance_id;
    Label label = Label::Real;
    double score = 0.0;
};

struct EerResult {
    double eer = 0.0;
    double tau_star = 0.0;
    double p_fa_at_tau = 0.0;
    double p_fr_at_tau = 0.0;
};

/// Error rates at one threshold with strict inequalities:
///   P_FA = |{fake : s > tau}| / |fake|,  P_FR = |{real : s < tau}| / |real|.
/// Ties at tau count as neither.
std::pair<double, double> far_frr_at(double tau, const std::vector<ScoredTrial>& trials);

/// Sweep candidate thresholds (midpoints between adjacent distinct scores,
/// plus one below the minimum and one above the maximum); tau* minimizes
/// |P_FR - P_FA|, with ties resolved to the smaller EER and then the
/// smallest tau; EER is the mean of the two rates at tau*.
EerResult estimate_eer(const std::vector<ScoredTrial>& trials);

} // namespace deepmark
