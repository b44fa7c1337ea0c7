#pragma once

#include <vector>

#include "lesionbox/types.hpp"

namespace lesionbox {

/// Predicted probabilities with binary targets. Probabilities are clamped
/// into [1e-7, 1 - 1e-7] on construction so every loss below is total.
struct ProbField {
  std::vector<double> probs;
  std::vector<double> targets; // each 0 or 1

  ProbField(std::vector<double> p, std::vector<double> t);

  static constexpr double kClamp = 1e-7;
};

/// Mean binary cross-entropy: mean of -[t ln p + (1-t) ln(1-p)].
double bce(const ProbField& field);
/// d bce / d p_i for every element.
std::vector<double> bce_gradient(const ProbField& field);

/// Mean of -ln(dist[class]) over elements. Each distribution must sum to 1
/// within 1e-6 (BadDistribution otherwise).
double cross_entropy(const std::vector<std::vector<double>>& dists,
                     const std::vector<int>& classes);
/// Partials with respect to every probability of every distribution.
std::vector<std::vector<double>>
cross_entropy_gradient(const std::vector<std::vector<double>>& dists,
                       const std::vector<int>& classes);

/// Soft Dice loss 1 - (2 sum(p t) + eps) / (sum p + sum t + eps), eps = 1e-5.
double soft_dice(const ProbField& field);
std::vector<double> soft_dice_gradient(const ProbField& field);

/// 1 - giou(pred, gt), in [0, 2].
double giou_loss(const Box3& pred, const Box3& gt);
/// Partials with respect to the six pred coordinates, ordered
/// (min_x, min_y, min_z, max_x, max_y, max_z). Valid away from the
/// non-smooth locus where box faces exactly touch.
std::array<double, 6> giou_loss_gradient(const Box3& pred, const Box3& gt);

} // namespace lesionbox
