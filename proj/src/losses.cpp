#include "lesionbox/losses.hpp"

#include <algorithm>
#include <cmath>

#include "lesionbox/detail/kahan.hpp"
#include "lesionbox/geometry.hpp"

namespace lesionbox {

ProbField::ProbField(std::vector<double> p, std::vector<double> t)
    : probs(std::move(p)), targets(std::move(t)) {
  if (probs.empty() || probs.size() != targets.size())
    throw Error("ProbField: probs/targets must be non-empty, equal length");
  for (double& v : probs)
    v = std::clamp(v, kClamp, 1.0 - kClamp);
  for (double t0 : targets)
    if (t0 != 0.0 && t0 != 1.0)
      throw Error("ProbField: targets must be 0 or 1");
}

double bce(const ProbField& f) {
  detail::KahanSum s;
  for (std::size_t i = 0; i < f.probs.size(); ++i) {
    const double p = f.probs[i], t = f.targets[i];
    s.add(-(t * std::log(p) + (1.0 - t) * std::log(1.0 - p)));
  }
  return s.value() / double(f.probs.size());
}

std::vector<double> bce_gradient(const ProbField& f) {
  const double n = double(f.probs.size());
  std::vector<double> g(f.probs.size());
  for (std::size_t i = 0; i < f.probs.size(); ++i) {
    const double p = f.probs[i], t = f.targets[i];
    g[i] = (-t / p + (1.0 - t) / (1.0 - p)) / n;
  }
  return g;
}

namespace {
// small absolute slack on top of the 1e-6 contract so that summation
// round-off on conforming inputs cannot trip the check
constexpr double kSumTol = 1e-6 + 1e-9;
} // namespace

double cross_entropy(const std::vector<std::vector<double>>& dists,
                     const std::vector<int>& classes) {
  if (dists.empty() || dists.size() != classes.size())
    throw Error("cross_entropy: dists/classes must be non-empty, equal length");
  detail::KahanSum s;
  for (std::size_t i = 0; i < dists.size(); ++i) {
    detail::KahanSum sum;
    for (double v : dists[i])
      sum.add(v);
    if (std::abs(sum.value() - 1.0) > kSumTol)
      throw BadDistribution("cross_entropy: distribution does not sum to 1");
    const int c = classes[i];
    if (c < 0 || std::size_t(c) >= dists[i].size())
      throw Error("cross_entropy: class index out of range");
    s.add(-std::log(std::max(dists[i][std::size_t(c)], ProbField::kClamp)));
  }
  return s.value() / double(dists.size());
}

std::vector<std::vector<double>>
cross_entropy_gradient(const std::vector<std::vector<double>>& dists,
                       const std::vector<int>& classes) {
  const double n = double(dists.size());
  std::vector<std::vector<double>> g;
  g.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i) {
    std::vector<double> row(dists[i].size(), 0.0);
    const double p =
        std::max(dists[i][std::size_t(classes[i])], ProbField::kClamp);
    row[std::size_t(classes[i])] = -1.0 / (n * p);
    g.push_back(std::move(row));
  }
  return g;
}

namespace {
constexpr double kDiceEps = 1e-5;
} // namespace

double soft_dice(const ProbField& f) {
  detail::KahanSum spt, sp, st;
  for (std::size_t i = 0; i < f.probs.size(); ++i) {
    spt.add(f.probs[i] * f.targets[i]);
    sp.add(f.probs[i]);
    st.add(f.targets[i]);
  }
  return 1.0 - (2.0 * spt.value() + kDiceEps) /
                   (sp.value() + st.value() + kDiceEps);
}

std::vector<double> soft_dice_gradient(const ProbField& f) {
  detail::KahanSum spt, sp, st;
  for (std::size_t i = 0; i < f.probs.size(); ++i) {
    spt.add(f.probs[i] * f.targets[i]);
    sp.add(f.probs[i]);
    st.add(f.targets[i]);
  }
  const double num = 2.0 * spt.value() + kDiceEps;
  const double den = sp.value() + st.value() + kDiceEps;
  std::vector<double> g(f.probs.size());
  for (std::size_t i = 0; i < f.probs.size(); ++i)
    g[i] = -(2.0 * f.targets[i] * den - num) / (den * den);
  return g;
}

double giou_loss(const Box3& pred, const Box3& gt) {
  return 1.0 - giou(pred, gt);
}

std::array<double, 6> giou_loss_gradient(const Box3& a, const Box3& b) {
  std::array<double, 3> ea, ib_lo, ib_hi, ie, ce;
  bool overlap = true;
  for (int k = 0; k < 3; ++k) {
    ea[k] = a.max[k] - a.min[k];
    ib_lo[k] = std::max(a.min[k], b.min[k]);
    ib_hi[k] = std::min(a.max[k], b.max[k]);
    ie[k] = ib_hi[k] - ib_lo[k];
    if (ie[k] <= 0.0)
      overlap = false;
    ce[k] = std::max(a.max[k], b.max[k]) - std::min(a.min[k], b.min[k]);
  }
  const double va = ea[0] * ea[1] * ea[2];
  const double vb = box_volume(b);
  const double inter = overlap ? ie[0] * ie[1] * ie[2] : 0.0;
  const double uni = va + vb - inter;
  const double cvol = ce[0] * ce[1] * ce[2];

  auto prod_others = [](const std::array<double, 3>& e, int k) {
    return e[(k + 1) % 3] * e[(k + 2) % 3];
  };

  std::array<double, 6> g{};
  for (int k = 0; k < 3; ++k) {
    for (int side = 0; side < 2; ++side) { // 0 = min face, 1 = max face
      const double sgn = side == 0 ? -1.0 : 1.0;
      const double dva = sgn * prod_others(ea, k);
      double di = 0.0;
      if (overlap) {
        const bool active = side == 0 ? (a.min[k] > b.min[k])
                                      : (a.max[k] < b.max[k]);
        if (active)
          di = sgn * prod_others(ie, k);
      }
      double dc = 0.0;
      {
        const bool active = side == 0 ? (a.min[k] < b.min[k])
                                      : (a.max[k] > b.max[k]);
        if (active)
          dc = sgn * prod_others(ce, k);
      }
      const double du = dva - di;
      // giou = inter/uni - 1 + uni/cvol
      const double dgiou = (di * uni - inter * du) / (uni * uni) +
                           (du * cvol - uni * dc) / (cvol * cvol);
      g[std::size_t(side * 3 + k)] = -dgiou;
    }
  }
  return g;
}

} // namespace lesionbox
