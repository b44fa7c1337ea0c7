#include <doctest.h>

#include <cmath>
#include <random>

#include "lesionbox/anchors.hpp"
#include "lesionbox/geometry.hpp"

using namespace lesionbox;

namespace {

AnchorConfig single_size_config(std::array<int, 3> patch, int stride,
                                std::array<double, 3> size) {
  AnchorConfig cfg;
  cfg.patch_dims = patch;
  cfg.levels = {stride};
  cfg.sizes_per_level = {{size}};
  return cfg;
}

} // namespace

TEST_CASE("generate_anchors") {
  SUBCASE("8^3 patch, stride 4, one 4^3 size") {
    const auto anchors =
        generate_anchors(single_size_config({8, 8, 8}, 4, {4, 4, 4}));
    REQUIRE(anchors.size() == 8);
    CHECK(anchors[0].min == std::array<double, 3>{0, 0, 0});
    CHECK(anchors[0].max == std::array<double, 3>{4, 4, 4});
    // x varies fastest within a level
    CHECK(anchors[1].min == std::array<double, 3>{4, 0, 0});
  }
  SUBCASE("default patch with strides [4,8,16], one size each = 57344") {
    AnchorConfig cfg;
    for (std::size_t l = 0; l < cfg.levels.size(); ++l)
      cfg.sizes_per_level[l] = {cfg.sizes_per_level[l][0]};
    CHECK(cfg.anchor_count() == 57344);
    CHECK(generate_anchors(cfg).size() == 57344);
  }
  SUBCASE("anchor count matches the closed form with multiple sizes") {
    AnchorConfig cfg; // 3 sizes per level by default
    CHECK(cfg.anchor_count() == 3 * 57344);
    CHECK(std::int64_t(generate_anchors(cfg).size()) == cfg.anchor_count());
  }
  SUBCASE("anchor centers lie inside the patch when strides divide dims") {
    AnchorConfig cfg;
    cfg.patch_dims = {32, 16, 16};
    cfg.levels = {4, 8};
    cfg.sizes_per_level = {AnchorConfig::default_sizes(4),
                           AnchorConfig::default_sizes(8)};
    for (const Box3& a : generate_anchors(cfg))
      for (int i = 0; i < 3; ++i) {
        const double c = (a.min[i] + a.max[i]) / 2.0;
        CHECK(c > 0.0);
        CHECK(c < double(cfg.patch_dims[i]));
      }
  }
}

TEST_CASE("assign_anchors") {
  const AnchorConfig cfg = single_size_config({8, 8, 8}, 4, {4, 4, 4});
  const auto anchors = generate_anchors(cfg);

  SUBCASE("no gts -> all negative") {
    const auto as = assign_anchors(anchors, {}, cfg);
    for (const auto& e : as.anchors)
      CHECK(e.role == AnchorRole::Negative);
  }
  SUBCASE("gt equal to an anchor -> positive with IoU 1") {
    const auto as = assign_anchors(anchors, {anchors[0]}, cfg);
    CHECK(as.anchors[0].role == AnchorRole::Positive);
    CHECK(as.anchors[0].gt == 0);
    CHECK(as.forced_anchor[0] == 0);
    // the far-corner anchor is disjoint, hence negative
    CHECK(as.anchors[7].role == AnchorRole::Negative);
  }
  SUBCASE("forcing rescues a gt whose best IoU is below pos_iou") {
    const Box3 small{{0.5, 0.5, 0.5}, {2.0, 2.0, 2.0}};
    double best = 0.0;
    for (const auto& a : anchors)
      best = std::max(best, iou(a, small));
    REQUIRE(best < cfg.pos_iou);
    const auto as = assign_anchors(anchors, {small}, cfg);
    REQUIRE(as.forced_anchor[0] >= 0);
    CHECK(as.anchors[std::size_t(as.forced_anchor[0])].role ==
          AnchorRole::Positive);
    CHECK(as.anchors[std::size_t(as.forced_anchor[0])].gt == 0);
  }
  SUBCASE("totality: every anchor has exactly one role") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> coord(0.0, 8.0);
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Box3> gts;
      for (int g = 0; g < 3; ++g) {
        Box3 b;
        for (int i = 0; i < 3; ++i) {
          const double u = coord(rng), v = coord(rng);
          b.min[i] = std::min(u, v);
          b.max[i] = std::max(u, v) + 0.1;
        }
        gts.push_back(b);
      }
      const auto as = assign_anchors(anchors, gts, cfg);
      REQUIRE(as.anchors.size() == anchors.size());
      // every gt keeps at least one positive anchor matched to it
      for (std::size_t g = 0; g < gts.size(); ++g) {
        REQUIRE(as.forced_anchor[g] >= 0);
        CHECK(as.anchors[std::size_t(as.forced_anchor[g])].role ==
              AnchorRole::Positive);
        CHECK(as.anchors[std::size_t(as.forced_anchor[g])].gt == int(g));
      }
    }
  }
  SUBCASE("raising pos_iou never adds non-forced positives") {
    std::mt19937_64 rng(57);
    std::uniform_real_distribution<double> coord(0.0, 8.0);
    std::vector<Box3> gts;
    for (int g = 0; g < 4; ++g) {
      Box3 b;
      for (int i = 0; i < 3; ++i) {
        const double u = coord(rng), v = coord(rng);
        b.min[i] = std::min(u, v);
        b.max[i] = std::max(u, v) + 0.5;
      }
      gts.push_back(b);
    }
    auto count_positives = [&](double pos) {
      AnchorConfig c = cfg;
      c.pos_iou = pos;
      c.neg_iou = std::min(c.neg_iou, pos);
      const auto as = assign_anchors(anchors, gts, c);
      int n = 0;
      for (const auto& e : as.anchors)
        n += e.role == AnchorRole::Positive;
      return n;
    };
    int prev = count_positives(0.05);
    for (double pos : {0.2, 0.4, 0.6, 0.8}) {
      const int cur = count_positives(pos);
      CHECK(cur <= prev);
      prev = cur;
    }
  }
}

TEST_CASE("encode/decode") {
  const Box3 anchor{{0, 0, 0}, {2, 2, 2}};
  SUBCASE("gt = anchor -> zero targets") {
    const auto t = encode_box(anchor, anchor);
    for (double v : t)
      CHECK(v == 0.0);
  }
  SUBCASE("shifted gt, same extents") {
    const auto t = encode_box(anchor, Box3{{1, 1, 1}, {3, 3, 3}});
    for (int i = 0; i < 3; ++i) {
      CHECK(t[std::size_t(i)] == 0.5);
      CHECK(t[std::size_t(i + 3)] == 0.0);
    }
  }
  SUBCASE("doubled extent on x") {
    const auto t = encode_box(anchor, Box3{{-1, 0, 0}, {3, 2, 2}});
    CHECK(t[3] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(t[0] == 0.0);
  }
  SUBCASE("zero targets decode to the anchor") {
    const Box3 d = decode_box(anchor, {0, 0, 0, 0, 0, 0});
    CHECK(d.min == anchor.min);
    CHECK(d.max == anchor.max);
  }
  SUBCASE("log-scale target doubles the x extent about the center") {
    const Box3 unit{{0, 0, 0}, {1, 1, 1}};
    const Box3 d = decode_box(unit, {0, 0, 0, std::log(2.0), 0, 0});
    CHECK(d.min[0] == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(d.max[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(d.min[1] == 0.0);
  }
  SUBCASE("round trip on random pairs is exact to 1e-9") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    std::uniform_real_distribution<double> ext(0.1, 8.0);
    for (int trial = 0; trial < 1000; ++trial) {
      Box3 a, g;
      for (int i = 0; i < 3; ++i) {
        a.min[i] = coord(rng);
        a.max[i] = a.min[i] + ext(rng);
        g.min[i] = coord(rng);
        g.max[i] = g.min[i] + ext(rng);
      }
      const Box3 d = decode_box(a, encode_box(a, g));
      for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(d.min[i] - g.min[i]) <= 1e-9);
        CHECK(std::abs(d.max[i] - g.max[i]) <= 1e-9);
      }
      // and the other direction: encode(decode(target)) = target
      const auto t0 = encode_box(a, g);
      const auto t1 = encode_box(a, decode_box(a, t0));
      for (int i = 0; i < 6; ++i)
        CHECK(std::abs(t1[std::size_t(i)] - t0[std::size_t(i)]) <= 1e-9);
    }
  }
  SUBCASE("degenerate gt is rejected") {
    CHECK_THROWS_AS(encode_box(anchor, Box3{{0, 0, 0}, {0, 1, 1}}),
                    DegenerateGt);
  }
}
