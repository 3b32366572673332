#include "l2g/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "l2g/error.hpp"

namespace l2g::geometry {

namespace {

Vec3 on_table(double x, double y, const MappingParams& p) { return {x, y, p.block_side / 2.0}; }

Vec3 polar_offset(const Vec3& origin, double radius, double angle) {
  return {origin.x + radius * std::cos(angle), origin.y + radius * std::sin(angle), origin.z};
}

double random_angle(Rng& rng) { return rng.uniform(0.0, 2.0 * std::numbers::pi); }

// Small horizontal wobble for stacked blocks, well inside the above tolerance.
Vec3 wobble(Vec3 v, Rng& rng, double amount) {
  v.x += rng.uniform(-amount, amount);
  v.y += rng.uniform(-amount, amount);
  return v;
}

Scene propose(const StructureClass& structure, Rng& rng, const MappingParams& p) {
  const double h = p.block_side;
  const double jitter = std::min(p.above_xy_tol, h) * 0.15;
  const Vec3 anchor = on_table(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), p);
  Scene scene;
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Flat>) {
          const double half = 1.4 * p.close_threshold;
          for (auto o : kAllObjects) {
            scene.at(o) = on_table(anchor.x + rng.uniform(-half, half),
                                   anchor.y + rng.uniform(-half, half), p);
          }
        } else if constexpr (std::is_same_v<T, Stack2>) {
          scene.at(s.bottom) = anchor;
          Vec3 top = wobble(anchor, rng, jitter);
          top.z += h;
          scene.at(s.top) = top;
          // Horizontal radius below which a table block is also close to the top block.
          const double near_top = std::sqrt(p.close_threshold * p.close_threshold - h * h);
          double radius = 0.0;
          switch (s.third) {
            case ThirdPattern::kIsolated:
              radius = rng.uniform(p.close_threshold + 0.01, p.close_threshold + 0.2);
              break;
            case ThirdPattern::kNearBottom:
              radius = rng.uniform(near_top, p.close_threshold);
              break;
            case ThirdPattern::kNearBoth:
              radius = rng.uniform(h, near_top);
              break;
          }
          const ObjectId other = static_cast<ObjectId>(3 - static_cast<int>(s.top) -
                                                       static_cast<int>(s.bottom));
          scene.at(other) = polar_offset(anchor, radius, random_angle(rng));
        } else if constexpr (std::is_same_v<T, Stack3>) {
          scene.at(s.bottom) = anchor;
          Vec3 mid = wobble(anchor, rng, jitter / 2.0);
          mid.z += h;
          scene.at(s.mid) = mid;
          Vec3 top = wobble(mid, rng, jitter / 2.0);
          top.z += h;
          scene.at(s.top) = top;
        } else {
          const double max_gap = std::min(2.0 * p.above_xy_tol, p.close_threshold);
          const double gap = rng.uniform(h, max_gap);
          const double angle = random_angle(rng);
          const Vec3 left = polar_offset(anchor, gap / 2.0, angle);
          const Vec3 right = polar_offset(anchor, gap / 2.0, angle + std::numbers::pi);
          Vec3 top = wobble(anchor, rng, jitter / 4.0);
          top.z += h;
          bool first = true;
          for (auto o : kAllObjects) {
            if (o == s.top) continue;
            scene.at(o) = first ? left : right;
            first = false;
          }
          scene.at(s.top) = top;
        }
      },
      structure);
  return scene;
}

}  // namespace

bool MappingParams::consistent() const {
  const double h = block_side;
  return h > 0.0 && h < close_threshold && close_threshold < 2.0 * h && above_xy_tol > 0.0 &&
         above_xy_tol <= h && above_z_tol > 0.0 && above_z_tol < h / 2.0;
}

double distance(const Vec3& a, const Vec3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) + (a.z - b.z) * (a.z - b.z));
}

double horizontal_distance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

bool eval_close(const Vec3& a, const Vec3& b, const MappingParams& params) {
  return distance(a, b) < params.close_threshold;
}

bool eval_above(const Vec3& a, const Vec3& b, const MappingParams& params) {
  return std::abs(a.z - b.z - params.block_side) < params.above_z_tol &&
         horizontal_distance(a, b) < params.above_xy_tol;
}

bool physically_plausible(const Scene& scene, const MappingParams& params) {
  for (int i = 0; i < kNumObjects; ++i) {
    if (scene.positions[i].z < 0.0) return false;
    for (int j = i + 1; j < kNumObjects; ++j) {
      if (distance(scene.positions[i], scene.positions[j]) < params.block_side) return false;
    }
  }
  return true;
}

SemanticConfig scene_to_config(const Scene& scene, const MappingParams& params) {
  SemanticConfig c;
  for (int i = 0; i < kNumSlots; ++i) {
    const auto slot = slot_at(i);
    const auto& a = scene.at(slot.first);
    const auto& b = scene.at(slot.second);
    const bool value = slot.kind == PredicateKind::kClose ? eval_close(a, b, params)
                                                          : eval_above(a, b, params);
    c = c.with(i, value);
  }
  return c;
}

Scene sample_scene(const StructureClass& structure, Rng& rng, const MappingParams& params) {
  const SemanticConfig target = realize(structure);
  for (std::size_t draw = 0; draw < kMaxSceneDraws; ++draw) {
    Scene scene = propose(structure, rng, params);
    if (physically_plausible(scene, params) && scene_to_config(scene, params) == target) {
      return scene;
    }
  }
  throw Error(ErrorCode::kSamplerExhausted,
              "no scene for " + describe(structure) + " after " + std::to_string(kMaxSceneDraws) +
                  " draws");
}

std::set<SemanticConfig> empirical_valid_set(std::size_t n_per_structure, Rng& rng,
                                             const MappingParams& params) {
  if (n_per_structure == 0) {
    throw Error(ErrorCode::kInvalidArgument, "n_per_structure must be >= 1");
  }
  std::set<SemanticConfig> out;
  for (const auto& structure : all_structures()) {
    for (std::size_t k = 0; k < n_per_structure; ++k) {
      out.insert(scene_to_config(sample_scene(structure, rng, params), params));
    }
  }
  return out;
}

}  // namespace l2g::geometry
