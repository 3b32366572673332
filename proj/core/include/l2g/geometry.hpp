#pragma once

// Continuous-scene stand-in: threshold-based mapping from block centers to
// semantic configurations, plus per-structure scene samplers.

#include <array>
#include <cstddef>
#include <set>

#include "l2g/rng.hpp"
#include "l2g/semantics.hpp"

namespace l2g::geometry {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Scene {
  std::array<Vec3, 3> positions{};  // indexed by ObjectId

  const Vec3& at(ObjectId o) const { return positions[static_cast<int>(o)]; }
  Vec3& at(ObjectId o) { return positions[static_cast<int>(o)]; }
};

struct MappingParams {
  double block_side = 0.05;
  double close_threshold = 0.075;
  double above_xy_tol = 0.03;
  double above_z_tol = 0.02;

  // h < close < 2h, xy_tol <= h, 0 < z_tol < h/2.
  bool consistent() const;
};

double distance(const Vec3& a, const Vec3& b);
double horizontal_distance(const Vec3& a, const Vec3& b);

bool eval_close(const Vec3& a, const Vec3& b, const MappingParams& params);
// `a` rests directly on `b`.
bool eval_above(const Vec3& a, const Vec3& b, const MappingParams& params);

// Resting on the table, all center distances at least one block side.
bool physically_plausible(const Scene& scene, const MappingParams& params);

SemanticConfig scene_to_config(const Scene& scene, const MappingParams& params);

inline constexpr std::size_t kMaxSceneDraws = 100000;

// Throws kSamplerExhausted after kMaxSceneDraws rejected draws.
Scene sample_scene(const StructureClass& structure, Rng& rng, const MappingParams& params);

std::set<SemanticConfig> empirical_valid_set(std::size_t n_per_structure, Rng& rng,
                                             const MappingParams& params);

}  // namespace l2g::geometry
