#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "avsearch/geometry.hpp"
#include "avsearch/types.hpp"

namespace avsearch {

enum class Color { blue, black, white };

const char* to_string(Color c);
Color color_from_string(const std::string& s);

enum class AngleClass { front, side, back };

const char* to_string(AngleClass a);
AngleClass angle_class_from_string(const std::string& s);

// front: |theta| <= 55, side: 55 < |theta| <= 125, back: |theta| > 125.
// The three ranges partition the circle.
AngleClass classify_angle(Scalar theta_deg);

struct Condition {
  AngleClass angle = AngleClass::front;
  int num_objects = 5;
  int num_distractors = 0;
};

struct SceneObject {
  int id = 0;
  Vec2 position{0.0, 0.0};  // slot center
  Color color = Color::blue;
  bool is_target = false;
  Scalar footprint_radius = 0.9;
};

// Static world: a rectangular lot of 1 m cells with parked objects on slots.
struct SceneMap {
  std::string id;
  Scalar width = 29.0;   // extent along x
  Scalar depth = 13.0;   // extent along y
  std::vector<Vec2> slots;
  std::vector<SceneObject> objects;
  Pose start_pose;
  Condition condition;
  std::uint64_t seed = 0;

  const SceneObject& target() const;
  bool in_bounds(const Vec2& p) const {
    return p.x() >= 0.0 && p.x() <= width && p.y() >= 0.0 && p.y() <= depth;
  }
};

// Two rows of slots along the 29 m axis (y = 4.5 and y = 8.5, three free cell
// rows between them as the central corridor), nine slots per row at 3 m pitch.
std::vector<Vec2> default_slot_layout();

// Procedural generation: target on a random slot with a random color, the
// remaining objects on distinct slots, exactly `num_distractors` non-targets
// sharing the target color, and a collision-free start pose whose bearing to
// the target falls in the requested angle class. Deterministic per seed.
SceneMap generate_map(const Condition& condition, const std::vector<Vec2>& slots,
                      std::uint64_t seed);

struct VisibleObject {
  int object_index = 0;
  EgoPolar ego;
};

// Objects within the field of view; among objects whose bearings differ by
// less than merge_bearing_deg only the nearest is kept. Sorted by object index.
std::vector<VisibleObject> visible_set(const SceneMap& map, const Pose& pose,
                                       Scalar fov_deg = 110.0,
                                       Scalar merge_bearing_deg = 5.0);

struct RayHit {
  std::vector<int> clear_range_bins;  // bins whose center lies strictly before the hit
  int object_index = -1;
  Scalar hit_distance = std::numeric_limits<Scalar>::infinity();

  bool hit() const { return object_index >= 0; }
};

// Marches from the pose along an ego bearing until the first object footprint
// (tangent contact counts as a hit). Returns the range bins cleared before the
// hit plus the object, if any.
RayHit ray_march(const SceneMap& map, const Pose& pose, Scalar bearing_deg,
                 const PolarGrid& grid);

// True if the position lies within any object footprint or outside the lot.
bool collides(const SceneMap& map, const Pose& pose);

// Swept check for a straight move from a to b (captures footprints clipped
// mid-segment even when both endpoints are free).
bool segment_hits_object(const SceneMap& map, const Vec2& a, const Vec2& b);

// Map file format: versioned JSON document with grid extents, slot list,
// objects, start pose, condition, and seed. The loader revalidates all
// invariants and rejects inconsistent files.
std::string map_to_json(const SceneMap& map);
SceneMap map_from_json(const std::string& text);
void save_map(const SceneMap& map, const std::string& path);
SceneMap load_map(const std::string& path);

// Throws if any SceneMap invariant is violated.
void validate_map(const SceneMap& map);

}  // namespace avsearch
