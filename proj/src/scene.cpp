#include "avsearch/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "avsearch/rng.hpp"

namespace avsearch {

namespace {

constexpr int kStartPoseAttempts = 10000;
constexpr int kMapFormatVersion = 1;

const Color kColors[] = {Color::blue, Color::black, Color::white};

}  // namespace

const char* to_string(Color c) {
  switch (c) {
    case Color::blue: return "blue";
    case Color::black: return "black";
    case Color::white: return "white";
  }
  return "?";
}

Color color_from_string(const std::string& s) {
  if (s == "blue") return Color::blue;
  if (s == "black") return Color::black;
  if (s == "white") return Color::white;
  throw std::invalid_argument("unknown color: " + s);
}

const char* to_string(AngleClass a) {
  switch (a) {
    case AngleClass::front: return "front";
    case AngleClass::side: return "side";
    case AngleClass::back: return "back";
  }
  return "?";
}

AngleClass angle_class_from_string(const std::string& s) {
  if (s == "front") return AngleClass::front;
  if (s == "side") return AngleClass::side;
  if (s == "back") return AngleClass::back;
  throw std::invalid_argument("unknown angle class: " + s);
}

AngleClass classify_angle(Scalar theta_deg) {
  const Scalar a = std::abs(wrap_angle(theta_deg));
  if (a <= 55.0) return AngleClass::front;
  if (a <= 125.0) return AngleClass::side;
  return AngleClass::back;
}

const SceneObject& SceneMap::target() const {
  for (const auto& o : objects)
    if (o.is_target) return o;
  throw std::runtime_error("SceneMap: no target object");
}

std::vector<Vec2> default_slot_layout() {
  std::vector<Vec2> slots;
  for (Scalar y : {4.5, 8.5})
    for (int i = 0; i < 9; ++i) slots.push_back(Vec2{2.5 + 3.0 * i, y});
  return slots;
}

SceneMap generate_map(const Condition& condition, const std::vector<Vec2>& slots,
                      std::uint64_t seed) {
  const int n = condition.num_objects;
  const int d = condition.num_distractors;
  if (n != 5 && n != 7 && n != 12)
    throw std::invalid_argument("generate_map: num_objects must be 5, 7 or 12");
  if (d != 0 && d != 2 && d != 4)
    throw std::invalid_argument("generate_map: num_distractors must be 0, 2 or 4");
  if (d >= n) throw std::invalid_argument("generate_map: num_distractors must be < num_objects");
  if (static_cast<int>(slots.size()) < n)
    throw std::runtime_error("generate_map: not enough slots for the requested object count");

  Rng rng(seed);
  SceneMap map;
  map.slots = slots;
  map.condition = condition;
  map.seed = seed;
  {
    std::ostringstream id;
    id << to_string(condition.angle) << "_" << n << "_" << d << "_s" << seed;
    map.id = id.str();
  }

  // Slot order: target first, then a partial shuffle for the rest.
  std::vector<int> order(slots.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::swap(order[0], order[rng.uniform_int(order.size())]);
  for (int i = 1; i < n; ++i)
    std::swap(order[i], order[i + rng.uniform_int(order.size() - i)]);

  const Color target_color = kColors[rng.uniform_int(3)];
  std::vector<Color> others;
  for (Color c : kColors)
    if (c != target_color) others.push_back(c);

  // Which of the n-1 non-targets share the target color.
  std::vector<int> flags(n - 1, 0);
  for (int i = 0; i < d; ++i) flags[i] = 1;
  for (int i = 0; i < n - 2; ++i)
    std::swap(flags[i], flags[i + rng.uniform_int(flags.size() - i)]);

  SceneObject target;
  target.id = 0;
  target.position = slots[order[0]];
  target.color = target_color;
  target.is_target = true;
  map.objects.push_back(target);
  for (int i = 0; i < n - 1; ++i) {
    SceneObject o;
    o.id = i + 1;
    o.position = slots[order[i + 1]];
    o.color = flags[i] ? target_color : others[rng.uniform_int(2)];
    o.is_target = false;
    map.objects.push_back(o);
  }

  for (int attempt = 0; attempt < kStartPoseAttempts; ++attempt) {
    Pose p;
    p.x = rng.uniform(0.0, map.width);
    p.y = rng.uniform(0.0, map.depth);
    p.heading_deg = rng.uniform(-180.0, 180.0);
    if (collides(map, p)) continue;
    const EgoPolar ego = world_to_ego(p, target.position);
    if (classify_angle(ego.theta_deg) != condition.angle) continue;
    map.start_pose = p;
    validate_map(map);
    return map;
  }
  throw std::runtime_error("generate_map: no valid start pose after bounded retries");
}

std::vector<VisibleObject> visible_set(const SceneMap& map, const Pose& pose,
                                       Scalar fov_deg, Scalar merge_bearing_deg) {
  struct Candidate {
    int index;
    EgoPolar ego;
  };
  std::vector<Candidate> in_view;
  for (size_t i = 0; i < map.objects.size(); ++i) {
    const EgoPolar ego = world_to_ego(pose, map.objects[i].position);
    if (std::abs(ego.theta_deg) <= fov_deg / 2.0)
      in_view.push_back({static_cast<int>(i), ego});
  }
  // Nearest first; within a bearing cluster only the nearest survives.
  std::sort(in_view.begin(), in_view.end(), [](const Candidate& a, const Candidate& b) {
    if (a.ego.r != b.ego.r) return a.ego.r < b.ego.r;
    return a.index < b.index;
  });
  std::vector<Candidate> kept;
  for (const auto& c : in_view) {
    bool masked = false;
    for (const auto& k : kept) {
      if (std::abs(wrap_angle(c.ego.theta_deg - k.ego.theta_deg)) < merge_bearing_deg) {
        masked = true;
        break;
      }
    }
    if (!masked) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(),
            [](const Candidate& a, const Candidate& b) { return a.index < b.index; });
  std::vector<VisibleObject> out;
  out.reserve(kept.size());
  for (const auto& k : kept) out.push_back({k.index, k.ego});
  return out;
}

RayHit ray_march(const SceneMap& map, const Pose& pose, Scalar bearing_deg,
                 const PolarGrid& grid) {
  const Scalar b = deg_to_rad(pose.heading_deg + bearing_deg);
  const Vec2 u{std::sin(b), std::cos(b)};
  const Vec2 p = pose.position();

  RayHit hit;
  for (size_t i = 0; i < map.objects.size(); ++i) {
    const SceneObject& o = map.objects[i];
    const Vec2 oc = o.position - p;
    const Scalar rho = o.footprint_radius;
    Scalar t;
    if (oc.norm() <= rho) {
      t = 0.0;  // pose inside the footprint
    } else {
      const Scalar tc = oc.dot(u);
      if (tc <= 0.0) continue;
      const Scalar d2 = oc.squaredNorm() - tc * tc;
      const Scalar rem = rho * rho - d2;
      if (rem < 0.0) continue;  // tangent contact (rem == 0) counts as a hit
      t = tc - std::sqrt(rem);
    }
    if (t < hit.hit_distance) {
      hit.hit_distance = t;
      hit.object_index = static_cast<int>(i);
    }
  }

  for (int i = 0; i < grid.num_range_bins(); ++i) {
    if (grid.range_center(i) < hit.hit_distance)
      hit.clear_range_bins.push_back(i);
    else
      break;
  }
  return hit;
}

bool collides(const SceneMap& map, const Pose& pose) {
  const Vec2 p = pose.position();
  if (!map.in_bounds(p)) return true;
  for (const auto& o : map.objects)
    if ((o.position - p).norm() <= o.footprint_radius) return true;
  return false;
}

bool segment_hits_object(const SceneMap& map, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const Scalar len2 = ab.squaredNorm();
  for (const auto& o : map.objects) {
    Scalar t = 0.0;
    if (len2 > 0.0) t = std::clamp((o.position - a).dot(ab) / len2, 0.0, 1.0);
    const Vec2 closest = a + t * ab;
    if ((o.position - closest).norm() <= o.footprint_radius) return true;
  }
  return false;
}

void validate_map(const SceneMap& map) {
  if (!(map.width > 0.0) || !(map.depth > 0.0))
    throw std::runtime_error("map: non-positive extents");

  int targets = 0;
  for (const auto& o : map.objects) targets += o.is_target ? 1 : 0;
  if (targets != 1) throw std::runtime_error("map: expected exactly one target object");

  if (static_cast<int>(map.objects.size()) != map.condition.num_objects)
    throw std::runtime_error("map: object count does not match condition");

  const Color tc = map.target().color;
  int distractors = 0;
  for (const auto& o : map.objects)
    if (!o.is_target && o.color == tc) ++distractors;
  if (distractors != map.condition.num_distractors)
    throw std::runtime_error("map: distractor count does not match condition");

  // Objects occupy distinct slots from the slot list.
  std::vector<int> used;
  for (const auto& o : map.objects) {
    int slot = -1;
    for (size_t s = 0; s < map.slots.size(); ++s) {
      if ((map.slots[s] - o.position).norm() < 1e-9) {
        slot = static_cast<int>(s);
        break;
      }
    }
    if (slot < 0) throw std::runtime_error("map: object is not on a slot");
    if (std::find(used.begin(), used.end(), slot) != used.end())
      throw std::runtime_error("map: two objects share a slot");
    used.push_back(slot);
    if (!map.in_bounds(o.position)) throw std::runtime_error("map: object outside the lot");
  }

  if (collides(map, map.start_pose)) throw std::runtime_error("map: start pose collides");
  const EgoPolar ego = world_to_ego(map.start_pose, map.target().position);
  if (classify_angle(ego.theta_deg) != map.condition.angle)
    throw std::runtime_error("map: start bearing outside the condition angle class");
}

std::string map_to_json(const SceneMap& map) {
  nlohmann::ordered_json j;
  j["format"] = "avsearch-map";
  j["version"] = kMapFormatVersion;
  j["id"] = map.id;
  j["grid"] = {{"width", map.width}, {"depth", map.depth}, {"cell_size", 1.0}};
  j["condition"] = {{"angle", to_string(map.condition.angle)},
                    {"num_objects", map.condition.num_objects},
                    {"num_distractors", map.condition.num_distractors}};
  j["seed"] = map.seed;
  auto slots = nlohmann::ordered_json::array();
  for (const auto& s : map.slots) slots.push_back({s.x(), s.y()});
  j["slots"] = slots;
  auto objects = nlohmann::ordered_json::array();
  for (const auto& o : map.objects) {
    objects.push_back({{"id", o.id},
                       {"x", o.position.x()},
                       {"y", o.position.y()},
                       {"color", to_string(o.color)},
                       {"is_target", o.is_target},
                       {"footprint_radius", o.footprint_radius}});
  }
  j["objects"] = objects;
  j["start_pose"] = {{"x", map.start_pose.x},
                     {"y", map.start_pose.y},
                     {"heading", map.start_pose.heading_deg}};
  return j.dump(2) + "\n";
}

SceneMap map_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (j.at("format").get<std::string>() != "avsearch-map")
    throw std::runtime_error("map file: unknown format");
  if (j.at("version").get<int>() != kMapFormatVersion)
    throw std::runtime_error("map file: unsupported version");

  SceneMap map;
  map.id = j.value("id", std::string{});
  map.width = j.at("grid").at("width").get<Scalar>();
  map.depth = j.at("grid").at("depth").get<Scalar>();
  map.condition.angle = angle_class_from_string(j.at("condition").at("angle"));
  map.condition.num_objects = j.at("condition").at("num_objects").get<int>();
  map.condition.num_distractors = j.at("condition").at("num_distractors").get<int>();
  map.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& s : j.at("slots")) map.slots.push_back(Vec2{s.at(0), s.at(1)});
  for (const auto& e : j.at("objects")) {
    SceneObject o;
    o.id = e.at("id").get<int>();
    o.position = Vec2{e.at("x").get<Scalar>(), e.at("y").get<Scalar>()};
    o.color = color_from_string(e.at("color"));
    o.is_target = e.at("is_target").get<bool>();
    o.footprint_radius = e.value("footprint_radius", 0.9);
    map.objects.push_back(o);
  }
  map.start_pose.x = j.at("start_pose").at("x").get<Scalar>();
  map.start_pose.y = j.at("start_pose").at("y").get<Scalar>();
  map.start_pose.heading_deg = j.at("start_pose").at("heading").get<Scalar>();

  validate_map(map);
  return map;
}

void save_map(const SceneMap& map, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_map: cannot open " + path);
  f << map_to_json(map);
}

SceneMap load_map(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_map: cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return map_from_json(ss.str());
}

}  // namespace avsearch
