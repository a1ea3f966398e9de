#include "avsearch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "avsearch/auditory.hpp"
#include "avsearch/policy.hpp"
#include "avsearch/rng.hpp"
#include "avsearch/visual.hpp"

namespace avsearch {

namespace {

// Seed stream tags.
constexpr std::uint64_t kMapStream = 0x4d415053;     // map generation
constexpr std::uint64_t kEnvStream = 0x454e5653;     // environment observations
constexpr std::uint64_t kPolicyStream = 0x504f4c59;  // policy sampling

std::string fmt(Scalar v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

bool verbose() {
  const char* v = std::getenv("AVSEARCH_VERBOSE");
  return v && v[0] && std::string(v) != "0";
}

nlohmann::ordered_json pose_json(const Pose& p) {
  return {{"x", p.x}, {"y", p.y}, {"heading", p.heading_deg}};
}

Pose pose_from_json(const nlohmann::json& j) {
  Pose p;
  p.x = j.at("x").get<Scalar>();
  p.y = j.at("y").get<Scalar>();
  p.heading_deg = j.at("heading").get<Scalar>();
  return p;
}

nlohmann::ordered_json summary_json(const BeliefSummary& s) {
  return {{"est_r", s.map_estimate.r},
          {"est_theta", s.map_estimate.theta_deg},
          {"r_uncertainty", s.r_uncertainty_m},
          {"theta_uncertainty", s.theta_uncertainty_deg},
          {"entropy", s.entropy_nats}};
}

BeliefSummary summary_from_json(const nlohmann::json& j) {
  BeliefSummary s;
  s.map_estimate.r = j.at("est_r").get<Scalar>();
  s.map_estimate.theta_deg = j.at("est_theta").get<Scalar>();
  s.r_uncertainty_m = j.at("r_uncertainty").get<Scalar>();
  s.theta_uncertainty_deg = j.at("theta_uncertainty").get<Scalar>();
  s.entropy_nats = j.at("entropy").get<Scalar>();
  return s;
}

}  // namespace

std::vector<SceneMap> generate_map_set(const ExperimentSpec& spec) {
  const auto slots = default_slot_layout();
  std::vector<SceneMap> maps;
  int cond_index = 0;
  for (AngleClass angle : spec.angles) {
    for (int objs : spec.object_counts) {
      for (int dist : spec.distractor_counts) {
        for (int m = 0; m < spec.maps_per_condition; ++m) {
          const std::uint64_t seed = mix_seed(spec.base_seed, kMapStream,
                                              static_cast<std::uint64_t>(cond_index),
                                              static_cast<std::uint64_t>(m));
          maps.push_back(generate_map(Condition{angle, objs, dist}, slots, seed));
        }
        ++cond_index;
      }
    }
  }
  return maps;
}

MetricRow metric_row_from_log(const EpisodeLog& log, const Condition& condition,
                              int repeat, Scalar seconds_per_step) {
  if (!log.outcome) throw std::invalid_argument("metric_row_from_log: unfinished episode");
  MetricRow row;
  row.map_id = log.map_id;
  row.condition = condition;
  row.repeat = repeat;
  row.outcome = *log.outcome;
  row.steps = log.num_steps;
  row.search_time_s = log.num_steps * seconds_per_step;
  row.head_turn_deg = log.head_turn_deg;
  row.displacement_m = log.displacement_m;
  row.episode_return = log.return_sum;
  return row;
}

ExperimentResult run_experiment(const ExperimentSpec& spec,
                                const std::vector<SceneMap>& maps,
                                const SimulationConfig& cfg) {
  const int repeats = spec.repeats;
  ExperimentResult result;
  result.rows.resize(maps.size() * repeats);
  result.logs.resize(maps.size() * repeats);

  std::atomic<size_t> next_map{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&]() {
    auto policy = make_policy(spec.policy, cfg);
    while (!failed.load()) {
      const size_t m = next_map.fetch_add(1);
      if (m >= maps.size()) break;
      try {
        Environment env(maps[m], cfg);
        env.set_record_snapshots(spec.record_snapshots);
        env.set_policy_name(policy->name());
        for (int r = 0; r < repeats; ++r) {
          const std::uint64_t env_seed =
              mix_seed(spec.base_seed, kEnvStream, static_cast<std::uint64_t>(m),
                       static_cast<std::uint64_t>(r));
          Rng policy_rng(mix_seed(spec.base_seed, kPolicyStream,
                                  static_cast<std::uint64_t>(m),
                                  static_cast<std::uint64_t>(r)));
          CognitiveState state = env.reset(env_seed);
          env.set_policy_name(policy->name());
          while (!env.done()) {
            const Action a = policy->decide(state, policy_rng);
            state = env.step(a).state;
          }
          result.logs[m * repeats + r] = env.log();
          result.rows[m * repeats + r] = metric_row_from_log(
              env.log(), maps[m].condition, r, cfg.seconds_per_step);
        }
        if (verbose()) std::fprintf(stderr, "map %zu/%zu done\n", m + 1, maps.size());
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_message = e.what();
        failed.store(true);
      }
    }
  };

  int threads = spec.threads > 0 ? spec.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  threads = std::min<int>(threads, static_cast<int>(maps.size()) + 1);
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("run_experiment: " + error_message);
  return result;
}

std::string metrics_to_csv(const std::vector<MetricRow>& rows) {
  std::ostringstream ss;
  ss << "map_id,angle,num_objects,num_distractors,repeat,outcome,steps,"
        "search_time_s,head_turn_deg,displacement_m,return\n";
  for (const auto& r : rows) {
    ss << r.map_id << "," << to_string(r.condition.angle) << ","
       << r.condition.num_objects << "," << r.condition.num_distractors << ","
       << r.repeat << "," << to_string(r.outcome) << "," << r.steps << ","
       << fmt(r.search_time_s) << "," << fmt(r.head_turn_deg) << ","
       << fmt(r.displacement_m) << "," << fmt(r.episode_return) << "\n";
  }
  return ss.str();
}

std::vector<MetricRow> metrics_from_csv(const std::string& text) {
  std::vector<MetricRow> rows;
  std::istringstream lines(text);
  std::string line;
  bool header = true;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string field;
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (fields.size() != 11) throw std::runtime_error("metrics csv: bad row: " + line);
    MetricRow r;
    r.map_id = fields[0];
    r.condition.angle = angle_class_from_string(fields[1]);
    r.condition.num_objects = std::stoi(fields[2]);
    r.condition.num_distractors = std::stoi(fields[3]);
    r.repeat = std::stoi(fields[4]);
    r.outcome = outcome_from_string(fields[5]);
    r.steps = std::stoi(fields[6]);
    r.search_time_s = std::stod(fields[7]);
    r.head_turn_deg = std::stod(fields[8]);
    r.displacement_m = std::stod(fields[9]);
    r.episode_return = std::stod(fields[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

Scalar median(std::vector<Scalar> values) {
  if (values.empty()) throw std::invalid_argument("median: empty input");
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

namespace {

struct ConditionKey {
  int angle, objs, dist;
  bool operator<(const ConditionKey& o) const {
    if (angle != o.angle) return angle < o.angle;
    if (objs != o.objs) return objs < o.objs;
    return dist < o.dist;
  }
  bool operator==(const ConditionKey& o) const {
    return angle == o.angle && objs == o.objs && dist == o.dist;
  }
};

ConditionKey key_of(const Condition& c) {
  return ConditionKey{static_cast<int>(c.angle), c.num_objects, c.num_distractors};
}

}  // namespace

std::vector<ConditionSummary> aggregate_by_condition(const std::vector<MetricRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: empty metrics");
  std::vector<std::pair<ConditionKey, std::vector<const MetricRow*>>> groups;
  for (const auto& r : rows) {
    const ConditionKey k = key_of(r.condition);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == k; });
    if (it == groups.end()) {
      groups.push_back({k, {}});
      it = groups.end() - 1;
    }
    it->second.push_back(&r);
  }
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<ConditionSummary> out;
  for (const auto& [key, members] : groups) {
    ConditionSummary s;
    s.condition = members.front()->condition;
    s.n = static_cast<int>(members.size());
    std::vector<Scalar> steps, times, turns, disp;
    Scalar correct = 0.0, ret = 0.0, mean_steps = 0.0;
    for (const MetricRow* r : members) {
      steps.push_back(r->steps);
      times.push_back(r->search_time_s);
      turns.push_back(r->head_turn_deg);
      disp.push_back(r->displacement_m);
      ret += r->episode_return;
      mean_steps += r->steps;
      if (r->outcome == Outcome::committed_correct) correct += 1.0;
    }
    s.accuracy = correct / s.n;
    s.median_steps = median(steps);
    s.mean_steps = mean_steps / s.n;
    s.median_search_time_s = median(times);
    s.median_head_turn_deg = median(turns);
    s.median_displacement_m = median(disp);
    s.mean_return = ret / s.n;
    out.push_back(s);
  }
  return out;
}

std::vector<MapSummary> aggregate_by_map(const std::vector<MetricRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("aggregate: empty metrics");
  std::vector<std::string> order;
  for (const auto& r : rows)
    if (std::find(order.begin(), order.end(), r.map_id) == order.end())
      order.push_back(r.map_id);

  std::vector<MapSummary> out;
  for (const auto& id : order) {
    MapSummary s;
    s.map_id = id;
    std::vector<Scalar> steps, times, turns, disp;
    Scalar correct = 0.0;
    for (const auto& r : rows) {
      if (r.map_id != id) continue;
      s.condition = r.condition;
      steps.push_back(r.steps);
      times.push_back(r.search_time_s);
      turns.push_back(r.head_turn_deg);
      disp.push_back(r.displacement_m);
      if (r.outcome == Outcome::committed_correct) correct += 1.0;
      ++s.n;
    }
    s.accuracy = correct / s.n;
    s.median_steps = median(steps);
    s.median_search_time_s = median(times);
    s.median_head_turn_deg = median(turns);
    s.median_displacement_m = median(disp);
    out.push_back(s);
  }
  return out;
}

std::string condition_summary_csv(const std::vector<ConditionSummary>& rows,
                                  Scalar human_accuracy) {
  std::ostringstream ss;
  ss << "angle,num_objects,num_distractors,n,accuracy,median_steps,mean_steps,"
        "median_search_time_s,median_head_turn_deg,median_displacement_m,mean_return";
  const bool with_ref = human_accuracy >= 0.0;
  if (with_ref) ss << ",human_accuracy";
  ss << "\n";
  for (const auto& s : rows) {
    ss << to_string(s.condition.angle) << "," << s.condition.num_objects << ","
       << s.condition.num_distractors << "," << s.n << "," << fmt(s.accuracy) << ","
       << fmt(s.median_steps) << "," << fmt(s.mean_steps) << ","
       << fmt(s.median_search_time_s) << "," << fmt(s.median_head_turn_deg) << ","
       << fmt(s.median_displacement_m) << "," << fmt(s.mean_return);
    if (with_ref) ss << "," << fmt(human_accuracy);
    ss << "\n";
  }
  return ss.str();
}

std::string map_summary_csv(const std::vector<MapSummary>& rows) {
  std::ostringstream ss;
  ss << "map_id,angle,num_objects,num_distractors,n,accuracy,median_steps,"
        "median_search_time_s,median_head_turn_deg,median_displacement_m\n";
  for (const auto& s : rows) {
    ss << s.map_id << "," << to_string(s.condition.angle) << ","
       << s.condition.num_objects << "," << s.condition.num_distractors << "," << s.n
       << "," << fmt(s.accuracy) << "," << fmt(s.median_steps) << ","
       << fmt(s.median_search_time_s) << "," << fmt(s.median_head_turn_deg) << ","
       << fmt(s.median_displacement_m) << "\n";
  }
  return ss.str();
}

std::string episode_to_jsonl(const EpisodeLog& log) {
  std::ostringstream ss;
  nlohmann::ordered_json header;
  header["format"] = "avsearch-episode";
  header["version"] = 1;
  header["map_id"] = log.map_id;
  header["env_seed"] = log.env_seed;
  header["policy"] = log.policy_name;
  header["start_pose"] = pose_json(log.start_pose);
  header["turn_angle_deg"] = log.turn_angle_deg;
  header["wrong_commit_penalty"] = log.wrong_commit_penalty;
  ss << header.dump() << "\n";

  for (const auto& s : log.steps) {
    nlohmann::ordered_json j;
    j["t"] = s.t;
    j["action"] = to_string(s.action);
    j["pose"] = pose_json(s.pose);
    j["reward"] = s.reward;
    j["summary"] = summary_json(s.summary);
    if (s.belief_snapshot) {
      auto arr = nlohmann::json::array();
      const GridArray& g = *s.belief_snapshot;
      for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index k = 0; k < g.cols(); ++k) arr.push_back(g(i, k));
      j["belief"] = std::move(arr);
      j["belief_shape"] = {g.rows(), g.cols()};
    }
    ss << j.dump() << "\n";
  }

  nlohmann::ordered_json footer;
  footer["outcome"] = log.outcome ? to_string(*log.outcome) : "unfinished";
  footer["return"] = log.return_sum;
  footer["steps"] = log.num_steps;
  footer["head_turn_deg"] = log.head_turn_deg;
  footer["displacement_m"] = log.displacement_m;
  if (log.commit_estimate) {
    footer["commit"] = {{"r", log.commit_estimate->r},
                        {"theta", log.commit_estimate->theta_deg},
                        {"x", log.commit_point->x()},
                        {"y", log.commit_point->y()}};
  }
  footer["tie_break"] = log.commit_tie_break;
  ss << footer.dump() << "\n";
  return ss.str();
}

EpisodeLog episode_from_jsonl(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  EpisodeLog log;
  bool have_header = false;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    if (!have_header) {
      if (j.value("format", "") != "avsearch-episode")
        throw std::runtime_error("episode log: unknown format");
      log.map_id = j.at("map_id").get<std::string>();
      log.env_seed = j.at("env_seed").get<std::uint64_t>();
      log.policy_name = j.at("policy").get<std::string>();
      log.start_pose = pose_from_json(j.at("start_pose"));
      log.turn_angle_deg = j.at("turn_angle_deg").get<Scalar>();
      log.wrong_commit_penalty = j.at("wrong_commit_penalty").get<Scalar>();
      have_header = true;
    } else if (j.contains("t")) {
      StepRecord s;
      s.t = j.at("t").get<int>();
      s.action = action_from_string(j.at("action"));
      s.pose = pose_from_json(j.at("pose"));
      s.reward = j.at("reward").get<Scalar>();
      s.summary = summary_from_json(j.at("summary"));
      if (j.contains("belief")) {
        const auto shape = j.at("belief_shape");
        GridArray g(shape.at(0).get<Eigen::Index>(), shape.at(1).get<Eigen::Index>());
        const auto& arr = j.at("belief");
        Eigen::Index n = 0;
        for (Eigen::Index i = 0; i < g.rows(); ++i)
          for (Eigen::Index k = 0; k < g.cols(); ++k) g(i, k) = arr.at(n++).get<Scalar>();
        s.belief_snapshot = std::move(g);
      }
      log.steps.push_back(std::move(s));
    } else {
      const std::string outcome = j.at("outcome").get<std::string>();
      if (outcome != "unfinished") log.outcome = outcome_from_string(outcome);
      log.return_sum = j.at("return").get<Scalar>();
      log.num_steps = j.at("steps").get<int>();
      log.head_turn_deg = j.at("head_turn_deg").get<Scalar>();
      log.displacement_m = j.at("displacement_m").get<Scalar>();
      if (j.contains("commit")) {
        log.commit_estimate =
            EgoPolar{j.at("commit").at("r").get<Scalar>(),
                     j.at("commit").at("theta").get<Scalar>()};
        log.commit_point = Vec2{j.at("commit").at("x").get<Scalar>(),
                                j.at("commit").at("y").get<Scalar>()};
      }
      log.commit_tie_break = j.at("tie_break").get<bool>();
    }
  }
  if (!have_header) throw std::runtime_error("episode log: missing header");
  return log;
}

TrajectoryRender render_trajectory(const EpisodeLog& log, const SceneMap& map) {
  TrajectoryRender out;

  // Character view: one cell per meter, top row at max depth.
  const int w = static_cast<int>(std::lround(map.width));
  const int h = static_cast<int>(std::lround(map.depth));
  std::vector<std::string> rows(h, std::string(w, '.'));
  auto put = [&](Scalar x, Scalar y, char c) {
    int cx = std::clamp(static_cast<int>(std::floor(x)), 0, w - 1);
    int cy = std::clamp(static_cast<int>(std::floor(y)), 0, h - 1);
    rows[h - 1 - cy][cx] = c;
  };
  for (const auto& o : map.objects) put(o.position.x(), o.position.y(), 'o');
  for (const auto& s : log.steps) put(s.pose.x, s.pose.y, '*');
  put(map.target().position.x(), map.target().position.y(), 'T');
  if (log.commit_point) put(log.commit_point->x(), log.commit_point->y(), '+');
  put(log.start_pose.x, log.start_pose.y, 'S');
  if (!log.steps.empty()) put(log.steps.back().pose.x, log.steps.back().pose.y, 'E');
  std::ostringstream text;
  for (const auto& r : rows) text << r << "\n";
  out.text = text.str();

  // Grayscale image at 10 px per meter.
  const int scale = 10;
  const int iw = w * scale, ih = h * scale;
  std::vector<int> img(static_cast<size_t>(iw) * ih, 255);
  auto pixel = [&](int px, int py, int level) {
    if (px < 0 || px >= iw || py < 0 || py >= ih) return;
    img[static_cast<size_t>(py) * iw + px] = level;
  };
  auto world_px = [&](Scalar x) { return static_cast<int>(std::lround(x * scale)); };
  auto world_py = [&](Scalar y) { return ih - 1 - static_cast<int>(std::lround(y * scale)); };
  for (const auto& o : map.objects) {
    const int level = o.is_target ? 90 : 170;
    const int cx = world_px(o.position.x()), cy = world_py(o.position.y());
    const int rad = static_cast<int>(std::lround(o.footprint_radius * scale));
    for (int dy = -rad; dy <= rad; ++dy)
      for (int dx = -rad; dx <= rad; ++dx)
        if (dx * dx + dy * dy <= rad * rad) pixel(cx + dx, cy + dy, level);
  }
  auto line = [&](const Vec2& a, const Vec2& b, int level) {
    const int steps = std::max(1, static_cast<int>((b - a).norm() * scale * 2));
    for (int s = 0; s <= steps; ++s) {
      const Vec2 p = a + (static_cast<Scalar>(s) / steps) * (b - a);
      pixel(world_px(p.x()), world_py(p.y()), level);
    }
  };
  Vec2 prev = log.start_pose.position();
  for (const auto& s : log.steps) {
    line(prev, s.pose.position(), 20);
    prev = s.pose.position();
  }
  auto square = [&](const Vec2& p, int half, int level) {
    for (int dy = -half; dy <= half; ++dy)
      for (int dx = -half; dx <= half; ++dx)
        pixel(world_px(p.x()) + dx, world_py(p.y()) + dy, level);
  };
  square(log.start_pose.position(), 3, 0);
  if (!log.steps.empty()) square(log.steps.back().pose.position(), 2, 60);
  if (log.commit_point) {
    for (int d = -4; d <= 4; ++d) {
      pixel(world_px(log.commit_point->x()) + d, world_py(log.commit_point->y()) + d, 0);
      pixel(world_px(log.commit_point->x()) + d, world_py(log.commit_point->y()) - d, 0);
    }
  }
  std::ostringstream pgm;
  pgm << "P2\n" << iw << " " << ih << "\n255\n";
  for (int py = 0; py < ih; ++py) {
    for (int px = 0; px < iw; ++px)
      pgm << img[static_cast<size_t>(py) * iw + px] << (px + 1 == iw ? "" : " ");
    pgm << "\n";
  }
  out.pgm = pgm.str();
  return out;
}

namespace {

struct CheckReporter {
  std::ostream& out;
  bool all_ok = true;

  void check(const std::string& name, bool ok) {
    out << (ok ? "[ ok ] " : "[FAIL] ") << name << "\n";
    all_ok = all_ok && ok;
  }
};

}  // namespace

bool selftest(std::ostream& out, std::uint64_t seed) {
  CheckReporter rep{out};
  const PolarGrid grid;
  const AuditoryConfig acfg;
  const SimulationConfig cfg;

  // Angle arithmetic.
  {
    bool ok = wrap_angle(190.0) == -170.0 && wrap_angle(-180.0) == -180.0 &&
              wrap_angle(720.0) == 0.0;
    Rng rng(mix_seed(seed, 1));
    for (int i = 0; i < 1000 && ok; ++i) {
      const Scalar a = rng.uniform(-1e4, 1e4);
      const Scalar w = wrap_angle(a);
      ok = w >= -180.0 && w < 180.0 && wrap_angle(w) == w;
    }
    rep.check("wrap_angle examples and idempotence", ok);
  }

  // Conversion inverse.
  {
    Rng rng(mix_seed(seed, 2));
    Scalar max_err = 0.0;
    for (int i = 0; i < 1000; ++i) {
      Pose p{rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(-180, 180)};
      const Vec2 q{rng.uniform(-20, 20), rng.uniform(-20, 20)};
      if ((q - p.position()).norm() < 1e-6) continue;
      const Vec2 back = ego_to_world(p, world_to_ego(p, q));
      max_err = std::max(max_err, (back - q).norm());
    }
    rep.check("polar/cartesian inverse within 1e-9", max_err < 1e-9);
  }

  // Grid bin center round trips.
  {
    bool ok = true;
    for (int i = 0; i < grid.num_range_bins() && ok; ++i)
      for (int k = 0; k < grid.num_azimuth_bins() && ok; ++k) {
        ok = grid.range_bin(grid.range_center(i)) == i &&
             grid.azimuth_bin(grid.azimuth_center(k)) == k;
      }
    ok = ok && grid.azimuth_bin(179.5) != grid.azimuth_bin(-180.0) &&
         grid.azimuth_bin(180.0) == grid.azimuth_bin(-180.0);
    rep.check("grid bin centers round-trip", ok);
  }

  // Arrival-time model.
  {
    const Eigen::ArrayXd table = itd_table(grid, acfg);
    bool ok = predict_itd(0.0, acfg) == 0.0;
    ok = ok && std::abs(predict_itd(90.0, acfg) * 1e6 - 655.9) <= 0.1;
    for (int k = 0; k < 360 && ok; ++k) {
      const int neg = (360 - k) % 360;
      const int mirror = (540 - k) % 360;
      ok = std::abs(table[k] + table[neg]) <= 1e-12 &&
           std::abs(table[k] - table[mirror]) <= 1e-12;
    }
    rep.check("itd model symmetries", ok);
  }

  // Likelihood structure.
  {
    Rng rng(mix_seed(seed, 3));
    const ItdObservation obs{predict_itd(37.0, acfg) + rng.normal(0.0, acfg.itd_noise_s)};
    const BeliefMap la = audio_likelihood(obs, grid, acfg);
    bool ok = true;
    for (int k = 0; k < grid.num_azimuth_bins() && ok; ++k)
      ok = (la.log_values.col(k) == la.log_values(0, k)).all();
    rep.check("audio likelihood is range-constant", ok);
  }

  // Belief operations.
  {
    BeliefMap u = init_uniform(grid);
    bool ok = std::abs(summarize(u).entropy_nats - std::log(10800.0)) < 1e-9;
    BeliefMap point(grid);
    point.log_values.setConstant(-1e9);
    point.log_values(grid.range_bin(5.0), grid.azimuth_bin(0.0)) = 0.0;
    point.normalize();
    BeliefMap moved = transport(point, Action::move_forward, 1.0, 30.0);
    const BeliefSummary s = summarize(moved);
    ok = ok && s.map_range_bin == grid.range_bin(4.0) &&
         s.map_azimuth_bin == grid.azimuth_bin(0.0);
    BeliefMap turned = transport(point, Action::turn_left, 1.0, 30.0);
    turned = transport(turned, Action::turn_right, 1.0, 30.0);
    ok = ok && ((turned.log_values - point.log_values).abs().maxCoeff() <= 1e-12);
    rep.check("belief transport point-mass cases", ok);
  }

  // Normalization fuzz.
  {
    Rng rng(mix_seed(seed, 4));
    bool ok = true;
    for (int trial = 0; trial < 100 && ok; ++trial) {
      BeliefMap b = init_uniform(grid);
      for (int op = 0; op < 5 && ok; ++op) {
        const ItdObservation obs{rng.uniform(-7e-4, 7e-4)};
        BeliefMap la = audio_likelihood(obs, grid, acfg);
        BeliefMap lv = init_uniform(grid);
        lv.log_values += rng.uniform(0.0, 1.0);
        b = leaky_update(b, fuse(la, lv, cfg.belief), cfg.belief);
        ok = std::abs(b.total_mass() - 1.0) < 1e-9;
        const int action_pick = static_cast<int>(rng.uniform_int(4));
        b = transport(b, static_cast<Action>(action_pick), 1.0, 30.0);
        ok = ok && std::abs(b.total_mass() - 1.0) < 1e-9;
      }
    }
    rep.check("normalization after belief operations", ok);
  }

  // Map generation determinism and validity.
  {
    const auto slots = default_slot_layout();
    const SceneMap a = generate_map(Condition{AngleClass::front, 5, 0}, slots, 1);
    const SceneMap b = generate_map(Condition{AngleClass::front, 5, 0}, slots, 1);
    bool ok = map_to_json(a) == map_to_json(b);
    const SceneMap c = generate_map(Condition{AngleClass::back, 12, 4}, slots, 7);
    ok = ok && c.objects.size() == 12;
    const EgoPolar ego = world_to_ego(c.start_pose, c.target().position);
    ok = ok && classify_angle(ego.theta_deg) == AngleClass::back;
    rep.check("map generation deterministic and valid", ok);
  }

  // Reward arithmetic on crafted scenes.
  {
    SceneMap m;
    m.id = "selftest_reward";
    m.slots = {Vec2{14.5, 8.5}, Vec2{20.5, 4.5}};
    SceneObject target;
    target.id = 0;
    target.position = m.slots[0];
    target.color = Color::blue;
    target.is_target = true;
    SceneObject other;
    other.id = 1;
    other.position = m.slots[1];
    other.color = Color::white;
    other.is_target = false;
    m.objects = {target, other};
    m.condition = Condition{AngleClass::front, 2, 0};
    m.start_pose = Pose{14.5, 6.0, 0.0};  // 2.5 m dead ahead of the target

    SimulationConfig quiet = cfg;
    quiet.env.observation_noise_scale = 0.0;
    Environment env(m, quiet);
    env.reset(seed);
    const auto commit = env.step(Action::commit);
    bool ok = commit.reward == 9.9 && commit.outcome == Outcome::committed_correct;

    env.reset(seed);
    const auto stay = env.step(Action::stay);
    ok = ok && stay.reward == -0.1 && !stay.done;

    SceneMap wall = m;
    wall.start_pose = Pose{14.5, 6.9, 0.0};  // car footprint 0.7 m ahead
    Environment env2(wall, quiet);
    env2.reset(seed);
    const auto crash = env2.step(Action::move_forward);
    ok = ok && crash.reward == -5.4 && crash.outcome == Outcome::collision;
    rep.check("step reward arithmetic", ok);
  }

  // Planner sanity.
  {
    GreedyPlanner planner(cfg);
    CognitiveState state;
    state.posterior = init_uniform(grid);
    state.posterior.log_values.setConstant(-1e9);
    state.posterior.log_values(grid.range_bin(6.0), grid.azimuth_bin(20.0)) = 0.0;
    state.posterior.normalize();
    state.summary = summarize(state.posterior);
    Rng r1(mix_seed(seed, 5)), r2(mix_seed(seed, 5));
    bool ok = planner.decide(state, r1) == Action::commit;
    ok = ok && planner.decide(state, r2) == Action::commit;
    rep.check("planner commits on a one-hot posterior", ok);
  }

  // Mini experiment determinism.
  {
    ExperimentSpec spec;
    spec.angles = {AngleClass::front, AngleClass::back};
    spec.object_counts = {5};
    spec.distractor_counts = {0};
    spec.maps_per_condition = 1;
    spec.repeats = 2;
    spec.policy = "heuristic";
    spec.base_seed = seed;
    spec.threads = 2;
    const auto maps = generate_map_set(spec);
    const auto a = run_experiment(spec, maps, cfg);
    const auto b = run_experiment(spec, maps, cfg);
    rep.check("experiment re-run is byte-identical",
              metrics_to_csv(a.rows) == metrics_to_csv(b.rows));
  }

  out << (rep.all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES\n");
  return rep.all_ok;
}

}  // namespace avsearch
