#include "lumen/io.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "json.hpp"

namespace lumen::io {

using json = nlohmann::ordered_json;

namespace {

std::string with_line(const std::string& what, std::optional<std::size_t> line) {
  return line ? "line " + std::to_string(*line) + ": " + what : what;
}

double finite_number(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw FormatError(std::string("missing field '") + key + "'");
  }
  if (!it->is_number()) {
    throw FormatError(std::string("field '") + key + "' is not a number");
  }
  const double v = it->get<double>();
  if (!std::isfinite(v)) {
    throw FormatError(std::string("field '") + key + "' is not finite");
  }
  return v;
}

std::string string_field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw FormatError(std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

template <typename T>
T optional_field(const json& obj, const char* key, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    return fallback;
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

json parse_document(std::istream& in, const char* what) {
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

json to_json(const CameraIntrinsics& c) {
  return json{{"c_x", c.c_x}, {"c_y", c.c_y}, {"f", c.f}};
}

CameraIntrinsics intrinsics_from(const json& j, CameraIntrinsics fallback) {
  if (!j.is_object()) {
    throw FormatError("intrinsics must be an object");
  }
  return {optional_field(j, "c_x", fallback.c_x), optional_field(j, "c_y", fallback.c_y),
          optional_field(j, "f", fallback.f)};
}

json to_json(const FixedTransform2D& t) {
  return json{{"dx", t.dx}, {"dy", t.dy}, {"dtheta", t.dtheta}};
}

FixedTransform2D transform_from(const json& j, FixedTransform2D fallback) {
  if (!j.is_object()) {
    throw FormatError("cam1_to_cam2 must be an object");
  }
  return {optional_field(j, "dx", fallback.dx), optional_field(j, "dy", fallback.dy),
          optional_field(j, "dtheta", fallback.dtheta)};
}

json to_json(const SolverConfig& s) {
  return json{{"max_iterations", s.max_iterations},
              {"step_tolerance", s.step_tolerance},
              {"cost_tolerance", s.cost_tolerance},
              {"initial_damping", s.initial_damping},
              {"angle_weight", s.angle_weight},
              {"distance_weight", s.distance_weight}};
}

SolverConfig solver_from(const json& j) {
  SolverConfig s;
  s.max_iterations = optional_field(j, "max_iterations", s.max_iterations);
  s.step_tolerance = optional_field(j, "step_tolerance", s.step_tolerance);
  s.cost_tolerance = optional_field(j, "cost_tolerance", s.cost_tolerance);
  s.initial_damping = optional_field(j, "initial_damping", s.initial_damping);
  s.angle_weight = optional_field(j, "angle_weight", s.angle_weight);
  s.distance_weight = optional_field(j, "distance_weight", s.distance_weight);
  return s;
}

json to_json(const EstimatorConfig& c) {
  return json{{"alt_threshold_tau", c.alt_threshold_tau},
              {"pauta_min_samples", c.pauta_min_samples},
              {"min_obs_for_solve", c.min_obs_for_solve},
              {"distance_epsilon", c.distance_epsilon},
              {"solver", to_json(c.solver)},
              {"cam_height_h1", c.cam_height_h1},
              {"intrinsics", to_json(c.intrinsics)},
              {"cam1_to_cam2", to_json(c.cam1_to_cam2)}};
}

EstimatorConfig estimator_from(const json& j) {
  if (!j.is_object()) {
    throw FormatError("estimator config must be a JSON object");
  }
  EstimatorConfig c;
  c.alt_threshold_tau = optional_field(j, "alt_threshold_tau", c.alt_threshold_tau);
  c.pauta_min_samples = optional_field(j, "pauta_min_samples", c.pauta_min_samples);
  c.min_obs_for_solve = optional_field(j, "min_obs_for_solve", c.min_obs_for_solve);
  c.distance_epsilon = optional_field(j, "distance_epsilon", c.distance_epsilon);
  if (j.contains("solver")) {
    c.solver = solver_from(j.at("solver"));
  }
  c.cam_height_h1 = optional_field(j, "cam_height_h1", c.cam_height_h1);
  if (j.contains("intrinsics")) {
    c.intrinsics = intrinsics_from(j.at("intrinsics"), c.intrinsics);
  }
  if (j.contains("cam1_to_cam2")) {
    c.cam1_to_cam2 = transform_from(j.at("cam1_to_cam2"), c.cam1_to_cam2);
  }
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid estimator config: ") + e.what());
  }
  return c;
}

const char* kind_name(sim::TrajectoryKind kind) {
  switch (kind) {
    case sim::TrajectoryKind::kLawnmower: return "lawnmower";
    case sim::TrajectoryKind::kCircuit: return "circuit";
    case sim::TrajectoryKind::kWaypointList: return "waypoint-list";
  }
  return "unknown";
}

sim::TrajectoryKind kind_from(const std::string& name) {
  if (name == "lawnmower") return sim::TrajectoryKind::kLawnmower;
  if (name == "circuit") return sim::TrajectoryKind::kCircuit;
  if (name == "waypoint-list") return sim::TrajectoryKind::kWaypointList;
  throw FormatError("unknown trajectory kind '" + name + "'");
}

json truth_to_json(const GroundTruthLed& led) {
  return json{{"led", led.led}, {"x", led.x}, {"y", led.y}, {"h", led.h}};
}

GroundTruthLed truth_from(const json& j) {
  if (!j.is_object()) {
    throw FormatError("LED entry must be an object");
  }
  return {string_field(j, "led"), finite_number(j, "x"), finite_number(j, "y"),
          finite_number(j, "h")};
}

ObservationRecord record_from(const json& j) {
  if (!j.is_object()) {
    throw FormatError("record is not a JSON object");
  }
  ObservationRecord r;
  r.t = finite_number(j, "t");
  r.led = string_field(j, "led");
  r.u = finite_number(j, "u");
  r.v = finite_number(j, "v");
  r.yaw = finite_number(j, "yaw");
  r.x = finite_number(j, "x");
  r.y = finite_number(j, "y");
  r.theta = finite_number(j, "theta");
  return r;
}

}  // namespace

FormatError::FormatError(const std::string& what, std::optional<std::size_t> line)
    : std::runtime_error(with_line(what, line)), line_(line) {}

LogReadResult read_log(std::istream& in, const ParseOptions& options) {
  LogReadResult out;
  std::string text;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::optional<double> last_t;
  while (std::getline(in, text)) {
    ++line_no;
    if (text.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    const bool first = !seen_content;
    seen_content = true;
    try {
      json j;
      try {
        j = json::parse(text);
      } catch (const json::exception&) {
        throw FormatError("not a valid JSON object");
      }
      if (first && j.is_object() && j.contains("schema")) {
        const json& version_field = j.value("version", json());
        const int version = version_field.is_number_integer() ? version_field.get<int>() : -1;
        if (j.at("schema") != kLogSchemaName || version != kLogSchemaVersion) {
          // Never skippable: the remaining lines cannot be trusted.
          throw FormatError("unsupported log schema (version " + std::to_string(version) +
                                ")",
                            line_no);
        }
        continue;
      }
      ObservationRecord rec = record_from(j);
      if (last_t && rec.t < *last_t) {
        out.warnings.push_back(with_line("timestamp goes backwards", line_no));
      }
      last_t = rec.t;
      out.records.push_back(std::move(rec));
    } catch (const FormatError& e) {
      if (e.line()) {
        throw;
      }
      if (options.strict) {
        throw FormatError(e.what(), line_no);
      }
      out.skipped.push_back({line_no, e.what()});
    }
  }
  return out;
}

void write_log(std::ostream& out, std::span<const ObservationRecord> records) {
  out << json{{"schema", kLogSchemaName}, {"version", kLogSchemaVersion}}.dump() << '\n';
  for (const auto& r : records) {
    const json j{{"t", r.t},     {"led", r.led}, {"u", r.u}, {"v", r.v},
                 {"yaw", r.yaw}, {"x", r.x},     {"y", r.y}, {"theta", r.theta}};
    out << j.dump() << '\n';
  }
}

Observation to_observation(const ObservationRecord& rec, const CameraIntrinsics& intrinsics,
                           const FixedTransform2D& cam1_to_cam2) {
  const PlanarPose cam1{rec.x, rec.y, wrap_angle(rec.theta)};
  return make_observation(PixelPoint{rec.u, rec.v}, rec.yaw, intrinsics,
                          apply_fixed_transform(cam1, cam1_to_cam2), LedKey(rec.led), rec.t);
}

ParsedLog parse_log(std::istream& in, const CameraIntrinsics& intrinsics,
                    const FixedTransform2D& cam1_to_cam2, const ParseOptions& options) {
  LogReadResult raw = read_log(in, options);
  ParsedLog out;
  out.skipped = std::move(raw.skipped);
  out.warnings = std::move(raw.warnings);
  out.observations.reserve(raw.records.size());
  for (const auto& rec : raw.records) {
    out.observations.push_back(to_observation(rec, intrinsics, cam1_to_cam2));
  }
  return out;
}

std::vector<GroundTruthLed> read_truth(std::istream& in) {
  const json j = parse_document(in, "ground-truth file");
  if (!j.is_array()) {
    throw FormatError("ground-truth file must be a JSON array");
  }
  std::vector<GroundTruthLed> out;
  for (const auto& item : j) {
    out.push_back(truth_from(item));
  }
  return out;
}

void write_truth(std::ostream& out, std::span<const GroundTruthLed> leds) {
  json arr = json::array();
  for (const auto& led : leds) {
    arr.push_back(truth_to_json(led));
  }
  out << arr.dump(2) << '\n';
}

MapFile make_map_file(const EstimatorConfig& cfg, std::vector<LedMapEntry> entries) {
  MapFile map;
  map.header.intrinsics = cfg.intrinsics;
  map.header.cam_height_h1 = cfg.cam_height_h1;
  map.header.cam1_to_cam2 = cfg.cam1_to_cam2;
  map.header.config = cfg;
  map.leds = std::move(entries);
  return map;
}

MapFile read_map(std::istream& in) {
  const json j = parse_document(in, "map file");
  if (!j.is_object() || !j.contains("header") || !j.contains("leds")) {
    throw FormatError("map file needs 'header' and 'leds'");
  }
  const json& h = j.at("header");
  MapFile map;
  map.header.schema_version = optional_field(h, "schema_version", -1);
  if (map.header.schema_version != kMapSchemaVersion) {
    throw FormatError("unsupported map schema version " +
                      std::to_string(map.header.schema_version));
  }
  map.header.tool_version = optional_field<std::string>(h, "tool_version", "");
  map.header.intrinsics = intrinsics_from(h.at("intrinsics"), {});
  map.header.cam_height_h1 = finite_number(h, "h1");
  map.header.cam1_to_cam2 = transform_from(h.at("cam1_to_cam2"), {});
  map.header.config = estimator_from(h.at("config"));

  if (!j.at("leds").is_array()) {
    throw FormatError("'leds' must be an array");
  }
  for (const auto& item : j.at("leds")) {
    LedMapEntry e;
    e.led = string_field(item, "led");
    e.x_hat = finite_number(item, "x");
    e.y_hat = finite_number(item, "y");
    e.height = finite_number(item, "h");
    e.n_observations = optional_field<std::size_t>(item, "n", 0);
    e.rms_residual = finite_number(item, "rms");
    map.leds.push_back(std::move(e));
  }
  return map;
}

void write_map(std::ostream& out, const MapFile& map) {
  json leds = json::array();
  for (const auto& e : map.leds) {
    leds.push_back(json{{"led", e.led},
                        {"x", e.x_hat},
                        {"y", e.y_hat},
                        {"h", e.height},
                        {"n", e.n_observations},
                        {"rms", e.rms_residual}});
  }
  const json j{{"header",
                {{"schema_version", map.header.schema_version},
                 {"tool_version", map.header.tool_version},
                 {"intrinsics", to_json(map.header.intrinsics)},
                 {"h1", map.header.cam_height_h1},
                 {"cam1_to_cam2", to_json(map.header.cam1_to_cam2)},
                 {"config", to_json(map.header.config)}}},
               {"leds", leds}};
  out << j.dump(2) << '\n';
}

sim::ScenarioConfig read_scenario(std::istream& in) {
  const json j = parse_document(in, "scenario file");
  if (!j.is_object()) {
    throw FormatError("scenario must be a JSON object");
  }
  sim::ScenarioConfig cfg;
  cfg.leds.clear();
  if (j.contains("leds")) {
    for (const auto& item : j.at("leds")) {
      cfg.leds.push_back(truth_from(item));
    }
  }
  if (j.contains("trajectory")) {
    const json& t = j.at("trajectory");
    auto& spec = cfg.trajectory;
    spec.kind = kind_from(optional_field<std::string>(t, "kind", kind_name(spec.kind)));
    spec.width = optional_field(t, "width", spec.width);
    spec.height = optional_field(t, "height", spec.height);
    spec.lane_spacing = optional_field(t, "lane_spacing", spec.lane_spacing);
    spec.radius = optional_field(t, "radius", spec.radius);
    spec.sample_count = optional_field(t, "sample_count", spec.sample_count);
    spec.speed = optional_field(t, "speed", spec.speed);
    if (t.contains("waypoints")) {
      for (const auto& w : t.at("waypoints")) {
        if (!w.is_array() || w.size() != 2) {
          throw FormatError("waypoint must be a [x, y] pair");
        }
        spec.waypoints.push_back({w[0].get<double>(), w[1].get<double>()});
      }
    }
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    cfg.noise.pixel_sigma = optional_field(n, "pixel_sigma", cfg.noise.pixel_sigma);
    cfg.noise.yaw_sigma = optional_field(n, "yaw_sigma", cfg.noise.yaw_sigma);
    cfg.noise.vo_position_sigma =
        optional_field(n, "vo_position_sigma", cfg.noise.vo_position_sigma);
    cfg.noise.vo_drift_rate = optional_field(n, "vo_drift_rate", cfg.noise.vo_drift_rate);
    cfg.noise.seed = optional_field(n, "seed", cfg.noise.seed);
  }
  if (j.contains("intrinsics")) {
    cfg.intrinsics = intrinsics_from(j.at("intrinsics"), cfg.intrinsics);
  }
  cfg.cam_height_h1 = optional_field(j, "cam_height_h1", cfg.cam_height_h1);
  if (j.contains("cam1_to_cam2")) {
    cfg.cam1_to_cam2 = transform_from(j.at("cam1_to_cam2"), cfg.cam1_to_cam2);
  }
  cfg.fov_max_pixel_radius =
      optional_field(j, "fov_max_pixel_radius", cfg.fov_max_pixel_radius);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("invalid scenario: ") + e.what());
  }
  return cfg;
}

void write_scenario(std::ostream& out, const sim::ScenarioConfig& cfg) {
  json leds = json::array();
  for (const auto& led : cfg.leds) {
    leds.push_back(truth_to_json(led));
  }
  const auto& t = cfg.trajectory;
  json traj{{"kind", kind_name(t.kind)}};
  switch (t.kind) {
    case sim::TrajectoryKind::kLawnmower:
      traj["width"] = t.width;
      traj["height"] = t.height;
      traj["lane_spacing"] = t.lane_spacing;
      break;
    case sim::TrajectoryKind::kCircuit:
      traj["radius"] = t.radius;
      break;
    case sim::TrajectoryKind::kWaypointList: {
      json pts = json::array();
      for (const auto& w : t.waypoints) {
        pts.push_back(json::array({w.x, w.y}));
      }
      traj["waypoints"] = pts;
      break;
    }
  }
  traj["sample_count"] = t.sample_count;
  traj["speed"] = t.speed;

  const json j{{"leds", leds},
               {"trajectory", traj},
               {"noise",
                {{"pixel_sigma", cfg.noise.pixel_sigma},
                 {"yaw_sigma", cfg.noise.yaw_sigma},
                 {"vo_position_sigma", cfg.noise.vo_position_sigma},
                 {"vo_drift_rate", cfg.noise.vo_drift_rate},
                 {"seed", cfg.noise.seed}}},
               {"intrinsics", to_json(cfg.intrinsics)},
               {"cam_height_h1", cfg.cam_height_h1},
               {"cam1_to_cam2", to_json(cfg.cam1_to_cam2)},
               {"fov_max_pixel_radius", cfg.fov_max_pixel_radius}};
  out << j.dump(2) << '\n';
}

EstimatorConfig read_estimator_config(std::istream& in) {
  return estimator_from(parse_document(in, "estimator config"));
}

void write_estimator_config(std::ostream& out, const EstimatorConfig& cfg) {
  out << to_json(cfg).dump(2) << '\n';
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    throw IoError("failed reading '" + path.string() + "'");
  }
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw IoError("cannot open '" + tmp.string() + "' for writing");
    }
    out << content;
    out.flush();
    if (!out) {
      throw IoError("failed writing '" + tmp.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot move output into place at '" + path.string() + "'");
  }
}

}  // namespace lumen::io
