#include "nifsim/scene_config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <set>

#include <json.hpp>

#include "nifsim/constants.hpp"
#include "nifsim/error.hpp"

namespace nifsim {

namespace {

using json = nlohmann::json;

const char* port_key(Port p) { return port_name(p); }

Port parse_port(const std::string& s, const std::string& path) {
  if (s == "O") return Port::O;
  if (s == "G") return Port::G;
  throw ConfigError(path + ": must be \"O\" or \"G\"");
}

// Reads typed fields with defaults and records keys that are not recognized.
class Reader {
 public:
  void keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(label(path) + ": must be an object");
    for (const auto& [key, value] : obj.items()) {
      const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
      if (!known) unknown_.push_back(join(path, key));
    }
  }

  void finish() const {
    if (unknown_.empty()) return;
    std::string msg = "unknown keys:";
    for (const auto& k : unknown_) msg += " " + k;
    throw ConfigError(msg);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
  static std::string label(const std::string& path) { return path.empty() ? "<root>" : path; }

  static double number(const json& obj, const std::string& path, const char* key, double def) {
    const auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_number()) throw ConfigError(join(path, key) + ": must be a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ConfigError(join(path, key) + ": must be finite");
    return v;
  }

  static long long integer(const json& obj, const std::string& path, const char* key, long long def) {
    const auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_number_integer()) throw ConfigError(join(path, key) + ": must be an integer");
    return it->get<long long>();
  }

  static std::size_t count(const json& obj, const std::string& path, const char* key, std::size_t def) {
    const long long v = integer(obj, path, key, static_cast<long long>(def));
    if (v < 1) throw ConfigError(join(path, key) + ": must be >= 1");
    return static_cast<std::size_t>(v);
  }

  static std::string text(const json& obj, const std::string& path, const char* key, const std::string& def) {
    const auto it = obj.find(key);
    if (it == obj.end()) return def;
    if (!it->is_string()) throw ConfigError(join(path, key) + ": must be a string");
    return it->get<std::string>();
  }

  static const json* child(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
  }

 private:
  std::vector<std::string> unknown_;
};

void require(bool ok, const std::string& field, const char* constraint) {
  if (!ok) throw ConfigError(field + ": " + constraint);
}

Material parse_material(const json& j, const std::string& path, Reader& rd) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name == "Al" || name == "aluminium" || name == "aluminum") return Material::aluminium();
    if (name == "Si" || name == "silicon") return Material::silicon();
    throw ConfigError(path + ": unknown material '" + name + "' (use Al, Si or an explicit object)");
  }
  rd.keys(j, path, {"name", "coherent_scattering_length", "atom_density"});
  Material m;
  m.name = Reader::text(j, path, "name", "custom");
  m.coherent_scattering_length = Reader::number(j, path, "coherent_scattering_length", 0.0);
  m.atom_density = Reader::number(j, path, "atom_density", 0.0);
  require(m.coherent_scattering_length != 0.0, path + ".coherent_scattering_length", "must be non-zero");
  require(m.atom_density > 0.0, path + ".atom_density", "must be > 0");
  return m;
}

json material_json(const Material& m) {
  return {{"name", m.name},
          {"coherent_scattering_length", m.coherent_scattering_length},
          {"atom_density", m.atom_density}};
}

Point2 parse_point(const json& obj, const std::string& path, const char* key) {
  const auto* c = Reader::child(obj, key);
  if (!c) return {};
  const std::string field = Reader::join(path, key);
  if (!c->is_array() || c->size() != 2 || !(*c)[0].is_number() || !(*c)[1].is_number())
    throw ConfigError(field + ": must be [u, v]");
  return {(*c)[0].get<double>(), (*c)[1].get<double>()};
}

PhaseObjectSpec parse_object(const json& j, const std::string& path, Reader& rd, double wavelength,
                             double field_extent) {
  if (!j.is_object()) throw ConfigError(path + ": must be an object");
  const std::string type = Reader::text(j, path, "type", "");
  PhaseObjectSpec spec;
  spec.center = parse_point(j, path, "center");
  if (const auto* m = Reader::child(j, "material")) spec.material = parse_material(*m, path + ".material", rd);
  try {
    spec.material.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ".material: " + e.what());
  }

  if (type == "spp") {
    rd.keys(j, path, {"type", "center", "material", "diameter", "step_height", "base_thickness", "turns", "rotation"});
    SpiralPlate s;
    s.diameter = Reader::number(j, path, "diameter", s.diameter);
    s.step_height = Reader::number(j, path, "step_height", lambda_thickness(spec.material, wavelength));
    s.base_thickness = Reader::number(j, path, "base_thickness", s.base_thickness);
    const long long turns = Reader::integer(j, path, "turns", s.turns);
    require(turns >= 0 && turns <= 1000, path + ".turns", "must lie in [0, 1000]");
    s.turns = static_cast<int>(turns);
    s.rotation = Reader::number(j, path, "rotation", s.rotation);
    spec.shape = s;
  } else if (type == "wedge") {
    rd.keys(j, path, {"type", "center", "material", "opening_angle", "fringe_period", "orientation", "extent"});
    Wedge w;
    const bool has_angle = j.contains("opening_angle");
    const bool has_period = j.contains("fringe_period");
    require(has_angle != has_period, path, "exactly one of opening_angle and fringe_period is required");
    if (has_angle) {
      w.opening_angle = Reader::number(j, path, "opening_angle", 0.0);
    } else {
      const double period = Reader::number(j, path, "fringe_period", 0.0);
      require(period > 0.0, path + ".fringe_period", "must be > 0");
      w.opening_angle = std::atan(lambda_thickness(spec.material, wavelength) / period);
    }
    const std::string orient = Reader::text(j, path, "orientation", "vertical");
    if (orient == "vertical")
      w.orientation = WedgeOrientation::Vertical;
    else if (orient == "horizontal")
      w.orientation = WedgeOrientation::Horizontal;
    else
      throw ConfigError(path + ".orientation: must be \"vertical\" or \"horizontal\"");
    w.extent = Reader::number(j, path, "extent", field_extent);
    spec.shape = w;
  } else if (type == "slab") {
    rd.keys(j, path, {"type", "center", "material", "thickness", "extent_u", "extent_v"});
    Slab s;
    s.thickness = Reader::number(j, path, "thickness", 0.0);
    s.extent_u = Reader::number(j, path, "extent_u", s.extent_u);
    s.extent_v = Reader::number(j, path, "extent_v", s.extent_v);
    spec.shape = s;
  } else {
    throw ConfigError(path + ".type: must be \"spp\", \"wedge\" or \"slab\"");
  }
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec;
}

json object_json(const PhaseObjectSpec& spec) {
  json j;
  j["center"] = json::array({spec.center.u, spec.center.v});
  j["material"] = material_json(spec.material);
  if (const auto* s = std::get_if<SpiralPlate>(&spec.shape)) {
    j["type"] = "spp";
    j["diameter"] = s->diameter;
    j["step_height"] = s->step_height;
    j["base_thickness"] = s->base_thickness;
    j["turns"] = s->turns;
    j["rotation"] = s->rotation;
  } else if (const auto* w = std::get_if<Wedge>(&spec.shape)) {
    j["type"] = "wedge";
    j["opening_angle"] = w->opening_angle;
    j["orientation"] = w->orientation == WedgeOrientation::Vertical ? "vertical" : "horizontal";
    j["extent"] = w->extent;
  } else {
    const auto& s = std::get<Slab>(spec.shape);
    j["type"] = "slab";
    j["thickness"] = s.thickness;
    if (std::isfinite(s.extent_u)) j["extent_u"] = s.extent_u;
    if (std::isfinite(s.extent_v)) j["extent_v"] = s.extent_v;
  }
  return j;
}

std::vector<PhaseObjectSpec> parse_path(const json& root, const char* key, Reader& rd, double wavelength,
                                        double field_extent) {
  std::vector<PhaseObjectSpec> out;
  const auto* arr = Reader::child(root, key);
  if (!arr) return out;
  if (!arr->is_array()) throw ConfigError(std::string(key) + ": must be a list of objects");
  for (std::size_t i = 0; i < arr->size(); ++i)
    out.push_back(parse_object((*arr)[i], std::string(key) + "[" + std::to_string(i) + "]", rd, wavelength,
                               field_extent));
  return out;
}

void check_footprints(const std::vector<PhaseObjectSpec>& objs, const char* key, const SamplingGrid& field) {
  const double tol = 1e-9 * std::max(field.width(), field.height());
  const double u0 = field.origin_u - tol, u1 = field.origin_u + field.width() + tol;
  const double v0 = field.origin_v - tol, v1 = field.origin_v + field.height() + tol;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const auto b = objs[i].bounds();
    const bool inside_u = !std::isfinite(b.u0) || (b.u0 >= u0 && b.u1 <= u1);
    const bool inside_v = !std::isfinite(b.v0) || (b.v0 >= v0 && b.v1 <= v1);
    if (!inside_u || !inside_v)
      throw ConfigError(std::string(key) + "[" + std::to_string(i) + "]: footprint must fit within the simulated field");
  }
}

std::vector<double> number_list(const json& obj, const std::string& path, const char* key, std::vector<double> def) {
  const auto* c = Reader::child(obj, key);
  if (!c) return def;
  const std::string field = Reader::join(path, key);
  if (!c->is_array()) throw ConfigError(field + ": must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : *c) {
    if (!x.is_number()) throw ConfigError(field + ": must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> int_list(const json& obj, const std::string& path, const char* key) {
  const auto* c = Reader::child(obj, key);
  const std::string field = Reader::join(path, key);
  if (!c) throw ConfigError(field + ": is required");
  if (!c->is_array() || c->empty()) throw ConfigError(field + ": must be a non-empty list of integers");
  std::vector<int> out;
  for (const auto& x : *c) {
    if (!x.is_number_integer()) throw ConfigError(field + ": must be a non-empty list of integers");
    const auto v = x.get<long long>();
    require(v >= -1000 && v <= 1000, field, "entries must lie in [-1000, 1000]");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

CoherenceArea parse_convention(const std::string& s, const std::string& path) {
  if (s == "rectangle") return CoherenceArea::Rectangle;
  if (s == "ellipse") return CoherenceArea::Ellipse;
  if (s == "disc") return CoherenceArea::Disc;
  throw ConfigError(path + ": must be \"rectangle\", \"ellipse\" or \"disc\"");
}

bool valid_name(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// Signed fringe wavenumber of the first wedge; a wedge in path II flips the sign.
std::optional<std::pair<double, FringeAxis>> wedge_fringe(const SceneConfig& c) {
  for (int pass = 0; pass < 2; ++pass) {
    const auto& objs = pass == 0 ? c.path_I : c.path_II;
    for (const auto& o : objs) {
      if (const auto* w = std::get_if<Wedge>(&o.shape)) {
        const double k = constants::two_pi * std::tan(w->opening_angle) / lambda_thickness(o.material, c.beam.wavelength);
        const FringeAxis axis = w->orientation == WedgeOrientation::Vertical ? FringeAxis::V : FringeAxis::U;
        return std::make_pair(pass == 0 ? k : -k, axis);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

const char* camera_name(Camera camera) {
  return camera == Camera::Detector ? "detector" : "integration_counter";
}

SamplingGrid SceneConfig::field() const {
  const auto s = detector.supersample;
  return SamplingGrid::centered(detector.width * s, detector.height * s,
                                detector.pixel_pitch / static_cast<double>(s));
}

bool operator==(const SceneConfig& a, const SceneConfig& b) { return serialize_config(a) == serialize_config(b); }

SceneConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  Reader rd;
  rd.keys(root, "", {"beam", "crystal", "path_I", "path_II", "detector", "phase_flag", "camera", "reconstruction",
                     "analysis", "sweep", "oam_model", "output"});
  SceneConfig c;
  const json empty = json::object();

  // beam
  {
    const json& b = root.contains("beam") ? root["beam"] : empty;
    rd.keys(b, "beam", {"wavelength", "flux", "sigma_x", "sigma_z", "coherence_aperture"});
    c.beam.wavelength = Reader::number(b, "beam", "wavelength", c.beam.wavelength);
    c.beam.flux = Reader::number(b, "beam", "flux", c.beam.flux);
    c.beam.sigma_x = Reader::number(b, "beam", "sigma_x", c.beam.sigma_x);
    c.beam.sigma_z = Reader::number(b, "beam", "sigma_z", c.beam.sigma_z);
    c.beam.coherence_aperture = Reader::number(b, "beam", "coherence_aperture", c.beam.coherence_aperture);
    require(c.beam.wavelength > 0.0, "beam.wavelength", "must be > 0");
    require(c.beam.flux >= 0.0, "beam.flux", "must be >= 0");
    require(c.beam.sigma_x > 0.0, "beam.sigma_x", "must be > 0");
    require(c.beam.sigma_z > 0.0, "beam.sigma_z", "must be > 0");
    require(c.beam.coherence_aperture > 0.0, "beam.coherence_aperture", "must be > 0");
  }

  // crystal
  {
    const json& j = root.contains("crystal") ? root["crystal"] : empty;
    rd.keys(j, "crystal", {"reflection", "plate_thickness", "lattice_spacing", "fourier_potential", "asymmetry_cos"});
    require(Reader::text(j, "crystal", "reflection", "Si220") == "Si220", "crystal.reflection",
            "only \"Si220\" is supported");
    const double plate = Reader::number(j, "crystal", "plate_thickness", 4.46e-3);
    require(plate > 0.0, "crystal.plate_thickness", "must be > 0");
    try {
      c.crystal = CrystalParams::silicon_220(c.beam.wavelength, plate);
    } catch (const Error& e) {
      throw ConfigError(std::string("crystal: ") + e.what());
    }
    c.crystal.lattice_spacing = Reader::number(j, "crystal", "lattice_spacing", c.crystal.lattice_spacing);
    c.crystal.fourier_potential = Reader::number(j, "crystal", "fourier_potential", c.crystal.fourier_potential);
    c.crystal.asymmetry_cos = Reader::number(j, "crystal", "asymmetry_cos", c.crystal.asymmetry_cos);
    require(c.crystal.lattice_spacing > 0.0, "crystal.lattice_spacing", "must be > 0");
    const double s = c.beam.wavelength / (2.0 * c.crystal.lattice_spacing);
    require(s < 1.0, "crystal.lattice_spacing", "must exceed wavelength / 2 for a Bragg reflection");
    c.crystal.bragg_angle = std::asin(s);
    try {
      c.crystal.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("crystal: ") + e.what());
    }
  }

  // detector
  {
    const json& d = root.contains("detector") ? root["detector"] : empty;
    rd.keys(d, "detector", {"pixel_pitch", "width", "height", "supersample", "ports"});
    c.detector.pixel_pitch = Reader::number(d, "detector", "pixel_pitch", c.detector.pixel_pitch);
    require(c.detector.pixel_pitch > 0.0, "detector.pixel_pitch", "must be > 0");
    c.detector.width = Reader::count(d, "detector", "width", c.detector.width);
    c.detector.height = Reader::count(d, "detector", "height", c.detector.height);
    c.detector.supersample = Reader::count(d, "detector", "supersample", c.detector.supersample);
    require(c.detector.width * c.detector.supersample <= 8192 && c.detector.height * c.detector.supersample <= 8192,
            "detector", "fine grid (size x supersample) must not exceed 8192 cells per axis");
    if (const auto* p = Reader::child(d, "ports")) {
      require(p->is_array() && !p->empty(), "detector.ports", "must be a non-empty list of \"O\"/\"G\"");
      c.detector.ports.clear();
      for (const auto& x : *p) {
        require(x.is_string(), "detector.ports", "must be a non-empty list of \"O\"/\"G\"");
        const Port port = parse_port(x.get<std::string>(), "detector.ports");
        require(std::find(c.detector.ports.begin(), c.detector.ports.end(), port) == c.detector.ports.end(),
                "detector.ports", "at most one detector per port");
        c.detector.ports.push_back(port);
      }
    }
  }

  const SamplingGrid field = c.field();
  const double field_extent = std::min(field.width(), field.height());
  c.path_I = parse_path(root, "path_I", rd, c.beam.wavelength, field_extent);
  c.path_II = parse_path(root, "path_II", rd, c.beam.wavelength, field_extent);

  c.phase_flag = Reader::number(root, "", "phase_flag", 0.0);
  {
    const std::string cam = Reader::text(root, "", "camera", "detector");
    if (cam == "detector")
      c.camera = Camera::Detector;
    else if (cam == "integration_counter")
      c.camera = Camera::IntegrationCounter;
    else
      throw ConfigError("camera: must be \"detector\" or \"integration_counter\"");
  }

  if (const auto* r = Reader::child(root, "reconstruction")) {
    rd.keys(*r, "reconstruction", {"lambda_d", "n", "delta_x", "delta_y", "window", "port", "input"});
    ReconstructionConfig rc;
    auto& p = rc.params;
    p.lambda_d = Reader::number(*r, "reconstruction", "lambda_d", p.lambda_d);
    p.n = Reader::count(*r, "reconstruction", "n", p.n);
    p.delta_x = Reader::number(*r, "reconstruction", "delta_x", p.delta_x);
    p.delta_y = Reader::number(*r, "reconstruction", "delta_y", p.delta_y);
    const std::string window = Reader::text(*r, "reconstruction", "window", "none");
    if (window == "none")
      p.window = Windowing::None;
    else if (window == "mean_subtract")
      p.window = Windowing::MeanSubtract;
    else
      throw ConfigError("reconstruction.window: must be \"none\" or \"mean_subtract\"");
    rc.port = parse_port(Reader::text(*r, "reconstruction", "port", "O"), "reconstruction.port");
    if (r->contains("input")) rc.input = Reader::text(*r, "reconstruction", "input", "");
    require(!rc.input || !rc.input->empty(), "reconstruction.input", "must be a non-empty path");
    require(p.lambda_d > 0.0, "reconstruction.lambda_d", "must be > 0");
    require(p.n >= 2 && p.n <= 4096, "reconstruction.n", "must lie in [2, 4096]");
    require(p.delta_x > 0.0, "reconstruction.delta_x", "must be > 0");
    require(p.delta_y > 0.0, "reconstruction.delta_y", "must be > 0");
    c.reconstruction = rc;
  }

  {
    const json& a = root.contains("analysis") ? root["analysis"] : empty;
    rd.keys(a, "analysis", {"fresnel_distances", "fresnel_references", "flight_path", "wedge_tan_alpha", "isotropic_sigma",
                            "moire_mismatch", "capture"});
    auto& an = c.analysis;
    an.fresnel_distances = number_list(a, "analysis", "fresnel_distances", an.fresnel_distances);
    for (double d : an.fresnel_distances) require(d > 0.0, "analysis.fresnel_distances", "entries must be > 0");
    an.fresnel_references = number_list(a, "analysis", "fresnel_references", an.fresnel_references);
    require(an.fresnel_references.empty() || an.fresnel_references.size() == an.fresnel_distances.size(),
            "analysis.fresnel_references", "must be empty or match fresnel_distances in length");
    for (double f : an.fresnel_references) require(f > 0.0, "analysis.fresnel_references", "entries must be > 0");
    an.flight_path = Reader::number(a, "analysis", "flight_path", an.flight_path);
    an.wedge_tan_alpha = Reader::number(a, "analysis", "wedge_tan_alpha", an.wedge_tan_alpha);
    an.isotropic_sigma = Reader::number(a, "analysis", "isotropic_sigma", an.isotropic_sigma);
    an.moire_mismatch = Reader::number(a, "analysis", "moire_mismatch", an.moire_mismatch);
    require(an.flight_path >= 0.0, "analysis.flight_path", "must be >= 0");
    require(an.wedge_tan_alpha > 0.0, "analysis.wedge_tan_alpha", "must be > 0");
    require(an.isotropic_sigma > 0.0, "analysis.isotropic_sigma", "must be > 0");
    require(an.moire_mismatch > 0.0 && an.moire_mismatch < 1.0, "analysis.moire_mismatch", "must lie in (0, 1)");
    const json& cap = a.contains("capture") ? a["capture"] : empty;
    rd.keys(cap, "analysis.capture", {"flux", "sigma_x", "sigma_z", "duration", "convention"});
    auto& cp = an.capture;
    cp.flux = Reader::number(cap, "analysis.capture", "flux", cp.flux);
    cp.sigma_x = Reader::number(cap, "analysis.capture", "sigma_x", cp.sigma_x);
    cp.sigma_z = Reader::number(cap, "analysis.capture", "sigma_z", cp.sigma_z);
    cp.duration = Reader::number(cap, "analysis.capture", "duration", cp.duration);
    cp.convention = parse_convention(Reader::text(cap, "analysis.capture", "convention", "rectangle"),
                                     "analysis.capture.convention");
    require(cp.flux >= 0.0, "analysis.capture.flux", "must be >= 0");
    require(cp.sigma_x > 0.0, "analysis.capture.sigma_x", "must be > 0");
    require(cp.sigma_z > 0.0, "analysis.capture.sigma_z", "must be > 0");
    require(cp.duration >= 0.0, "analysis.capture.duration", "must be >= 0");
  }

  if (const auto* s = Reader::child(root, "sweep")) {
    rd.keys(*s, "sweep", {"turns", "variants"});
    SweepConfig sw;
    sw.turns = int_list(*s, "sweep", "turns");
    for (int t : sw.turns) require(t >= 0, "sweep.turns", "entries must be >= 0");
    if (const auto* vs = Reader::child(*s, "variants")) {
      require(vs->is_array(), "sweep.variants", "must be a list");
      for (std::size_t i = 0; i < vs->size(); ++i) {
        const std::string path = "sweep.variants[" + std::to_string(i) + "]";
        const json& v = (*vs)[i];
        rd.keys(v, path, {"name", "patch"});
        SweepVariant var;
        var.name = Reader::text(v, path, "name", "");
        require(valid_name(var.name), path + ".name", "must be a non-empty [A-Za-z0-9_-] string");
        for (const auto& prev : sw.variants) require(prev.name != var.name, path + ".name", "must be unique");
        const json patch = v.contains("patch") ? v["patch"] : json::object();
        require(patch.is_object(), path + ".patch", "must be an object");
        var.patch = patch.dump();
        sw.variants.push_back(std::move(var));
      }
    }
    c.sweep = sw;
  }

  if (const auto* o = Reader::child(root, "oam_model")) {
    rd.keys(*o, "oam_model", {"charges", "k_fringe", "theta", "a", "b", "axis"});
    OamModelConfig m;
    m.charges = int_list(*o, "oam_model", "charges");
    m.theta = Reader::number(*o, "oam_model", "theta", m.theta);
    m.a = Reader::number(*o, "oam_model", "a", m.a);
    m.b = Reader::number(*o, "oam_model", "b", m.b);
    require(m.b >= 0.0 && m.b <= m.a, "oam_model", "need 0 <= b <= a");
    const auto derived = wedge_fringe(c);
    if (o->contains("k_fringe")) {
      m.k_fringe = Reader::number(*o, "oam_model", "k_fringe", 0.0);
    } else {
      require(derived.has_value(), "oam_model.k_fringe", "is required when no wedge is present");
      m.k_fringe = derived->first;
    }
    const std::string default_axis = derived && derived->second == FringeAxis::U ? "u" : "v";
    const std::string axis = Reader::text(*o, "oam_model", "axis", default_axis);
    require(axis == "u" || axis == "v", "oam_model.axis", "must be \"u\" or \"v\"");
    m.axis = axis == "u" ? FringeAxis::U : FringeAxis::V;
    c.oam_model = m;
  }

  {
    const json& out = root.contains("output") ? root["output"] : empty;
    rd.keys(out, "output", {"format", "prefix", "thickness_maps"});
    c.output.format = parse_format(Reader::text(out, "output", "format", "png"));
    c.output.prefix = Reader::text(out, "output", "prefix", "");
    if (const auto* t = Reader::child(out, "thickness_maps")) {
      require(t->is_boolean(), "output.thickness_maps", "must be true or false");
      c.output.thickness_maps = t->get<bool>();
    }
    require(c.output.prefix.empty() || valid_name(c.output.prefix), "output.prefix",
            "must contain only [A-Za-z0-9_-]");
  }

  rd.finish();
  check_footprints(c.path_I, "path_I", field);
  check_footprints(c.path_II, "path_II", field);
  return c;
}

std::string serialize_config(const SceneConfig& c) {
  json root;
  root["beam"] = {{"wavelength", c.beam.wavelength},
                  {"flux", c.beam.flux},
                  {"sigma_x", c.beam.sigma_x},
                  {"sigma_z", c.beam.sigma_z},
                  {"coherence_aperture", c.beam.coherence_aperture}};
  root["crystal"] = {{"reflection", "Si220"},
                     {"plate_thickness", c.crystal.plate_thickness},
                     {"lattice_spacing", c.crystal.lattice_spacing},
                     {"fourier_potential", c.crystal.fourier_potential},
                     {"asymmetry_cos", c.crystal.asymmetry_cos}};
  for (const char* key : {"path_I", "path_II"}) {
    const auto& objs = std::string(key) == "path_I" ? c.path_I : c.path_II;
    json arr = json::array();
    for (const auto& o : objs) arr.push_back(object_json(o));
    root[key] = arr;
  }
  json ports = json::array();
  for (Port p : c.detector.ports) ports.push_back(port_key(p));
  root["detector"] = {{"pixel_pitch", c.detector.pixel_pitch},
                      {"width", c.detector.width},
                      {"height", c.detector.height},
                      {"supersample", c.detector.supersample},
                      {"ports", ports}};
  root["phase_flag"] = c.phase_flag;
  root["camera"] = camera_name(c.camera);
  if (c.reconstruction) {
    const auto& r = *c.reconstruction;
    json j = {{"lambda_d", r.params.lambda_d},
              {"n", r.params.n},
              {"delta_x", r.params.delta_x},
              {"delta_y", r.params.delta_y},
              {"window", r.params.window == Windowing::None ? "none" : "mean_subtract"},
              {"port", port_key(r.port)}};
    if (r.input) j["input"] = *r.input;
    root["reconstruction"] = j;
  }
  const auto& a = c.analysis;
  root["analysis"] = {{"fresnel_distances", a.fresnel_distances},
                      {"fresnel_references", a.fresnel_references},
                      {"flight_path", a.flight_path},
                      {"wedge_tan_alpha", a.wedge_tan_alpha},
                      {"isotropic_sigma", a.isotropic_sigma},
                      {"moire_mismatch", a.moire_mismatch},
                      {"capture",
                       {{"flux", a.capture.flux},
                        {"sigma_x", a.capture.sigma_x},
                        {"sigma_z", a.capture.sigma_z},
                        {"duration", a.capture.duration},
                        {"convention", coherence_area_name(a.capture.convention)}}}};
  if (c.sweep) {
    json vars = json::array();
    for (const auto& v : c.sweep->variants) vars.push_back({{"name", v.name}, {"patch", json::parse(v.patch)}});
    root["sweep"] = {{"turns", c.sweep->turns}, {"variants", vars}};
  }
  if (c.oam_model) {
    const auto& m = *c.oam_model;
    root["oam_model"] = {{"charges", m.charges}, {"k_fringe", m.k_fringe}, {"theta", m.theta},
                         {"a", m.a},             {"b", m.b},               {"axis", m.axis == FringeAxis::U ? "u" : "v"}};
  }
  root["output"] = {{"format", format_name(c.output.format)},
                    {"prefix", c.output.prefix},
                    {"thickness_maps", c.output.thickness_maps}};
  return root.dump(2) + "\n";
}

SceneConfig apply_patch(const SceneConfig& config, std::string_view patch) {
  json doc = json::parse(serialize_config(config));
  json p;
  try {
    p = json::parse(patch);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed patch: ") + e.what());
  }
  doc.merge_patch(p);
  return parse_config(doc.dump());
}

SceneConfig preset_config(int figure) {
  const json spp = {{"type", "spp"}, {"center", json::array({0.0, 0.0})}, {"material", "Al"}, {"turns", 1}};
  const auto wedge = [](const char* orientation) {
    return json{{"type", "wedge"}, {"material", "Al"}, {"fringe_period", 1e-3}, {"orientation", orientation}};
  };
  json doc = {{"beam", {{"wavelength", 2.71e-10}}},
              {"detector", {{"pixel_pitch", 100e-6}, {"width", 200}, {"height", 200}, {"supersample", 4}}},
              {"path_II", json::array({spp})},
              {"output", {{"prefix", "fig" + std::to_string(figure)}}}};
  switch (figure) {
    case 7:
      doc["path_I"] = json::array({wedge("horizontal")});
      doc["detector"]["ports"] = json::array({"O", "G"});
      break;
    case 8:
      doc["path_I"] = json::array({wedge("vertical")});
      doc["detector"]["ports"] = json::array({"O", "G"});
      break;
    case 10:
      doc["path_I"] = json::array({wedge("vertical")});
      doc["sweep"] = {{"turns", json::array({0, 1, 2, 3})},
                      {"variants", json::array({json{{"name", "spp_only"}, {"patch", {{"path_I", json::array()}}}},
                                                json{{"name", "spp_wedge"}, {"patch", json::object()}}})}};
      break;
    case 11:
      doc["path_I"] = json::array({wedge("vertical")});
      doc["oam_model"] = {{"charges", json::array({0, 1, 2, 3})}};
      doc["sweep"] = {{"turns", json::array({0, 1, 2, 3})}};
      break;
    case 12:
      doc["path_I"] = json::array({wedge("vertical")});
      doc["sweep"] = {{"turns", json::array({0, 2})}};
      doc["reconstruction"] = json::object();
      break;
    default:
      throw ConfigError("figure: must be one of 7, 8, 10, 11, 12");
  }
  return parse_config(doc.dump());
}

}  // namespace nifsim
