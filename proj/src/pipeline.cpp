#include "nifsim/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string_view>

#include <json.hpp>

#include "nifsim/analysis.hpp"
#include "nifsim/constants.hpp"
#include "nifsim/dyndiff.hpp"
#include "nifsim/error.hpp"
#include "nifsim/holography.hpp"
#include "nifsim/image_io.hpp"

namespace nifsim {

namespace {

namespace fs = std::filesystem;

std::string tagged(const char* module, const std::exception& e) {
  const std::string_view msg = e.what();
  if (!msg.empty() && msg.front() == '[') return std::string(msg);
  return "[" + std::string(module) + "] " + std::string(msg);
}

// Runs f and prefixes any library error with the module name, keeping its type.
template <class F>
decltype(auto) attributed(const char* module, F&& f) {
  try {
    return std::invoke(std::forward<F>(f));
  } catch (const DomainError& e) {
    throw DomainError(tagged(module, e));
  } catch (const ShapeError& e) {
    throw ShapeError(tagged(module, e));
  } catch (const ResamplingError& e) {
    throw ResamplingError(tagged(module, e));
  } catch (const NumericalError& e) {
    throw NumericalError(tagged(module, e));
  } catch (const AnalysisError& e) {
    throw AnalysisError(tagged(module, e));
  } catch (const ConfigError& e) {
    throw ConfigError(tagged(module, e));
  } catch (const IoError& e) {
    throw IoError(tagged(module, e));
  }
}

// Collects emitted files and finalizes the manifest.
class Emitter {
 public:
  Emitter(const SceneConfig& config, fs::path out_dir, std::string verb)
      : config_(config), dir_(std::move(out_dir)), verb_(std::move(verb)) {
    attributed("cli_io", [&] {
      std::error_code ec;
      fs::create_directories(dir_, ec);
      if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());
    });
  }

  std::string stem(const std::string& name) const {
    return config_.output.prefix.empty() ? name : config_.output.prefix + "_" + name;
  }

  void image(const std::string& name, const Grid2D<double>& values, const ImageMeta& meta) {
    attributed("cli_io", [&] {
      for (const auto& p : write_image(dir_ / stem(name), values, meta, config_.output.format)) add(p);
    });
  }

  void text(const std::string& file, std::string_view content) {
    attributed("cli_io", [&] {
      const fs::path p = dir_ / stem(file);
      write_text(p, content);
      add(p);
    });
  }

  void series(const std::string& file, const char* x, const char* y, const std::vector<std::pair<double, double>>& rows) {
    attributed("cli_io", [&] {
      const fs::path p = dir_ / stem(file);
      write_series_csv(p, x, y, rows);
      add(p);
    });
  }

  RunManifest finish() {
    return attributed("cli_io", [&] {
      const std::string canonical = serialize_config(config_);
      write_text(dir_ / "config.json", canonical);
      add(dir_ / "config.json");
      RunManifest m;
      m.verb = verb_;
      m.config_hash = sha256_hex(canonical);
      m.files = files_;
      std::sort(m.files.begin(), m.files.end(),
                [](const ManifestEntry& a, const ManifestEntry& b) { return a.path < b.path; });
      write_text(dir_ / "manifest.json", m.to_json());
      return m;
    });
  }

 private:
  void add(const fs::path& p) {
    files_.push_back({p.filename().string(), sha256_file(p), fs::file_size(p)});
  }

  const SceneConfig& config_;
  fs::path dir_;
  std::string verb_;
  std::vector<ManifestEntry> files_;
};

std::string num(double x) { return format_double(x); }

std::map<std::string, std::string> scene_provenance(const SceneConfig& c, Port port) {
  return {{"port", port_name(port)},
          {"phase_flag", num(c.phase_flag)},
          {"camera", camera_name(c.camera)},
          {"wavelength", num(c.beam.wavelength)},
          {"supersample", std::to_string(c.detector.supersample)}};
}

void mirror_u(InterferogramGrid& g) {
  for (std::size_t r = 0; r < g.intensity.rows(); ++r) {
    auto row = g.intensity.row(r);
    std::reverse(row.begin(), row.end());
  }
  g.provenance["mirrored"] = "u";
}

DetectorSpec detector_for(const SceneConfig& c, Port port) {
  return {c.detector.pixel_pitch, c.detector.width, c.detector.height, port};
}

// Fringe axis of the first wedge in either path.
std::optional<FringeAxis> wedge_axis(const SceneConfig& c) {
  for (const auto* objs : {&c.path_I, &c.path_II})
    for (const auto& o : *objs)
      if (const auto* w = std::get_if<Wedge>(&o.shape); w && o.present())
        return w->orientation == WedgeOrientation::Vertical ? FringeAxis::V : FringeAxis::U;
  return std::nullopt;
}

std::optional<double> spp_radius(const SceneConfig& c) {
  for (const auto* objs : {&c.path_II, &c.path_I})
    for (const auto& o : *objs)
      if (const auto* s = std::get_if<SpiralPlate>(&o.shape)) return 0.5 * s->diameter;
  return std::nullopt;
}

// First object's material, else aluminium.
Material reference_material(const SceneConfig& c) {
  if (!c.path_II.empty()) return c.path_II.front().material;
  if (!c.path_I.empty()) return c.path_I.front().material;
  return Material::aluminium();
}

ImageMeta meta_of(const InterferogramGrid& g) { return {g.geometry, g.provenance, std::nullopt}; }

std::string panel_label(const std::string& variant, int turns) {
  return (variant.empty() ? "" : variant + "_") + "L" + std::to_string(turns);
}

InterferogramGrid oam_panel(const SceneConfig& c, const OamModelConfig& m, int q) {
  OamModelParams p;
  p.k_fringe = m.k_fringe;
  p.q = q;
  p.theta = m.theta;
  p.a = m.a;
  p.b = m.b;
  p.axis = m.axis;
  return attributed("interferogram", [&] {
    InterferogramGrid fine = synthesize_oam_model(p, c.field(), vortex_center(c));
    InterferogramGrid out = bin_to_detector(fine, detector_for(c, Port::O));
    out.provenance["k_fringe"] = num(m.k_fringe);
    out.provenance["theta"] = num(m.theta);
    return out;
  });
}

}  // namespace

std::string RunManifest::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) files_json.push_back({{"path", f.path}, {"sha256", f.sha256}, {"bytes", f.bytes}});
  const nlohmann::json j = {
      {"tool", tool}, {"version", version}, {"verb", verb}, {"config_hash", config_hash}, {"files", files_json}};
  return j.dump(2) + "\n";
}

SceneThickness scene_thickness(const SceneConfig& c) {
  const SamplingGrid field = c.field();
  // Other materials enter as equivalent thickness of the reference material.
  const Material ref = reference_material(c);
  const double d_lambda =
      attributed("phase_objects", [&] { return std::abs(lambda_thickness(ref, c.beam.wavelength)); });
  const auto equivalent = [&](const std::vector<PhaseObjectSpec>& objs) {
    return attributed("phase_objects", [&] {
      ThicknessMap acc = project_objects({}, field);
      for (const auto& o : objs) {
        if (!o.present()) continue;
        const ThicknessMap t = project_objects(std::span(&o, 1), field);
        const double scale = d_lambda / lambda_thickness(o.material, c.beam.wavelength);
        auto dst = acc.values.values();
        const auto src = t.values.values();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
      }
      return acc;
    });
  };
  return {equivalent(c.path_I), equivalent(c.path_II), d_lambda};
}

std::vector<InterferogramGrid> simulate_scene(const SceneConfig& c) {
  const auto [path_I, path_II, d_lambda] = scene_thickness(c);

  std::vector<InterferogramGrid> out;
  for (Port port : c.detector.ports) {
    InterferogramGrid img = attributed("interferogram", [&] {
      const InterferogramGrid fine = synthesize_interferogram(path_I, path_II, d_lambda, c.phase_flag, port);
      return bin_to_detector(fine, detector_for(c, port));
    });
    if (c.camera == Camera::IntegrationCounter) mirror_u(img);
    for (auto& [k, v] : scene_provenance(c, port)) img.provenance[k] = v;
    img.provenance["d_lambda"] = num(d_lambda);
    out.push_back(std::move(img));
  }
  return out;
}

std::vector<SweepPanel> expand_sweep(const SceneConfig& c) {
  std::vector<SweepPanel> panels;
  if (!c.sweep) return panels;
  std::vector<std::pair<std::string, SceneConfig>> variants;
  if (c.sweep->variants.empty()) {
    variants.emplace_back("", c);
  } else {
    for (const auto& v : c.sweep->variants)
      variants.emplace_back(v.name, attributed("cli_io", [&] { return apply_patch(c, v.patch); }));
  }
  for (auto& [name, base] : variants) {
    for (int t : c.sweep->turns) {
      SweepPanel p{panel_label(name, t), t, base};
      for (auto* objs : {&p.config.path_I, &p.config.path_II})
        for (auto& o : *objs)
          if (auto* s = std::get_if<SpiralPlate>(&o.shape)) s->turns = t;
      panels.push_back(std::move(p));
    }
  }
  return panels;
}

Point2 vortex_center(const SceneConfig& c) {
  for (const auto* objs : {&c.path_II, &c.path_I})
    for (const auto& o : *objs)
      if (std::holds_alternative<SpiralPlate>(o.shape)) return o.center;
  return {};
}

ForkCount count_fork(const SceneConfig& c, const InterferogramGrid& image) {
  const auto axis = wedge_axis(c);
  if (!axis) throw AnalysisError("[interferogram] fork count needs a wedge to define the fringe axis");
  ForkCountOptions opt;
  opt.axis = *axis;
  if (const auto r = spp_radius(c)) {
    const double pitch = image.geometry.pitch_u;
    opt.half_length = static_cast<std::size_t>(std::floor(0.8 * *r / pitch));
  }
  return attributed("interferogram", [&] { return analyze_fork(image, vortex_center(c), opt); });
}

RunManifest run_simulate(const SceneConfig& c, const fs::path& out_dir) {
  Emitter em(c, out_dir, "simulate");
  for (const auto& img : simulate_scene(c)) em.image(port_name(img.port), img.intensity, meta_of(img));
  if (c.output.thickness_maps) {
    const SceneThickness t = scene_thickness(c);
    for (const auto& [name, map] : {std::pair{"thickness_I", &t.path_I}, std::pair{"thickness_II", &t.path_II}}) {
      InterferogramGrid fine;
      fine.geometry = map->geometry;
      fine.intensity = map->values;
      InterferogramGrid binned =
          attributed("interferogram", [&] { return bin_to_detector(fine, detector_for(c, Port::O)); });
      if (c.camera == Camera::IntegrationCounter) mirror_u(binned);
      binned.provenance["quantity"] = "path length through matter (m)";
      binned.provenance["reference_material"] = reference_material(c).name;
      binned.provenance["d_lambda"] = num(t.d_lambda);
      em.image(name, binned.intensity, meta_of(binned));
    }
  }
  return em.finish();
}

RunManifest run_sweep(const SceneConfig& c, const fs::path& out_dir) {
  if (!c.sweep && !c.oam_model) throw ConfigError("[cli_io] sweep: config needs a sweep or oam_model block");
  Emitter em(c, out_dir, "sweep");
  std::string counts = "panel,expected,measured\n";
  for (const auto& panel : expand_sweep(c)) {
    const auto images = simulate_scene(panel.config);
    for (const auto& img : images) {
      em.image(panel.name + "_" + port_name(img.port), img.intensity, meta_of(img));
    }
    if (wedge_axis(panel.config) && !images.empty()) {
      std::string measured = "n/a";
      try {
        measured = std::to_string(count_fork(panel.config, images.front()).charge);
      } catch (const AnalysisError&) {
      }
      counts += panel.name + "_" + port_name(images.front().port) + "," + std::to_string(panel.turns) + "," +
                measured + "\n";
    }
  }
  if (c.oam_model) {
    for (int q : c.oam_model->charges) {
      const InterferogramGrid img = oam_panel(c, *c.oam_model, q);
      const std::string name = "oam_q" + std::to_string(q);
      em.image(name, img.intensity, meta_of(img));
      std::string measured = "n/a";
      try {
        ForkCountOptions opt;
        opt.axis = c.oam_model->axis;
        if (const auto r = spp_radius(c))
          opt.half_length = static_cast<std::size_t>(std::floor(0.8 * *r / img.geometry.pitch_u));
        measured = std::to_string(analyze_fork(img, vortex_center(c), opt).charge);
      } catch (const AnalysisError&) {
      }
      counts += name + "," + std::to_string(q) + "," + measured + "\n";
    }
  }
  em.text("fork_counts.csv", counts);
  return em.finish();
}

RunManifest run_reconstruct(const SceneConfig& c, const fs::path& out_dir) {
  if (!c.reconstruction) throw ConfigError("[cli_io] reconstruct: config has no reconstruction block");
  const auto& rc = *c.reconstruction;
  Emitter em(c, out_dir, "reconstruct");

  const auto emit = [&](const std::string& label, const Grid2D<double>& pattern) {
    const Reconstruction r = attributed("holography", [&] { return reconstruct(pattern, rc.params); });
    const KernelScale ks = attributed("holography", [&] { return fresnel_kernel_scale(rc.params); });
    const SamplingGrid g{0.0, 0.0, ks.xi_pitch, ks.eta_pitch, rc.params.n, rc.params.n};
    const std::map<std::string, std::string> prov = {
        {"lambda_d", num(rc.params.lambda_d)},
        {"n", std::to_string(rc.params.n)},
        {"delta_x", num(rc.params.delta_x)},
        {"delta_y", num(rc.params.delta_y)},
        {"window", rc.params.window == Windowing::None ? "none" : "mean_subtract"},
        {"units", "output plane in the length unit of lambda_d / delta_x"}};
    const std::string base = label.empty() ? "recon" : label + "_recon";
    std::size_t invalid = 0;
    for (const auto v : r.valid.values()) invalid += v == 0;
    auto phase_prov = prov;
    phase_prov["invalid_pixels"] = std::to_string(invalid);
    em.image(base + "_intensity", r.intensity, {g, prov, std::nullopt});
    em.image(base + "_phase", r.phase, {g, phase_prov, std::pair{-constants::pi, constants::pi}});
    if (invalid > 0) {
      Grid2D<double> mask(r.valid.rows(), r.valid.cols());
      std::transform(r.valid.values().begin(), r.valid.values().end(), mask.values().begin(),
                     [](std::uint8_t v) { return static_cast<double>(v); });
      em.image(base + "_valid", mask, {g, prov, std::pair{0.0, 1.0}});
    }
  };

  if (rc.input) {
    const Grid2D<double> pattern = attributed("cli_io", [&] {
      const fs::path in = *rc.input;
      if (!fs::exists(in)) throw IoError("reconstruction input not found: " + in.string());
      return read_csv(in);
    });
    emit("", pattern);
    return em.finish();
  }

  std::vector<SweepPanel> panels = expand_sweep(c);
  if (panels.empty()) panels.push_back({"", 0, c});
  for (auto& panel : panels) {
    panel.config.detector.ports = {rc.port};
    const auto images = simulate_scene(panel.config);
    emit(panel.name, images.front().intensity);
  }
  return em.finish();
}

std::vector<AnalysisMetric> analyze_scene(const SceneConfig& c) {
  return attributed("analysis", [&] {
    std::vector<AnalysisMetric> m;
    const auto add = [&](std::string name, std::string value, std::string unit) {
      m.push_back({std::move(name), std::move(value), std::move(unit)});
    };
    const auto& an = c.analysis;
    const double lambda = c.beam.wavelength;
    const double a = c.beam.coherence_aperture;
    add("wavelength", num(lambda), "m");
    add("coherence_aperture", num(a), "m");

    for (std::size_t i = 0; i < an.fresnel_distances.size(); ++i) {
      const double y = an.fresnel_distances[i];
      char tag[64];
      std::snprintf(tag, sizeof tag, "y%gmm", y * 1e3);
      const FresnelNumber f = fresnel_number(a, lambda, y);
      add(std::string("fresnel_number_") + tag, num(f.value), "1");
      add(std::string("fresnel_regime_") + tag, regime_name(f.regime), "");
      if (!an.fresnel_references.empty()) {
        const double ref = an.fresnel_references[i];
        add(std::string("fresnel_reference_") + tag, num(ref), "1");
        add(std::string("fresnel_relative_deviation_") + tag, num((f.value - ref) / ref), "1");
      }
    }

    const auto& cap = an.capture;
    add("capture_flux", num(cap.flux), "m^-2 s^-1");
    add("capture_sigma_x", num(cap.sigma_x), "m");
    add("capture_sigma_z", num(cap.sigma_z), "m");
    add("capture_duration", num(cap.duration), "s");
    add("capture_convention", coherence_area_name(cap.convention), "");
    add("capture_estimate", num(oam_capture_estimate(cap.flux, cap.sigma_x, cap.sigma_z, cap.duration, cap.convention)),
        "packets");
    for (CoherenceArea conv : {CoherenceArea::Rectangle, CoherenceArea::Ellipse, CoherenceArea::Disc})
      add(std::string("capture_estimate_") + coherence_area_name(conv),
          num(oam_capture_estimate(cap.flux, cap.sigma_x, cap.sigma_z, cap.duration, conv)), "packets");

    Material wedge_material = Material::aluminium();
    for (const auto* objs : {&c.path_I, &c.path_II})
      for (const auto& o : *objs)
        if (std::holds_alternative<Wedge>(o.shape)) wedge_material = o.material;
    const double alpha = std::atan(an.wedge_tan_alpha);
    const WedgeDeflection d = wedge_deflection(wedge_material, lambda, alpha, an.flight_path, c.detector.pixel_pitch);
    add("wedge_material", wedge_material.name, "");
    add("lambda_thickness", num(lambda_thickness(wedge_material, lambda)), "m");
    add("refractive_decrement", num(d.refractive_decrement), "1");
    add("wedge_tan_alpha", num(an.wedge_tan_alpha), "1");
    add("wedge_deflection", num(d.deflection), "rad");
    add("wedge_flight_path", num(d.flight_path), "m");
    add("wedge_displacement", num(d.displacement), "m");
    add("detector_pixel_pitch", num(d.pixel_pitch), "m");
    add("wedge_same_pixel", d.same_pixel ? "true" : "false", "");

    CoherenceParams cp{c.beam.sigma_x, c.beam.sigma_z, a, lambda};
    const ProfileComparison pc = transverse_profile_compare({{}, an.isotropic_sigma}, cp);
    add("sigma_isotropic", num(pc.sigma_isotropic), "m");
    add("sigma_x", num(pc.sigma_x), "m");
    add("sigma_z", num(pc.sigma_z), "m");
    add("anisotropy_ratio", num(pc.anisotropy_ratio), "1");
    add("anisotropic", pc.anisotropic ? "true" : "false", "");
    add("isotropic_overlap", num(pc.overlap), "1");

    const CrystalParams& cr = c.crystal;
    add("bragg_angle", num(cr.bragg_angle * 180.0 / constants::pi), "deg");
    add("lattice_spacing", num(cr.lattice_spacing), "m");
    add("plate_thickness", num(cr.plate_thickness), "m");
    add("a1_parameter", num(a1_parameter(cr)), "1");
    add("pendellosung_thickness", num(pendellosung_thickness(cr, 1)), "m");
    add("borrmann_fan_width", num(borrmann_fan_width(cr)), "m");
    add("moire_magnification",
        num(moire_magnification(cr.lattice_spacing, cr.lattice_spacing * (1.0 + an.moire_mismatch))), "1");
    return m;
  });
}

RunManifest run_analyze(const SceneConfig& c, const fs::path& out_dir) {
  const auto metrics = analyze_scene(c);
  Emitter em(c, out_dir, "analyze");
  std::string report = "nifsim analysis report\n\n";
  std::string csv = "metric,value,unit\n";
  for (const auto& m : metrics) {
    report += m.name + " = " + m.value + (m.unit.empty() || m.unit == "1" ? "" : " " + m.unit) + "\n";
    csv += m.name + "," + m.value + "," + m.unit + "\n";
  }
  em.text("analysis_report.txt", report);
  em.text("analysis.csv", csv);
  const double a1 = attributed("dyndiff", [&] { return a1_parameter(c.crystal); });
  em.series("rocking_curve.csv", "y", "I_G",
            attributed("dyndiff", [&] { return rocking_curve(a1, -10.0, 10.0, 401); }));
  em.series("pendellosung.csv", "A1", "I_G",
            attributed("dyndiff", [&] { return pendellosung_sweep(0.0, 0.0, 20.0, 401); }));
  return em.finish();
}

}  // namespace nifsim
