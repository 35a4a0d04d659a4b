#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wirewall/demag_matrix.hpp"
#include "wirewall/geometry.hpp"
#include "wirewall/io.hpp"
#include "wirewall/lemma_suite.hpp"
#include "wirewall/minimize3d.hpp"
#include "wirewall/vortex.hpp"
#include "wirewall/wall_profiles.hpp"

namespace fs = std::filesystem;
using namespace wirewall;

namespace {

// Config files hold plain key=value lines; keys without a section belong to
// the subcommand being run.
class SubcommandConfig : public CLI::ConfigBase {
 public:
  explicit SubcommandConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    auto items = CLI::ConfigBase::from_config(in);
    const auto subs = app_->get_subcommands();
    if (subs.empty()) return items;
    for (auto& it : items)
      if (it.parents.empty() && it.name != "--") it.parents = {subs.front()->get_name()};
    return items;
  }

 private:
  const CLI::App* app_;
};

// Defaults echoed with the shortest text that reads back to the same value.
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CLI::Option* with_default(CLI::Option* o, double v) { return o->default_str(shortest(v)); }

CLI::Option* with_default(CLI::Option* o, const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + shortest(v[i]);
  return o->default_str(s);
}

template <class T>
CLI::Option* with_default(CLI::Option* o, const T&) {
  return o->capture_default_str();
}

template <class T>
CLI::Option* option(CLI::App* sub, const std::string& name, T& value, const std::string& help) {
  return with_default(sub->add_option(name, value, help), value);
}

struct Common {
  std::string out;
  int threads{1};
};

struct Geometry {
  std::string shape{"ellipse"};
  double a{2.0};
  double b{1.0};
  double r{1.0};
  std::vector<double> vertices;
  int resolution{1024};

  CrossSection build() const {
    const auto kind = family_from_string(shape);
    if (!kind) throw InvalidGeometry("shape", "unknown shape '" + shape + "' (disc | ellipse | rectangle | polygon)");
    switch (*kind) {
      case Family::disc: return CrossSection::disc(r, resolution);
      case Family::ellipse: return CrossSection::ellipse(a, b, resolution);
      case Family::rectangle: return CrossSection::rectangle(a, b, resolution);
      case Family::polygon: return make_cross_section(Family::polygon, vertices, resolution);
    }
    throw InvalidGeometry("shape", "unknown shape");
  }
};

void add_common(CLI::App* sub, Common& c) {
  const char* env = std::getenv("WIREWALL_OUT");
  c.out = (env && *env) ? env : ".";
  option(sub, "--out", c.out, "Output directory (default: $WIREWALL_OUT or .)");
  option(sub, "--threads", c.threads, "Worker threads for stray-field sums")
      ->check(CLI::Range(1, 256));
}

void add_geometry(CLI::App* sub, Geometry& g) {
  option(sub, "--shape", g.shape, "disc | ellipse | rectangle | polygon");
  option(sub, "--a", g.a, "Ellipse semi-axis or rectangle half-width along y");
  option(sub, "--b", g.b, "Ellipse semi-axis or rectangle half-width along z");
  option(sub, "--r", g.r, "Disc radius");
  sub->add_option("--vertices", g.vertices, "Polygon vertices y0,z0,y1,z1,... (counterclockwise)")->delimiter(',');
  option(sub, "--resolution", g.resolution, "Boundary samples of the cross section");
}

void require_ladder(const std::vector<double>& ladder) {
  if (ladder.empty()) throw Error(ErrorKind::config, "--d-ladder is empty");
}

// Files are collected first and written only after every computation succeeded.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void add(std::string name, const io::CsvTable& t) {
    if (t.empty()) throw Error(ErrorKind::domain, "no rows for " + name);
    add(std::move(name), t.str());
  }
  void write(const fs::path& dir, const CLI::App* sub) const {
    io::write_file(dir / (sub->get_name() + ".cfg"), sub->config_to_str(true, false));
    for (const auto& [name, content] : files) io::write_file(dir / name, content);
  }
};

// ---------------------------------------------------------------------------

struct ComputeMatrix {
  Common common;
  Geometry geometry;
  int n{512};

  void attach(CLI::App* sub) {
    add_geometry(sub, geometry);
    option(sub, "--n", n, "Boundary quadrature points")->check(CLI::Range(32, 1 << 20));
    add_common(sub, common);
  }

  void run(Outputs& o) const {
    const CrossSection cs = geometry.build();
    const DemagMatrix dm = compute_demag_matrix(cs, n);
    io::CsvTable t({"shape", "n", "quad_points", "area", "m22", "m23", "m33", "alpha2", "alpha3",
                    "rotation_angle", "degenerate", "estimated_error"});
    t.add_row({geometry.shape, static_cast<long long>(n), static_cast<long long>(dm.quad_points), cs.area(), dm.m22,
               dm.m23, dm.m33, dm.alpha2, dm.alpha3, dm.rotation_angle, static_cast<long long>(dm.degenerate),
               dm.estimated_error});
    std::cout << t.str();
    o.add("matrix.csv", t);
  }
};

struct MinimizeProfile {
  Common common;
  Geometry geometry;
  std::string source{"params"};
  double alpha2{1.0};
  double alpha3{2.0};
  double area{1.0};
  int n{512};
  int points{4001};
  double window{40.0};
  std::string init{"perturbed"};
  int max_iterations{5000};
  double tolerance{1e-8};

  void attach(CLI::App* sub) {
    option(sub, "--source", source, "params: use --alpha2/--alpha3/--area; geometry: compute them")
        ->check(CLI::IsMember({"params", "geometry"}));
    option(sub, "--alpha2", alpha2, "Smaller demag eigenvalue");
    option(sub, "--alpha3", alpha3, "Larger demag eigenvalue");
    option(sub, "--area", area, "Cross-section area |omega|");
    add_geometry(sub, geometry);
    option(sub, "--n", n, "Boundary quadrature points (source=geometry)")
        ->check(CLI::Range(32, 1 << 20));
    option(sub, "--points", points, "Samples of the profile")->check(CLI::Range(3, 1 << 24));
    option(sub, "--window", window, "Half window in wall widths 1/sqrt(alpha_omega)");
    option(sub, "--init", init, "closed-form | perturbed | rotated");
    option(sub, "--max-iterations", max_iterations, "Descent iteration cap")->check(CLI::NonNegativeNumber);
    option(sub, "--tolerance", tolerance, "Projected gradient tolerance");
    add_common(sub, common);
  }

  void run(Outputs& o) const {
    ReducedEnergyParams p{area, alpha2, alpha3};
    if (source == "geometry") {
      const CrossSection cs = geometry.build();
      const DemagMatrix dm = compute_demag_matrix(cs, n);
      p = {cs.area(), dm.alpha2, dm.alpha3};
    }
    p.validate();
    if (!(window > 0.0)) throw Error(ErrorKind::domain, "window must be positive");
    const double half = window / std::sqrt(p.alpha_omega());
    const UniformGrid grid{-half, half, points};
    const InitKind kind = init_kind_from_string(init);
    DescentOptions opts;
    opts.max_iterations = max_iterations;
    opts.gradient_tolerance = tolerance;
    const auto res = minimize_reduced(p, initial_profile(kind, p, grid), opts);
    const WallProfile ref = fixed_minimizer(p, grid).profile;
    const Alignment al = align_profile(res.profile, ref);
    const double e = reduced_energy(res.profile, p, TailCheck::skip);

    io::CsvTable prof({"x", "m1", "m2", "m3"});
    for (int i = 0; i < res.profile.size(); ++i) {
      const Vec3 v = res.profile[i];
      prof.add_row({grid.x(i), v.x, v.y, v.z});
    }
    io::CsvTable hist({"step", "energy"});
    for (std::size_t i = 0; i < res.energy_history.size(); ++i)
      hist.add_row({static_cast<long long>(i), res.energy_history[i]});
    io::CsvTable sum({"alpha2", "alpha3", "area", "init", "energy", "minimal_energy", "relative_error",
                      "aligned_distance", "translation", "rotated", "status", "iterations", "gradient_norm"});
    const double emin = p.minimal_energy();
    sum.add_row({p.alpha2, p.alpha3, p.area, init, e, emin, std::abs(e - emin) / emin, al.distance, al.translation,
                 static_cast<long long>(al.rotated), std::string(to_string(res.status)),
                 static_cast<long long>(res.iterations), res.gradient_norm});
    std::cout << sum.str();
    o.add("profile.csv", prof);
    o.add("history.csv", hist);
    o.add("summary.csv", sum);
  }
};

struct ThinWire {
  Common common;
  Geometry geometry;
  int n{1024};
  int nx{64};
  int cells{8};
  double window{8.0};
  std::vector<double> ladder{0.4, 0.2, 0.1};
  std::string init{"closed-form"};
  int max_iterations{200};
  double tolerance{1e-6};
  bool minimize{false};

  explicit ThinWire(bool minimize_) : minimize(minimize_) {
    geometry.shape = "rectangle";
    geometry.a = 1.0 / std::sqrt(5.0);
    geometry.b = 0.5 / std::sqrt(5.0);
  }

  void attach(CLI::App* sub) {
    add_geometry(sub, geometry);
    option(sub, "--n", n, "Boundary quadrature points for the demag block")
        ->check(CLI::Range(32, 1 << 20));
    option(sub, "--nx", nx, "Axial cells")->check(CLI::Range(3, 1 << 20));
    option(sub, "--cells", cells, "Transverse cells along the longer side")
        ->check(CLI::Range(1, 4096));
    option(sub, "--window", window, "Half window in wall widths");
    option(sub, "--d-ladder", ladder, "Scales d, comma separated")->delimiter(',');
    option(sub, "--init", init, "closed-form | perturbed | rotated");
    if (minimize) {
      option(sub, "--max-iterations", max_iterations, "Descent iteration cap")
          ->check(CLI::NonNegativeNumber);
      option(sub, "--tolerance", tolerance, "Projected gradient tolerance");
    }
    add_common(sub, common);
  }

  void run(Outputs& o) const {
    require_ladder(ladder);
    const CrossSection cs = geometry.build();
    ThinWireSetup s{cs, compute_demag_matrix(cs, n)};
    s.window = window;
    s.axial_cells = nx;
    s.transverse_cells = cells;
    s.init = init_kind_from_string(init);
    s.stray.threads = common.threads;
    s.minimize.descent.max_iterations = max_iterations;
    s.minimize.descent.gradient_tolerance = tolerance;
    const double e0 = s.reduced().minimal_energy();

    std::vector<std::string> header{"d", "grid", "faces", "E_ex", "E_mag", "E", "E_over_d2", "E0"};
    if (minimize)
      header.insert(header.end(), {"E_initial", "iterations", "status", "gradient_norm", "distance_closed_form",
                                   "distance_discrete"});
    io::CsvTable t(header);
    for (const double d : ladder) {
      const ThinWireResult r = run_thin_wire(s, d, minimize);
      const std::string grid = std::to_string(r.nx) + "x" + std::to_string(r.ny) + "x" + std::to_string(r.nz);
      std::vector<io::Cell> row{d, grid, static_cast<long long>(r.faces), r.final_energy.exchange,
                                r.final_energy.magnetostatic, r.final_energy.total(), r.scaled_energy(), e0};
      if (minimize)
        row.insert(row.end(), {r.initial.total(), static_cast<long long>(r.iterations),
                               std::string(to_string(r.status)), r.gradient_norm, r.distance_closed_form,
                               r.distance_discrete});
      t.add_row(std::move(row));
    }
    std::cout << t.str();
    o.add(minimize ? "minimize3d.csv" : "energy3d.csv", t);
  }
};

struct VortexScan {
  Common common;
  std::vector<double> ladder{4.0, 8.0, 16.0};
  int cells{16};
  long long max_faces{100000};

  void attach(CLI::App* sub) {
    option(sub, "--d-ladder", ladder, "Wire sizes d, comma separated")->delimiter(',');
    option(sub, "--grid", cells, "Cells across the square cross section")
        ->check(CLI::Range(2, 4096));
    option(sub, "--max-faces", max_faces, "Charged-face limit")->check(CLI::PositiveNumber);
    add_common(sub, common);
  }

  void run(Outputs& o) const {
    require_ladder(ladder);
    const VortexGridOptions opt{cells, common.threads, static_cast<std::size_t>(max_faces)};
    io::CsvTable t({"d", "L", "nx", "faces", "E_ex", "E_ex_grid", "E_ex_formal_tilde", "E_mag_tilde", "E_mag",
                    "E", "l2_diff", "bound_mag_tilde", "bound_ex_formal_tilde", "bound_mag_diff", "bound_l2_diff_sq",
                    "bound_ex_diff", "bound_E", "pass"});
    std::vector<double> ds, es;
    for (const double d : ladder) {
      const VortexReport r = verify_bounds(VortexParams::with_default_length(d), opt);
      std::vector<io::Cell> row{r.params.d,        r.params.L,        static_cast<long long>(r.nx),
                                static_cast<long long>(r.faces), r.exchange_m, r.exchange_m_grid,
                                r.exchange_formal_tilde, r.mag_tilde, r.mag_m,
                                r.energy(),        std::sqrt(r.l2_diff_sq)};
      for (const auto& c : r.checks) row.push_back(c.bound);
      row.push_back(r.pass() ? std::string("PASS") : std::string("FAIL"));
      t.add_row(std::move(row));
      ds.push_back(d);
      es.push_back(r.energy());
    }
    std::cout << t.str();
    if (ds.size() >= 2) std::cout << "loglog slope of E vs d: " << io::format_number(loglog_slope(ds, es)) << "\n";
    io::PlotSpec plot;
    plot.csv = "vortex.csv";
    plot.output = "vortex.png";
    plot.title = "Vortex wall energy";
    plot.xlabel = "d";
    plot.ylabel = "energy";
    plot.series = {{1, 10, "E(m)", "linespoints"}, {1, 17, "150 d^{5/2} (ln d)^{1/2}", "lines"}};
    o.add("vortex.csv", t);
    o.add("vortex.gp", io::gnuplot_script(plot));
  }
};

struct VerifyLemmas {
  Common common;
  long long seed{1};
  std::string set{"all"};
  int a1_pairs{50};
  int a2_cases{100};
  int a3_fields{100};

  void attach(CLI::App* sub) {
    option(sub, "--seed", seed, "Random seed")->check(CLI::NonNegativeNumber);
    std::vector<std::string> names{"all"};
    for (const auto& s : lemma_set_names()) names.push_back(s);
    option(sub, "--set", set, "all | A1 | A2 | A3 | L31 | L32 | L33")->check(CLI::IsMember(names));
    option(sub, "--a1-pairs", a1_pairs, "Random field pairs")->check(CLI::NonNegativeNumber);
    option(sub, "--a2-cases", a2_cases, "Random rectangles and points")->check(CLI::NonNegativeNumber);
    option(sub, "--a3-fields", a3_fields, "Random profiles")->check(CLI::NonNegativeNumber);
    add_common(sub, common);
  }

  void run(Outputs& o) const {
    LemmaSuiteConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(seed);
    if (set != "all") cfg.sets = {set};
    cfg.a1_pairs = a1_pairs;
    cfg.a2_cases = a2_cases;
    cfg.a3_fields = a3_fields;
    cfg.threads = common.threads;
    const auto checks = run_all(cfg);
    io::CsvTable t({"name", "measured", "bound", "margin", "pass"});
    int passed = 0;
    for (const auto& c : checks) {
      t.add_row({c.name, c.measured, c.bound, c.margin(), c.pass() ? std::string("PASS") : std::string("FAIL")});
      passed += c.pass();
    }
    std::cout << passed << "/" << checks.size() << " checks pass\n";
    o.add("lemmas.csv", t);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Domain walls in thin and thick ferromagnetic nanowires"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  app.config_formatter(std::make_shared<SubcommandConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  ComputeMatrix cm;
  MinimizeProfile mp;
  ThinWire e3(false), m3(true);
  VortexScan vs;
  VerifyLemmas vl;
  struct Entry {
    CLI::App* sub;
    std::function<void(Outputs&)> run;
    const Common* common;
  };
  std::vector<Entry> entries;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    cmd.attach(sub);
    entries.push_back({sub, [&cmd](Outputs& o) { cmd.run(o); }, &cmd.common});
  };
  add("compute-matrix", "Transverse demag block of a cross section", cm);
  add("minimize-profile", "Minimize the reduced 1D wall energy", mp);
  add("energy3d", "Energy of the extended closed-form wall on d*omega", e3);
  add("minimize3d", "Minimize E_ex + E_mag on d*omega along a d ladder", m3);
  add("vortex-scan", "Vortex-wall construction and its energy bounds", vs);
  add("verify-lemmas", "Randomized checks of the quantitative lemmas", vl);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    for (const auto& e : entries) {
      if (!e.sub->parsed()) continue;
      Outputs out;
      e.run(out);
      out.write(e.common->out, e.sub);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.is_user_error() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
