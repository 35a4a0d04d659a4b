// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "wirewall/demag_matrix.hpp"
#include "wirewall/field3d.hpp"
#include "wirewall/lemma_suite.hpp"
#include "wirewall/minimize3d.hpp"
#include "wirewall/random.hpp"
#include "wirewall/vortex.hpp"
#include "wirewall/wall_profiles.hpp"

using namespace wirewall;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass{true};
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.require(secs < limit_seconds, "runtime " + fmt("%.2f", secs) + " s < " + fmt("%g", limit_seconds) + " s");
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

void c1(Outcome& o) {
  for (const auto& [a2, area] : {std::pair{1.0, 1.0}, {2.0, 3.0}, {0.5, std::numbers::pi}}) {
    const auto t0 = std::chrono::steady_clock::now();
    const ReducedEnergyParams p{area, a2, a2 + 1.0};
    const auto m = fixed_minimizer(p, default_window(p, 8001)).profile;
    const double e = reduced_energy(m, p);
    const double exact = 4.0 * std::sqrt(a2 * area);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.require(std::abs(e / exact - 1.0) < 1e-3 && secs < 1.0,
              "alpha2=" + fmt("%g", a2) + " |omega|=" + fmt("%.4g", area) + " rel " + fmt("%.2e", std::abs(e / exact - 1.0)));
  }
}

void c2(Outcome& o) {
  const ReducedEnergyParams p{1.0, 1.0, 2.0};
  const UniformGrid grid = default_window(p, 4001);
  const auto ref = fixed_minimizer(p, grid).profile;
  for (const auto kind : {InitKind::perturbed, InitKind::rotated}) {
    const auto r = minimize_reduced(p, initial_profile(kind, p, grid));
    const double e = r.energy_history.back();
    const double dist = align_profile(r.profile, ref).distance;
    o.require(std::abs(e - 4.0) < 1e-2, std::string(to_string(kind)) + " E " + fmt("%.6f", e));
    o.require(dist < 1e-2, std::string(to_string(kind)) + " L2 " + fmt("%.2e", dist));
  }
}

void c3(Outcome& o) {
  const int n = 512;
  for (const auto& cs : {CrossSection::disc(0.5), CrossSection::rectangle(0.5, 0.5)}) {
    const auto dm = compute_demag_matrix(cs, n);
    const double rel = std::abs(dm.alpha2 - dm.alpha3) / dm.alpha3;
    o.require(rel < 1e-6, std::string(to_string(cs.family())) + " |a2-a3|/a3 " + fmt("%.1e", rel));
  }
  for (const auto& cs : {CrossSection::ellipse(1.0, 0.5), CrossSection::rectangle(1.0, 0.5)}) {
    const auto dm = compute_demag_matrix(cs, n);
    const double margin = dm.alpha3 - dm.alpha2;
    o.require(margin > 10.0 * dm.estimated_error, std::string(to_string(cs.family())) + " 2:1 a3-a2 " +
                                                      fmt("%.4f", margin) + " err " + fmt("%.1e", dm.estimated_error));
    std::vector<double> v;
    for (const int k : {64, 128, 256, 512}) v.push_back(demag_block_raw(cs, k).m22);
    const double s1 = v[1] - v[0], s2 = v[2] - v[1], s3 = v[3] - v[2];
    const bool monotone = (s1 > 0) == (s2 > 0) && (s2 > 0) == (s3 > 0) && std::abs(s3) < std::abs(s2) &&
                          std::abs(s2) < std::abs(s1);
    o.require(monotone, std::string(to_string(cs.family())) + " ladder monotone");
  }
}

void c4(Outcome& o) {
  const auto section = CrossSection::rectangle(1.0 / std::sqrt(5.0), 0.5 / std::sqrt(5.0));
  ThinWireSetup s{section, compute_demag_matrix(section, 1024)};
  s.axial_cells = 64;
  s.transverse_cells = 8;
  s.init = InitKind::perturbed;
  const double e0 = s.reduced().minimal_energy();
  std::vector<ThinWireResult> runs;
  for (const double d : {0.4, 0.2, 0.1}) runs.push_back(run_thin_wire(s, d, true));
  o.require(runs[0].nx == 64 && runs[0].ny == 8 && runs[0].nz == 4, "grid 64x8x4");
  std::string scaled = "E/d^2", dd = "dist", dc = "dist_closed_form";
  bool decreasing = true, dist_decreasing = true;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    scaled += " " + fmt("%.5f", runs[i].scaled_energy());
    dd += " " + fmt("%.4f", runs[i].distance_discrete);
    dc += " " + fmt("%.4f", runs[i].distance_closed_form);
    if (i > 0) {
      decreasing = decreasing && runs[i].scaled_energy() < runs[i - 1].scaled_energy();
      dist_decreasing = dist_decreasing && runs[i].distance_discrete < runs[i - 1].distance_discrete;
    }
  }
  o.require(decreasing, scaled + " decreasing");
  const double rel = std::abs(runs.back().scaled_energy() - e0) / e0;
  o.require(rel < 0.25, "E0 " + fmt("%.5f", e0) + " rel at d=0.1 " + fmt("%.2e", rel));
  o.require(dist_decreasing, dd + " decreasing");
  o.detail += "; " + dc;
}

void c5(Outcome& o) {
  std::vector<double> ds, es;
  for (const double d : {4.0, 8.0, 16.0}) {
    const auto r = verify_bounds(VortexParams::with_default_length(d), {16, 1, 100000});
    std::string failed;
    for (const auto& c : r.checks)
      if (!c.pass()) failed += " [" + c.name + "]";
    o.require(failed.empty(), "d=" + fmt("%g", d) + " E " + fmt("%.4g", r.energy()) + " bound " +
                                  fmt("%.4g", vortex_energy_bound(d)) + failed);
    o.require(r.faces <= 100000, "d=" + fmt("%g", d) + " faces " + std::to_string(r.faces));
    ds.push_back(d);
    es.push_back(r.energy());
  }
  const double slope = loglog_slope(ds, es);
  o.require(slope >= 2.0 && slope <= 3.0, "slope " + fmt("%.3f", slope));
}

void c6(Outcome& o) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    LemmaSuiteConfig cfg;
    cfg.seed = seed;
    const auto checks = run_all(cfg);
    int failed = 0;
    std::string first;
    for (const auto& c : checks)
      if (!c.pass() && failed++ == 0) first = c.name;
    o.require(failed == 0 && !checks.empty(), "seed " + std::to_string(seed) + " " +
                                                  std::to_string(checks.size() - failed) + "/" +
                                                  std::to_string(checks.size()) + (first.empty() ? "" : " " + first));
  }
}

void c7(Outcome& o) {
  Rng rng(2024);
  {
    const ReducedEnergyParams p{1.3, 0.8, 1.9};
    const int n = 400;
    const double h = 0.05;
    std::vector<Vec3> m(n);
    for (auto& v : m) v = normalized(Vec3{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    const auto g = reduced_energy_gradient(m, h, p);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int i = rng.integer(0, n - 1), c = rng.integer(0, 2);
      const double eps = 1e-6, keep = m[i][c];
      m[i][c] = keep + eps;
      const double ep = reduced_energy_raw(m, h, p);
      m[i][c] = keep - eps;
      const double em = reduced_energy_raw(m, h, p);
      m[i][c] = keep;
      worst = std::max(worst, std::abs((ep - em) / (2 * eps) - g[i][c]) / std::max(std::abs(g[i][c]), 1e-3));
    }
    o.require(worst < 1e-5, "1D worst rel " + fmt("%.1e", worst));
  }
  {
    const auto grid = make_wire_grid({CrossSection::ellipse(2.0, 1.0), 0.6, -2.0, 2.0, 10, 8});
    const auto f = Field3D::sample(grid, [](double x, double y, double z) {
      return Vec3{std::tanh(1.3 * x), std::cos(0.7 * y + 0.4 * z) + 0.3, std::sin(1.1 * z - 0.4 * x)};
    });
    std::vector<Vec3> m(f.values().begin(), f.values().end());
    const auto g = exchange_gradient(*grid, m);
    double gmax = 0.0;
    for (const auto& v : g) gmax = std::max(gmax, v.norm());
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const int a = rng.integer(0, grid->cell_count() - 1), c = rng.integer(0, 2);
      const double eps = 1e-6, keep = m[a][c];
      m[a][c] = keep + eps;
      const double ep = exchange_energy(*grid, m);
      m[a][c] = keep - eps;
      const double em = exchange_energy(*grid, m);
      m[a][c] = keep;
      worst = std::max(worst, std::abs((ep - em) / (2 * eps) - g[a][c]) / std::max(std::abs(g[a][c]), 1e-3 * gmax));
    }
    o.require(worst < 1e-5, "3D worst rel " + fmt("%.1e", worst));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Config echoes name their own output directory; that line is expected to differ.
std::string without_out_line(const std::string& s) {
  std::istringstream in(s);
  std::string line, kept;
  while (std::getline(in, line))
    if (line.rfind("out=", 0) != 0) kept += line + "\n";
  return kept;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WIREWALL_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void c8(Outcome& o) {
  const fs::path root = fs::temp_directory_path() / "wirewall_acceptance";
  fs::remove_all(root);
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"compute-matrix", "--shape ellipse --a 1 --b 0.5 --n 256"},
      {"minimize-profile", "--points 801 --window 20 --init rotated"},
      {"energy3d", "--nx 32 --cells 8 --d-ladder 0.4,0.2"},
      {"minimize3d", "--nx 32 --cells 8 --d-ladder 0.4 --max-iterations 40"},
      {"vortex-scan", "--d-ladder 4,8 --grid 8"},
      {"verify-lemmas", "--seed 7"},
  };
  for (const auto& [sub, args] : runs) {
    const fs::path a = root / sub / "a", b = root / sub / "b", c = root / sub / "c";
    const int ra = run_cli(sub + " " + args + " --threads 1 --out " + a.string());
    const int rb = run_cli(sub + " " + args + " --threads 1 --out " + b.string());
    const int rc = run_cli(sub + " " + args + " --threads 3 --out " + c.string());
    bool same = ra == 0 && rb == 0 && rc == 0, agree = same;
    int files = 0;
    if (same) {
      for (const auto& e : fs::directory_iterator(a)) {
        const auto name = e.path().filename();
        ++files;
        if (name.extension() == ".cfg")
          same = same && without_out_line(slurp(e.path())) == without_out_line(slurp(b / name));
        else
          same = same && slurp(e.path()) == slurp(b / name);
        if (name.extension() != ".cfg") agree = agree && slurp(e.path()) == slurp(c / name);
      }
    }
    o.require(same && files > 1, sub + " reproducible (" + std::to_string(files) + " files)");
    o.require(agree, sub + " threads 1 vs 3");
  }
  fs::remove_all(root);
}

}  // namespace

int main() {
  criterion(1, "reduced energy of m^omega", 3.0, c1);
  criterion(2, "1D descent to the wall", 30.0, c2);
  criterion(3, "demag symmetry laws", 60.0, c3);
  criterion(4, "thin-wire limit", 600.0, c4);
  criterion(5, "vortex-wall bounds", 900.0, c5);
  criterion(6, "lemma suite, 10 seeds", 300.0, c6);
  criterion(7, "exchange gradients", 60.0, c7);
  criterion(8, "CLI reproducibility", 600.0, c8);
  std::printf("%d/8 criteria pass\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
