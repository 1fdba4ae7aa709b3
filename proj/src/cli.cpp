#include "bosoncpa/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "bosoncpa/csv.hpp"
#include "bosoncpa/errors.hpp"
#include "bosoncpa/parallel.hpp"

namespace bosoncpa {

ModelParams model_params(const RunConfig& cfg) {
  const bool sampling = cfg.mode == "mc-dos";
  ModelParams p;
  p.d = cfg.d;
  p.b = cfg.b;
  p.nu = cfg.nu.value_or(cfg.d == 0 ? 0.0 : 1.0);
  if (cfg.N.has_value() != cfg.M.has_value())
    throw ArgumentError("--N and --M must be given together");
  if (cfg.N) {
    if (*cfg.N < 1 || *cfg.M < 1) throw ArgumentError("--N and --M must be >= 1");
    p.bands = cfg.N;
    p.aux_dim = cfg.M;
    p.a = static_cast<double>(*cfg.M) / (2.0 * *cfg.N);
    if (cfg.a && *cfg.a != p.a)
      throw ArgumentError("--a disagrees with M/(2N) = " + format_double(p.a));
  } else {
    if (sampling) throw ArgumentError("mc-dos needs --N and --M");
    p.a = cfg.a.value_or(1.0);
  }
  if (sampling) {
    if (cfg.extents.empty()) {
      p.extents.assign(static_cast<std::size_t>(std::max(cfg.d, 0)), 32);
    } else if (cfg.extents.size() == 1 && cfg.d > 1) {
      p.extents.assign(static_cast<std::size_t>(cfg.d), cfg.extents.front());
    } else {
      p.extents = cfg.extents;
    }
  }
  p.validate();
  return p;
}

std::vector<double> omega_grid(const RunConfig& cfg) {
  if (cfg.omega_steps < 0) throw ArgumentError("--omega-steps must be >= 0");
  if (cfg.omega_min < 0.0) throw ArgumentError("--omega-min must be >= 0");
  std::vector<double> w;
  if (cfg.omega_steps == 0) return w;
  if (!(cfg.omega_max > cfg.omega_min))
    throw ArgumentError("--omega-max must exceed --omega-min");
  const int n = cfg.omega_steps;
  w.reserve(static_cast<std::size_t>(n));
  if (cfg.omega_min == 0.0) {
    for (int i = 1; i <= n; ++i) w.push_back(cfg.omega_max * i / n);
  } else if (n == 1) {
    w.push_back(cfg.omega_min);
  } else {
    for (int i = 0; i < n; ++i)
      w.push_back(cfg.omega_min + (cfg.omega_max - cfg.omega_min) * i / (n - 1));
  }
  return w;
}

CompareResult compare_curves(const DosCurve& cpa, const SpectrumHistogram& mc) {
  if (cpa.omegas.empty()) throw ArgumentError("CPA curve is empty");
  for (std::size_t i = 1; i < cpa.omegas.size(); ++i)
    if (!(cpa.omegas[i] > cpa.omegas[i - 1]))
      throw ArgumentError("CPA omega grid must be ascending");
  const auto& w = cpa.omegas;
  CompareResult r;
  r.bins = mc.bins();
  for (std::size_t i = 0; i < mc.bins(); ++i) {
    const double c = mc.center(i);
    double ref;
    if (c < w.front()) {
      ref = cpa.rho.front();
      ++r.bins_outside_curve;
    } else if (c > w.back()) {
      ref = 0.0;
      ++r.bins_outside_curve;
    } else {
      const auto hi = static_cast<std::size_t>(
          std::lower_bound(w.begin(), w.end(), c) - w.begin());
      if (w[hi] == c || hi == 0) {
        ref = cpa.rho[hi];
      } else {
        const double t = (c - w[hi - 1]) / (w[hi] - w[hi - 1]);
        ref = (1.0 - t) * cpa.rho[hi - 1] + t * cpa.rho[hi];
      }
    }
    const double dev = std::abs(mc.density(i) - ref);
    r.l1 += dev * mc.width(i);
    r.max_deviation = std::max(r.max_deviation, dev);
  }
  return r;
}

namespace {

QuadratureSpec quad_spec(const RunConfig& cfg, int d) {
  QuadratureSpec q = QuadratureSpec::defaults_for(d);
  if (cfg.kgrid > 0) q.points_per_dim = cfg.kgrid;
  q.rule = quadrature_rule_from_string(cfg.quadrature);
  q.convergence_check = cfg.check_quadrature;
  q.validate();
  return q;
}

SolverConfig solver_config(const RunConfig& cfg) {
  SolverConfig s;
  s.direction = cfg.descending ? SweepDirection::kDescending : SweepDirection::kAscending;
  return s;
}

void put_config(CsvTable& t, const RunConfig& cfg) {
  t.set("mode", cfg.mode);
  t.set("omega_min", format_double(cfg.omega_min));
  t.set("omega_max", format_double(cfg.omega_max));
  t.set("omega_steps", std::to_string(cfg.omega_steps));
  if (cfg.mode == "mc-dos") {
    t.set("samples", std::to_string(cfg.samples));
    t.set("bins", std::to_string(cfg.bins));
    t.set("seed", std::to_string(cfg.seed));
    t.set("hist_max", format_double(cfg.hist_max));
  } else {
    t.set("check_quadrature", cfg.check_quadrature ? "true" : "false");
    t.set("richardson", cfg.richardson ? "true" : "false");
    t.set("sweep", cfg.descending ? "descending" : "ascending");
  }
}

void emit(const CsvTable& t, const RunConfig& cfg, std::ostream& out,
          std::ostream& err) {
  for (const auto& w : t.warnings) err << "warning: " << w << '\n';
  if (cfg.out.empty()) {
    write_csv(t, out);
  } else {
    write_csv_file(t, cfg.out);
  }
}

void put_model(CsvTable& t, const ModelParams& p) {
  t.set("d", std::to_string(p.d));
  std::string ext;
  for (std::size_t i = 0; i < p.extents.size(); ++i)
    ext += (i ? "x" : "") + std::to_string(p.extents[i]);
  t.set("extents", ext.empty() ? "-" : ext);
  t.set("N", p.bands ? std::to_string(*p.bands) : "-");
  t.set("M", p.aux_dim ? std::to_string(*p.aux_dim) : "-");
  t.set("a", format_double(p.a));
  t.set("b", format_double(p.b));
  t.set("nu", format_double(p.nu));
}

int run_dos(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const bool rmt = cfg.mode == "rmt-dos";
  RunConfig c = cfg;
  if (rmt) {
    c.d = 0;
    c.nu = 0.0;
  }
  const ModelParams params = model_params(c);
  const auto grid = omega_grid(c);
  const double eps = c.eps > 0.0 ? c.eps : default_eps(params);
  const QuadratureSpec quad = quad_spec(c, params.d);

  DosCurve curve;
  if (rmt) {
    curve = rmt_dos_curve(grid, eps, params.a, params.b);
    curve.quad = quad;
  } else if (grid.empty()) {
    curve.params = params;
    curve.quad = quad;
    curve.eps = eps;
    curve.dirac_mass_at_zero =
        params.random_matrix_limit() ? std::max(0.0, 1.0 - params.a) : 0.0;
  } else if (c.richardson) {
    curve = dos_curve_extrapolated(grid, eps, params, quad, solver_config(c));
  } else {
    curve = dos_curve(grid, eps, params, quad, solver_config(c));
  }
  if (grid.empty()) curve.warnings.push_back("empty omega grid; no data rows written");

  CsvTable t = to_table(curve);
  put_config(t, c);
  if (rmt && params.a > 1.0) {
    // Inside the gap rho is O(eps); the edge needs eps far below the
    // 1e-6 threshold regardless of the curve's eps.
    const double gap_eps = std::min(eps, 1e-9 * params.b);
    if (const auto edge = rmt_gap_edge(params.a, params.b, gap_eps)) {
      t.set("gap_edge", format_double(*edge));
      t.set("gap_edge_eps", format_double(gap_eps));
    }
  }
  emit(t, c, out, err);
  return 0;
}

int run_mc(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ModelParams params = model_params(cfg);
  McOptions opt;
  opt.samples = cfg.samples;
  opt.bins = cfg.bins;
  opt.seed = cfg.seed;
  opt.omega_max = cfg.hist_max;
  const SpectrumHistogram h = mc_dos(params, opt);
  CsvTable t = to_table(h);
  put_model(t, params);
  put_config(t, cfg);
  for (const auto& w : params.sampling_warnings()) t.warnings.push_back(w);
  if (h.overflow_count > 0)
    t.warnings.push_back(std::to_string(h.overflow_count) +
                         " eigenvalues above the last bin edge");
  emit(t, cfg, out, err);
  return 0;
}

int run_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const ModelParams params = model_params(cfg);
  const QuadratureSpec quad = quad_spec(cfg, params.d);
  const Complex z(cfg.z_re, cfg.z_im);
  if (z.real() == 0.0) throw ArgumentError("--z-re must be nonzero");
  const bool mirrored = z.real() < 0.0;
  const CoherentPotential cp = resolve(mirrored ? -z : z, params, quad, solver_config(cfg));
  const Complex g = mirrored ? -cp.g : cp.g;
  for (const auto& w : cp.warnings) err << "warning: " << w << '\n';
  std::ostringstream os;
  os << "z_re = " << format_double(z.real()) << '\n'
     << "z_im = " << format_double(z.imag()) << '\n'
     << "p_re = " << format_double(cp.p.real()) << '\n'
     << "p_im = " << format_double(cp.p.imag()) << '\n'
     << "g_re = " << format_double(g.real()) << '\n'
     << "g_im = " << format_double(g.imag()) << '\n'
     << "residual = " << format_double(cp.residual) << '\n'
     << "iterations = " << cp.iterations << '\n'
     << "flagged = " << (cp.flagged ? "true" : "false") << '\n'
     << "branch = " << cp.branch_tag << '\n';
  if (mirrored) os << "note = p(-z) = p(z); g mapped through g(-z) = -g(z)\n";
  if (cfg.out.empty()) {
    out << os.str();
  } else {
    std::ofstream f(cfg.out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + cfg.out + "' for writing");
    f << os.str();
  }
  return 0;
}

int run_compare(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  if (cfg.cpa_path.empty() || cfg.mc_path.empty())
    throw ArgumentError("compare needs --cpa and --mc");
  const DosCurve cpa = dos_curve_from_table(read_csv_file(cfg.cpa_path));
  const SpectrumHistogram mc = histogram_from_table(read_csv_file(cfg.mc_path));
  const CompareResult r = compare_curves(cpa, mc);
  out << "l1 = " << format_double(r.l1) << '\n'
      << "max_deviation = " << format_double(r.max_deviation) << '\n'
      << "bins = " << r.bins << '\n'
      << "bins_outside_curve = " << r.bins_outside_curve << '\n'
      << "threshold = " << format_double(cfg.threshold) << '\n'
      << "result = " << (r.l1 <= cfg.threshold ? "pass" : "fail") << '\n';
  return r.l1 <= cfg.threshold ? 0 : 3;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.threads > 0) set_threads(cfg.threads);
    if (cfg.mode == "cpa-dos" || cfg.mode == "rmt-dos") return run_dos(cfg, out, err);
    if (cfg.mode == "mc-dos") return run_mc(cfg, out, err);
    if (cfg.mode == "solve-p") return run_solve(cfg, out, err);
    if (cfg.mode == "compare") return run_compare(cfg, out, err);
    throw ArgumentError("unknown mode '" + cfg.mode + "'");
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  int n_bands = 0, m_aux = 0;
  double a = 1.0, nu = 1.0;

  CLI::App app{"Density of eigenfrequencies of disordered bosonic lattices: "
               "coherent potential curves and Monte Carlo histograms"};
  app.set_version_flag("--version", std::string(library_version()));
  app.require_subcommand(1, 1);

  auto* cpa = app.add_subcommand("cpa-dos", "CPA density curve on an omega grid");
  auto* rmt = app.add_subcommand("rmt-dos", "random-matrix limit (nu = 0, single site) density curve");
  auto* mc = app.add_subcommand("mc-dos", "Monte Carlo eigenfrequency histogram");
  auto* solve = app.add_subcommand("solve-p", "coherent potential p(z) and g(z) at one z");
  auto* cmp = app.add_subcommand("compare", "L1 distance between a CPA curve and an MC histogram");

  auto add_common = [&](CLI::App* s) {
    s->add_option("--threads", cfg.threads, "worker threads, 0 = OpenMP default")
        ->capture_default_str();
    s->add_option("--out", cfg.out, "output file (default: standard output)");
  };
  auto add_model = [&](CLI::App* s, bool lattice) {
    if (lattice) {
      s->add_option("--d", cfg.d, "spatial dimension, 0 = single site")->capture_default_str();
      s->add_option("--nu", nu, "deterministic frequency scale (default 1, or 0 when d = 0)");
    }
    s->add_option("--a", a, "ratio M/(2N) (default 1, or derived from N and M)");
    s->add_option("--b", cfg.b, "disorder strength")->capture_default_str();
  };
  auto add_dims = [&](CLI::App* s) {
    s->add_option("--N", n_bands, "bands per site (requires --M)");
    s->add_option("--M", m_aux, "auxiliary dimension (requires --N)");
  };
  auto add_quad = [&](CLI::App* s) {
    s->add_option("--kgrid", cfg.kgrid, "zone points per axis, 0 = 4096/256/64/16 by d")
        ->capture_default_str();
    s->add_option("--quadrature", cfg.quadrature, "zone rule: analytic | uniform")
        ->capture_default_str()
        ->check(CLI::IsMember({"analytic", "uniform"}));
    s->add_flag("--check-quadrature", cfg.check_quadrature,
                "compare each zone integral against the doubled grid");
  };
  auto add_grid = [&](CLI::App* s) {
    s->add_option("--omega-min", cfg.omega_min,
                  "first frequency; 0 puts the grid at omega_max * i / steps")
        ->capture_default_str();
    s->add_option("--omega-max", cfg.omega_max, "last frequency")->capture_default_str();
    s->add_option("--omega-steps", cfg.omega_steps, "number of frequencies (0 = header only)")
        ->capture_default_str();
    s->add_option("--eps", cfg.eps, "distance from the imaginary axis, 0 = 1e-3 nu (1e-3 b if nu = 0)")
        ->capture_default_str();
  };

  add_common(cpa);
  add_model(cpa, true);
  add_grid(cpa);
  add_quad(cpa);
  cpa->add_flag("--richardson", cfg.richardson, "extrapolate 2 rho(eps/2) - rho(eps)");
  cpa->add_flag("--descending", cfg.descending, "sweep the omega grid from the top");

  add_common(rmt);
  add_model(rmt, false);
  add_grid(rmt);

  add_common(mc);
  add_model(mc, true);
  add_dims(mc);
  mc->add_option("--extent", cfg.extents, "sites per axis (one value is repeated; default 32)");
  mc->add_option("--samples", cfg.samples, "number of realizations")->capture_default_str();
  mc->add_option("--bins", cfg.bins, "histogram bins")->capture_default_str();
  mc->add_option("--seed", cfg.seed, "base seed; sample i uses stream (seed, i)")
      ->capture_default_str();
  mc->add_option("--hist-max", cfg.hist_max, "upper histogram edge, 0 = largest |mu|")
      ->capture_default_str();

  add_common(solve);
  add_model(solve, true);
  add_quad(solve);
  solve->add_option("--z-re", cfg.z_re, "Re z")->capture_default_str();
  solve->add_option("--z-im", cfg.z_im, "Im z")->capture_default_str();

  cmp->add_option("--cpa", cfg.cpa_path, "CSV written by cpa-dos or rmt-dos")->required();
  cmp->add_option("--mc", cfg.mc_path, "CSV written by mc-dos")->required();
  cmp->add_option("--threshold", cfg.threshold, "largest accepted L1 distance")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  for (auto* s : {cpa, rmt, mc, solve, cmp})
    if (s->parsed()) {
      cfg.mode = s->get_name();
      if (s->get_option_no_throw("--a") && s->count("--a")) cfg.a = a;
      if (s->get_option_no_throw("--nu") && s->count("--nu")) cfg.nu = nu;
      if (s->get_option_no_throw("--N") && s->count("--N")) cfg.N = n_bands;
      if (s->get_option_no_throw("--M") && s->count("--M")) cfg.M = m_aux;
    }
  return run(cfg, out, err);
}

}  // namespace bosoncpa
