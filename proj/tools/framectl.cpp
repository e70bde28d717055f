// framectl: verdicts, bounds, fuzz campaigns and instance utilities for
// (controlled) g-frames stored as JSON frame files.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "cgf/duality.hpp"
#include "cgf/harness/campaign.hpp"
#include "cgf/harness/frame_file.hpp"
#include "cgf/harness/generators.hpp"
#include "cgf/harness/rng.hpp"

namespace {

using cgf::Controller;
using cgf::FrameFile;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotFrame = 2;
constexpr int kExitViolations = 3;

ordered_json bounds_json(const cgf::FrameBounds& b) {
  return ordered_json{{"lower", b.lower}, {"upper", b.upper}};
}

Controller controller_or_identity(const std::optional<cgf::Matrix>& m, cgf::Index n,
                                  const cgf::Tolerances& tol) {
  return m ? Controller::make(*m, tol) : Controller::identity(n);
}

cgf::Tolerances tolerances_from(std::optional<double> tol) {
  cgf::Tolerances t;
  if (tol) {
    t.pos_tol = *tol;
    t.eq_tol = *tol;
  }
  t.validate();
  return t;
}

ordered_json frame_verdict_json(const cgf::GFrameVerdict& v) {
  return ordered_json{{"is_frame", v.is_frame},
                      {"is_tight", v.is_tight},
                      {"is_parseval", v.is_parseval},
                      {"bounds", bounds_json(v.bounds)}};
}

ordered_json controlled_json(const cgf::ControlledVerdict& v) {
  return ordered_json{{"operator_self_adjoint", v.operator_self_adjoint},
                      {"is_controlled_frame", v.is_controlled_frame},
                      {"bounds", bounds_json(v.bounds)}};
}

ordered_json vector_json(const cgf::Vector& v) {
  ordered_json out = ordered_json::array();
  for (cgf::Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

struct CheckArgs {
  std::string file;
  bool controlled = false;
  std::optional<double> tol;
};

int run_check(const CheckArgs& a) {
  const cgf::Tolerances tol = tolerances_from(a.tol);
  const FrameFile ff = cgf::load_frame(a.file);
  const cgf::GFrameVerdict v = cgf::optimal_bounds(ff.frame, tol);
  ordered_json out;
  out["frame"] = frame_verdict_json(v);
  out["g_complete"] = cgf::is_g_complete(ff.frame, tol);
  bool ok = v.is_frame;
  if (a.controlled) {
    const cgf::Index n = ff.frame.ambient_dim();
    const Controller t = controller_or_identity(ff.t, n, tol);
    const Controller u = controller_or_identity(ff.u, n, tol);
    const cgf::ControlledVerdict cv = cgf::is_controlled_g_frame(ff.frame, t, u, tol);
    out["controlled"] = controlled_json(cv);
    out["controllers"] = ordered_json{{"T_in_gl_plus", t.in_gl_plus()},
                                      {"U_in_gl_plus", u.in_gl_plus()}};
    ok = cv.is_controlled_frame;
  }
  std::cout << out.dump(2) << "\n";
  return ok ? kExitOk : kExitNotFrame;
}

int run_bounds(const std::string& file) {
  const FrameFile ff = cgf::load_frame(file);
  const cgf::Tolerances tol;
  ordered_json out;
  out["optimal"] = bounds_json(cgf::optimal_bounds(ff.frame, tol).bounds);
  if (ff.t || ff.u) {
    const cgf::Index n = ff.frame.ambient_dim();
    const Controller t = controller_or_identity(ff.t, n, tol);
    const Controller u = controller_or_identity(ff.u, n, tol);
    out["controlled"] = bounds_json(cgf::is_controlled_g_frame(ff.frame, t, u, tol).bounds);
  }
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

struct FuzzArgs {
  std::string theorem;
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  std::optional<cgf::Index> dim_max;
  unsigned threads = 1;
  std::string out;
};

int run_fuzz(const FuzzArgs& a) {
  if (!cgf::is_registered(a.theorem)) {
    throw cgf::Error(cgf::ErrorCode::UnknownTheorem, "'" + a.theorem + "' is not registered");
  }
  cgf::CampaignConfig cfg;
  if (a.dim_max) cfg.dim_max = *a.dim_max;
  const cgf::CampaignReport rep = cgf::run_campaign(a.theorem, a.trials, a.seed, cfg, a.threads);
  cgf::write_text_file(a.out, cgf::report_text(rep));
  std::cout << a.theorem << ": " << rep.trials << " trials, " << rep.hypotheses_met
            << " hypotheses met, " << rep.verified << " verified, " << rep.violations
            << " violations\n";
  return rep.violations ? kExitViolations : kExitOk;
}

struct ReconstructArgs {
  std::string file;
  std::string signal;
  std::optional<std::string> dual;
  std::size_t max_iter = 10000;
  double tol = 1e-14;
  bool direct = false;
};

int run_reconstruct(const ReconstructArgs& a) {
  const cgf::Tolerances tol;
  const FrameFile ff = cgf::load_frame(a.file);
  const cgf::Index n = ff.frame.ambient_dim();
  const Controller t = controller_or_identity(ff.t, n, tol);
  const Controller u = controller_or_identity(ff.u, n, tol);
  const cgf::GFrame g = a.dual ? cgf::load_frame(*a.dual).frame : ff.frame;
  const cgf::Vector x = cgf::load_signal(a.signal);
  if (x.size() != n) {
    throw cgf::Error(cgf::ErrorCode::DimensionMismatch,
                     "signal has length " + std::to_string(x.size()) + ", frame acts on C^" +
                         std::to_string(n));
  }
  // Coefficients {Lambda_i T f}.
  const cgf::CoefficientVector coeffs = cgf::analysis(ff.frame, t.matrix() * x);
  const auto path = a.direct ? cgf::ReconstructionPath::direct : cgf::ReconstructionPath::neumann;
  const cgf::Reconstruction r =
      cgf::reconstruct(coeffs, g, ff.frame, t, u, tol, a.max_iter, path, a.tol);
  ordered_json out;
  out["signal"] = vector_json(r.signal);
  out["error"] = (r.signal - x).norm();
  out["relative_error"] = x.norm() > 0 ? (r.signal - x).norm() / x.norm() : (r.signal - x).norm();
  out["path"] = a.direct ? "direct" : "neumann";
  out["q"] = r.report.q;
  out["iterations"] = r.report.iterations;
  out["residual"] = r.report.residual;
  out["residual_bound"] = r.report.residual_bound;
  out["inverse_norm"] = r.report.inverse_norm;
  out["inverse_norm_bound"] = r.report.inverse_norm_bound;
  out["ordering_gap"] = r.ordering_gap;
  std::cout << out.dump(2) << "\n";
  return kExitOk;
}

int run_compose(const std::string& outer_path, const std::vector<std::string>& inner_paths,
                const std::string& out_path) {
  const FrameFile outer = cgf::load_frame(outer_path);
  std::vector<cgf::GFrame> inners;
  for (const auto& p : inner_paths) inners.push_back(cgf::load_frame(p).frame);
  FrameFile out{cgf::compose(outer.frame, inners), outer.t, outer.u};
  cgf::save_frame(out_path, out);
  return kExitOk;
}

int run_perturb(const std::string& in, double magnitude, std::uint64_t seed,
                const std::string& out_path) {
  if (!(magnitude >= 0.0)) {
    throw cgf::Error(cgf::ErrorCode::InvalidArgument, "magnitude must be non-negative");
  }
  const FrameFile ff = cgf::load_frame(in);
  FrameFile out{cgf::gen_perturbed(ff.frame, magnitude, seed), ff.t, ff.u};
  cgf::save_frame(out_path, out);
  return kExitOk;
}

struct GenerateArgs {
  cgf::Index n = 2;
  std::vector<cgf::Index> dims{1, 1};
  std::uint64_t seed = 0;
  std::string controller = "identity";
  double conditioning = 1e4;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  cgf::InstanceSpec spec;
  spec.n = a.n;
  spec.dims = a.dims;
  spec.seed = a.seed;
  spec.controller_kind = cgf::parse_controller_kind(a.controller);
  spec.conditioning = a.conditioning;
  FrameFile ff{cgf::gen_gframe(spec), std::nullopt, std::nullopt};
  if (spec.controller_kind != cgf::ControllerKind::identity) {
    const std::optional<cgf::Matrix> base = cgf::frame_operator(ff.frame);
    ff.t = cgf::gen_controller(a.n, spec.controller_kind, cgf::derive_seed(a.seed, 1), base)
               .matrix();
    ff.u = cgf::gen_controller(a.n, spec.controller_kind, cgf::derive_seed(a.seed, 2), base)
               .matrix();
  }
  cgf::save_frame(a.out, ff);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verdicts, bounds and theorem campaigns for controlled g-frames", "framectl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cgf::kToolVersion));

  CheckArgs check;
  auto* c_check = app.add_subcommand("check", "Frame and controlled-frame verdicts");
  c_check->add_option("file", check.file, "Frame file")->required()->envname("FRAMECTL_FILE");
  c_check->add_flag("--controlled", check.controlled, "Use the file's controllers (default I)")
      ->envname("FRAMECTL_CONTROLLED");
  c_check->add_option("--tol", check.tol, "Positivity and equality tolerance")
      ->envname("FRAMECTL_TOL");

  std::string bounds_file;
  auto* c_bounds = app.add_subcommand("bounds", "Optimal frame bounds");
  c_bounds->add_option("file", bounds_file, "Frame file")->required()->envname("FRAMECTL_FILE");

  FuzzArgs fuzz;
  auto* c_fuzz = app.add_subcommand("fuzz", "Run a seeded theorem campaign");
  c_fuzz->add_option("--theorem", fuzz.theorem, "Theorem id")->required()->envname("FRAMECTL_THEOREM");
  c_fuzz->add_option("--trials", fuzz.trials, "Trial count")->envname("FRAMECTL_TRIALS");
  c_fuzz->add_option("--seed", fuzz.seed, "Master seed")->envname("FRAMECTL_SEED");
  c_fuzz->add_option("--dim-max", fuzz.dim_max, "Largest ambient dimension")
      ->envname("FRAMECTL_DIM_MAX");
  c_fuzz->add_option("--threads", fuzz.threads, "Worker threads (0 = all cores)")
      ->envname("FRAMECTL_THREADS");
  c_fuzz->add_option("--out", fuzz.out, "Report path")->required()->envname("FRAMECTL_OUT");

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Recover a signal from its coefficients");
  c_rec->add_option("file", rec.file, "Frame file")->required()->envname("FRAMECTL_FILE");
  c_rec->add_option("--signal", rec.signal, "Signal file")->required()->envname("FRAMECTL_SIGNAL");
  c_rec->add_option("--dual", rec.dual, "Second family (default: the frame itself)")
      ->envname("FRAMECTL_DUAL");
  c_rec->add_option("--max-iter", rec.max_iter, "Neumann iteration cap")
      ->envname("FRAMECTL_MAX_ITER");
  c_rec->add_option("--tol", rec.tol, "Neumann residual target")->envname("FRAMECTL_TOL");
  c_rec->add_flag("--direct", rec.direct, "Invert the cross operator directly")
      ->envname("FRAMECTL_DIRECT");

  std::string outer, compose_out;
  std::vector<std::string> inners;
  auto* c_compose = app.add_subcommand("compose", "Compose a family with inner families");
  c_compose->add_option("outer", outer, "Outer frame file")->required()->envname("FRAMECTL_FILE");
  c_compose->add_option("--inner", inners, "Inner frame file, one per outer block")
      ->required()
      ->envname("FRAMECTL_INNER");
  c_compose->add_option("--out", compose_out, "Output path")->required()->envname("FRAMECTL_OUT");

  std::string perturb_in, perturb_out;
  double magnitude = 0.0;
  std::uint64_t perturb_seed = 0;
  auto* c_perturb = app.add_subcommand("perturb", "Perturb every block by seeded noise");
  c_perturb->add_option("file", perturb_in, "Frame file")->required()->envname("FRAMECTL_FILE");
  c_perturb->add_option("--magnitude", magnitude, "Noise magnitude per block")
      ->required()
      ->envname("FRAMECTL_MAGNITUDE");
  c_perturb->add_option("--seed", perturb_seed, "Noise seed")->envname("FRAMECTL_SEED");
  c_perturb->add_option("--out", perturb_out, "Output path")->required()->envname("FRAMECTL_OUT");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate", "Draw a random frame file");
  c_gen->add_option("--n", gen.n, "Ambient dimension")->envname("FRAMECTL_N");
  c_gen->add_option("--dims", gen.dims, "Block dimensions")->envname("FRAMECTL_DIMS");
  c_gen->add_option("--seed", gen.seed, "Seed")->envname("FRAMECTL_SEED");
  c_gen->add_option("--controller", gen.controller,
                    "identity|diagonal|gl_random|gl_plus_random|polynomial_of_S")
      ->envname("FRAMECTL_CONTROLLER");
  c_gen->add_option("--conditioning", gen.conditioning, "Condition number cap")
      ->envname("FRAMECTL_CONDITIONING");
  c_gen->add_option("--out", gen.out, "Output path")->required()->envname("FRAMECTL_OUT");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*c_check) return run_check(check);
    if (*c_bounds) return run_bounds(bounds_file);
    if (*c_fuzz) return run_fuzz(fuzz);
    if (*c_rec) return run_reconstruct(rec);
    if (*c_compose) return run_compose(outer, inners, compose_out);
    if (*c_perturb) return run_perturb(perturb_in, magnitude, perturb_seed, perturb_out);
    if (*c_gen) return run_generate(gen);
  } catch (const std::exception& e) {
    std::cerr << "framectl: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
