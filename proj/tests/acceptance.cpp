// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>

#include "cgf/duality.hpp"
#include "cgf/harness/campaign.hpp"
#include "cgf/harness/rng.hpp"
#include "cgf/perturb.hpp"

using namespace cgf;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kMaster = 20240601;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double margin_min(const CampaignReport& r, const std::string& name) {
  for (const auto& m : r.margins) {
    if (m.name == name) return m.min;
  }
  return std::numeric_limits<double>::infinity();
}

void campaign_clean(Outcome& o, const CampaignReport& r) {
  o.detail << " " << r.theorem << ": " << r.hypotheses_met << "/" << r.trials << " met, "
           << r.verified << " verified;";
  o.require(r.hypotheses_met > 0, r.theorem + " has no hypotheses-met trials");
  o.require(r.verified == r.hypotheses_met, r.theorem + " has unverified conclusions");
  o.require(r.violations == 0, r.theorem + " reported violations");
}

std::vector<Index> draw_dims(Rng& rng, Index n) {
  for (;;) {
    const auto count = rng.between(1, 12);
    std::vector<Index> dims;
    Index total = 0;
    for (std::int64_t i = 0; i < count; ++i) {
      dims.push_back(rng.between(1, 4));
      total += dims.back();
    }
    if (total >= n) return dims;
  }
}

double block_energy(const GFrame& f, const Vector& x) {
  double q = 0.0;
  for (const auto& b : f.blocks()) q += (b * x).squaredNorm();
  return q;
}

Outcome criterion1() {
  Outcome o;
  double worst_sample = 0.0, worst_attain = 0.0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(derive_seed(kMaster, 1, i));
    InstanceSpec spec;
    spec.n = rng.between(2, 8);
    spec.dims = draw_dims(rng, spec.n);
    spec.seed = rng.next();
    const GFrame f = gen_gframe(spec);
    const GFrameVerdict v = optimal_bounds(f);
    const HermitianEigen e = herm_eig(frame_operator(f));
    for (int k = 0; k < 1000; ++k) {
      const Vector x = rng.complex_normal(spec.n, 1).col(0);
      const double q = block_energy(f, x);
      const double n2 = x.squaredNorm();
      worst_sample = std::max({worst_sample, v.bounds.lower * n2 - q, q - v.bounds.upper * n2});
    }
    const Vector lo = e.vectors.col(0);
    const Vector hi = e.vectors.col(spec.n - 1);
    worst_attain = std::max({worst_attain, std::abs(block_energy(f, lo) - v.bounds.lower),
                             std::abs(block_energy(f, hi) - v.bounds.upper)});
  }
  o.detail << " worst sampled excess " << worst_sample << ", worst attainment gap " << worst_attain;
  o.require(worst_sample <= 1e-9, "sampled inequality");
  o.require(worst_attain <= 1e-9, "extreme eigenvectors");
  return o;
}

Outcome criterion2() {
  Outcome o;
  campaign_clean(o, run_campaign("prop2.3fwd", 500, kMaster));
  campaign_clean(o, run_campaign("prop2.3rev", 500, kMaster));

  // Reverse containment margins, measured against the same roundoff allowance
  // the conclusion uses: eq_tol scaled by the predicted upper bound.
  const Tolerances tol;
  double worst = std::numeric_limits<double>::infinity();
  int met = 0;
  for (std::uint64_t i = 0; i < 500; ++i) {
    Rng rng(derive_seed(kMaster, 2, i));
    InstanceSpec spec;
    spec.n = rng.between(2, 8);
    spec.dims = draw_dims(rng, spec.n);
    spec.seed = rng.next();
    const GFrame f = gen_gframe(spec);
    const Matrix s = frame_operator(f);
    const Controller t = gen_controller(spec.n, ControllerKind::polynomial_of_s, rng.next(), s,
                                        static_cast<int>(rng.between(0, 3)));
    const Controller u = gen_controller(spec.n, ControllerKind::polynomial_of_s, rng.next(), s,
                                        static_cast<int>(rng.between(0, 3)));
    const ReverseContainment rc = check_prop23_reverse(f, t, u, tol);
    if (!rc.report.premise) continue;
    ++met;
    const double allowance = scaled_tol(tol.eq_tol, rc.predicted.upper);
    const double lo = rc.verdict.bounds.lower - rc.predicted.lower;
    const double hi = rc.predicted.upper - rc.verdict.bounds.upper;
    worst = std::min(worst, std::min(lo, hi) + allowance);
  }
  o.detail << " direct reverse runs " << met << "/500, worst adjusted margin " << worst;
  o.require(met == 500, "reverse direct runs");
  o.require(worst >= 0.0, "reverse containment margin");
  return o;
}

Outcome criterion3() {
  Outcome o;
  const CampaignReport r = run_campaign("thm2.7", 200, kMaster);
  campaign_clean(o, r);
  const double fl = margin_min(r, "forward_lower_margin");
  const double fu = margin_min(r, "forward_upper_margin");
  const double cl = margin_min(r, "converse_lower_margin");
  const double cu = margin_min(r, "converse_upper_margin");
  o.detail << " min margins fwd (" << fl << ", " << fu << ") conv (" << cl << ", " << cu << ")";
  o.require(fl >= -1e-9 && fu >= -1e-9, "forward sandwich");
  o.require(cl >= -1e-9 && cu >= -1e-9, "converse sandwich");
  o.require(r.hypotheses_met == 200, "all composition trials applicable");
  return o;
}

Outcome criterion4() {
  Outcome o;
  const CampaignReport r = run_campaign("thm2.8", 200, kMaster);
  campaign_clean(o, r);
  const double m = margin_min(r, "identity_margin");
  o.detail << " min identity margin " << m;
  o.require(r.hypotheses_met == 200, "all trials applicable");
  o.require(m >= 0.0, "identity within 1e-9 |f|^2 |S|");
  return o;
}

Outcome criterion5() {
  Outcome o;
  const CampaignReport r = run_campaign("thm2.9", 200, kMaster);
  campaign_clean(o, r);
  const double lo = margin_min(r, "lower_margin");
  const double hi = margin_min(r, "upper_margin");
  const double eq = margin_min(r, "tight_equality_margin");
  std::size_t tight = 0;
  for (const auto& m : r.margins) {
    if (m.name == "tight_equality_margin") tight = m.count;
  }
  o.detail << " min margins (" << lo << ", " << hi << "), " << tight
           << " tight trials with min equality margin " << eq;
  o.require(lo >= -1e-9 && hi >= -1e-9, "min/max containment");
  o.require(tight > 0, "tight trials exercised");
  o.require(eq >= 0.0, "equality for tight summands");
  return o;
}

Outcome criterion6() {
  Outcome o;
  for (const char* id : {"lem3.2", "thm3.3", "thm3.4", "prop3.5"}) {
    const CampaignReport r = run_campaign(id, 200, kMaster);
    campaign_clean(o, r);
    if (std::string(id) == "thm3.4") {
      const double m = margin_min(r, "lower_margin");
      o.detail << " thm3.4 min lower margin " << m << ";";
      o.require(m >= -1e-9, "thm3.4 predicted lower");
    }
  }
  return o;
}

Outcome criterion7() {
  Outcome o;
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 0.6;
  s(1, 1) = 1.2;
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n <= 20; ++n) {
    const NeumannResult r = neumann_partial_sum(s, n);
    const double bound = std::pow(0.4, double(n + 1)) / 0.6;
    worst = std::min(worst, bound + 1e-12 - r.report.residual);
    o.require(r.report.inverse_bound_holds, "inverse norm bound at N=" + std::to_string(n));
    if (n == 10) {
      o.detail << " residual at N=10 " << r.report.residual << " (0.4^11/0.6 = "
               << std::pow(0.4, 11) / 0.6 << ");";
      o.require(r.report.residual <= 7.0e-6, "N=10 residual");
    }
  }
  o.detail << " min geometric margin " << worst << ";";
  o.require(worst >= 0.0, "geometric residual bound");

  double gap = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    Rng rng(derive_seed(kMaster, 7, i));
    const Index n = rng.between(1, 8);
    Matrix e = rng.complex_normal(n, n);
    e *= rng.uniform(0.0, 0.9) / op_norm(e);
    const Matrix sr = identity(n) - e;
    const NeumannResult r = neumann_inverse(sr);
    gap = std::max(gap, op_norm(r.inverse - invert(sr)));
    o.require(r.report.inverse_bound_holds, "random inverse norm bound");
  }
  o.detail << " worst gap to direct inverse " << gap;
  o.require(gap <= 1e-8, "agreement with direct inverse");
  return o;
}

Outcome criterion8() {
  Outcome o;
  const CampaignReport r = run_campaign("resolution", 200, kMaster);
  campaign_clean(o, r);
  const double ex = margin_min(r, "exact_margin");
  const double tr = margin_min(r, "truncated_margin");
  const double mono = margin_min(r, "monotone_margin");
  o.detail << " min margins exact " << ex << ", truncated " << tr << ", monotone " << mono;
  o.require(r.hypotheses_met == 200, "200 instances with cond <= 1e4");
  o.require(ex >= 0.0, "exact defect");
  o.require(tr >= 0.0, "truncated bound");
  o.require(mono >= -Tolerances{}.eq_tol, "monotone truncated defect");
  return o;
}

Outcome criterion9() {
  Outcome o;
  const CampaignReport r = run_campaign("thm4.2", 300, kMaster);
  campaign_clean(o, r);
  o.require(r.hypotheses_met == 300, "all trials certified");

  const Controller i2 = Controller::identity(2);
  const Controller two = Controller::make(2.0 * identity(2));
  Matrix e1 = Matrix::Zero(1, 2), e2 = Matrix::Zero(1, 2), r2 = Matrix::Zero(1, 2);
  e1(0, 0) = 1.0;
  e2(0, 1) = 1.0;
  r2(0, 1) = std::sqrt(2.0);
  const GFrame coord(2, {e1, e2});
  const GFrame wide(2, {e1, r2});
  struct Scenario {
    const char* name;
    GFrame f, g;
    Controller t, u;
  };
  const Scenario scenarios[] = {{"G=F", coord, coord, i2, i2},
                                {"G=F/2,U=2I", coord, coord.scaled(0.5), i2, two},
                                {"G=2F,T=2I", wide, wide.scaled(2.0), two, i2}};
  for (const auto& sc : scenarios) {
    const PerturbationParams p{0.0, 0.0, {0.0, 0.0}, sc.t, sc.u};
    try {
      const PerturbationReport rep = verify_perturbation_theorem(sc.f, sc.g, p);
      const double slack = std::max(std::abs(rep.slack_lower), std::abs(rep.slack_upper));
      o.detail << " " << sc.name << " slack " << slack << ";";
      o.require(slack <= 1e-10, std::string(sc.name) + " sharpness");
    } catch (const Error& e) {
      o.require(false, std::string(sc.name) + ": " + e.what());
    }
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Outcome criterion10() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "cgf_acceptance";
  fs::create_directories(dir);
  const std::string base = std::string(FRAMECTL_PATH) + " fuzz --theorem thm4.2 --trials 50 --seed 7";
  const fs::path a = dir / "a.json", b = dir / "b.json", c = dir / "c.json";
  const int ra = std::system((base + " --out " + a.string() + " > /dev/null").c_str());
  const int rb = std::system((base + " --out " + b.string() + " > /dev/null").c_str());
  const int rc = std::system((base + " --threads 4 --out " + c.string() + " > /dev/null").c_str());
  o.require(ra == 0 && rb == 0 && rc == 0, "framectl exit status");
  const std::string sa = slurp(a), sb = slurp(b), sc = slurp(c);
  o.detail << " report size " << sa.size() << " bytes";
  o.require(!sa.empty(), "report written");
  o.require(sa == sb, "repeat run identical");
  o.require(sa == sc, "thread count independent");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    double limit_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, 30, criterion1}, {2, 60, criterion2}, {3, 60, criterion3}, {4, 30, criterion4},
      {5, 30, criterion5}, {6, 90, criterion6}, {7, 15, criterion7}, {8, 30, criterion8},
      {9, 60, criterion9}, {10, 30, criterion10},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(secs <= c.limit_seconds, "runtime over " + std::to_string(int(c.limit_seconds)) + " s");
    if (!o.pass) ++failures;
    std::printf("criterion %d: %s (%.2f s)%s\n", c.id, o.pass ? "PASS" : "FAIL", secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
