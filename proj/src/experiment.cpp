#include "helmdual/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "helmdual/error.hpp"
#include "helmdual/farfield.hpp"
#include "helmdual/field_io.hpp"
#include "helmdual/selftest.hpp"

namespace helmdual {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const char* status_name(DescentStatus s) {
  switch (s) {
    case DescentStatus::Converged: return "converged";
    case DescentStatus::Diverged: return "diverged";
    case DescentStatus::MaxIters: return "max_iters";
  }
  return "";
}

// Collects artifacts in memory; everything is written at the end by one writer.
class Artifacts {
 public:
  explicit Artifacts(std::string dir) : dir_(std::move(dir)) {}

  void text(const std::string& name, std::string content, const std::string& what) {
    files_.push_back({name, what, std::vector<unsigned char>(content.begin(), content.end())});
  }
  void field(const std::string& name, const Field& f, const std::string& what) {
    files_.push_back({name, what, write_field(f)});
  }

  void flush() const {
    fs::create_directories(dir_);
    std::ostringstream manifest;
    manifest << "file,description\n";
    for (const auto& f : files_) {
      const fs::path path = fs::path(dir_) / f.name;
      std::ofstream out(path, std::ios::binary);
      if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
      out.write(reinterpret_cast<const char*>(f.bytes.data()), static_cast<std::streamsize>(f.bytes.size()));
      manifest << f.name << "," << f.what << "\n";
    }
    std::ofstream out(fs::path(dir_) / "manifest.csv");
    if (!out) throw Error(ErrorKind::IoError, "cannot write manifest.csv");
    out << manifest.str();
  }

 private:
  struct File {
    std::string name;
    std::string what;
    std::vector<unsigned char> bytes;
  };
  std::string dir_;
  std::vector<File> files_;
};

std::string starts_csv(const std::vector<StartResult>& starts) {
  std::ostringstream o;
  o << "start,seed,status,iterations,level,dual_residual\n";
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const auto& s = starts[i];
    o << i << "," << s.seed << "," << status_name(s.status) << "," << s.iterations << "," << num(s.level) << ","
      << num(s.dual_residual) << "\n";
  }
  return o.str();
}

std::string energies_csv(const std::vector<StartResult>& starts) {
  std::ostringstream o;
  o << "start,step,energy\n";
  for (std::size_t i = 0; i < starts.size(); ++i)
    for (std::size_t k = 0; k < starts[i].energies.size(); ++k) o << i << "," << k << "," << num(starts[i].energies[k]) << "\n";
  return o.str();
}

std::string solutions_csv(const std::vector<SolutionRecord>& recs) {
  std::ostringstream o;
  o << "index,level,dual_residual,primal_residual,iterations,shift_1,shift_2,shift_3,sign\n";
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = recs[i];
    o << i << "," << num(r.level) << "," << num(r.dual_residual) << "," << num(r.primal_residual) << ","
      << r.iterations << "," << r.orbit_shift[0] << "," << r.orbit_shift[1] << "," << r.orbit_shift[2] << ","
      << r.sign << "\n";
  }
  return o.str();
}

int run_solve(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const FunctionalContext ctx(cfg.grid, cfg.p, build_coefficient(cfg));
  DescentConfig dc = cfg.descent;
  dc.rng_seed = cfg.seed;
  const MultistartResult res = multistart_search(ctx, dc);
  art.text("solutions.csv", solutions_csv(res.records), "distinct solutions sorted by level");
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    art.field("solution_" + std::to_string(i) + "_v.hlmf", res.records[i].v_star, "dual field of solution " + std::to_string(i));
    art.field("solution_" + std::to_string(i) + "_u.hlmf", res.records[i].u_star, "primal field of solution " + std::to_string(i));
  }
  art.text("starts.csv", starts_csv(res.starts), "outcome of every multistart run");
  art.text("energies.csv", energies_csv(res.starts), "energy after every accepted step");
  log << "level estimate " << num(res.level) << ", " << res.records.size() << " distinct of " << res.converged.size()
      << " converged starts\n";
  return 0;
}

int run_compare(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const Coefficient Q_inf = build_coefficient(cfg);
  const AsymptoticPair pair = build_asymptotic_coefficient(Q_inf, cfg.bump, cfg.p);
  DescentConfig dc = cfg.descent;
  dc.rng_seed = cfg.seed;
  const CompareReport rep = compare_levels(pair, cfg.p, dc);
  const bool order = rep.c_est <= rep.c_inf_est + 1e-3 * std::abs(rep.c_inf_est);
  std::ostringstream o;
  o << "c_est,c_inf_est,gap,transplant_check,transplant_defect,chain_Q,chain_inf_scaled,chain_inf,"
       "converged_Q,converged_inf,distinct_Q,distinct_inf,level_order\n"
    << num(rep.c_est) << "," << num(rep.c_inf_est) << "," << num(rep.gap) << ","
    << (rep.transplant_check ? "true" : "false") << "," << num(rep.transplant_defect) << "," << num(rep.chain_Q)
    << "," << num(rep.chain_inf_scaled) << "," << num(rep.chain_inf) << "," << rep.converged_Q << ","
    << rep.converged_inf << "," << rep.distinct_Q << "," << rep.distinct_inf << "," << (order ? "true" : "false")
    << "\n";
  art.text("compare.csv", o.str(), "level comparison and transplant chain");
  art.text("solutions_Q.csv", solutions_csv(rep.search_Q.records), "distinct solutions under Q");
  art.text("solutions_Q_inf.csv", solutions_csv(rep.search_inf.records), "distinct solutions under Q_inf");
  art.text("starts_Q.csv", starts_csv(rep.search_Q.starts), "multistart outcomes under Q");
  art.text("starts_Q_inf.csv", starts_csv(rep.search_inf.starts), "multistart outcomes under Q_inf");
  log << "c = " << num(rep.c_est) << ", c_inf = " << num(rep.c_inf_est) << ", gap = " << num(rep.gap)
      << ", transplant " << (rep.transplant_check ? "ok" : "FAILED") << "\n";
  return order && rep.transplant_check ? 0 : 1;
}

int run_farfield(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  const FunctionalContext ctx(cfg.grid, cfg.p, build_coefficient(cfg));
  const DescentOutcome out = descend(ctx, farfield_initial_field(ctx, cfg.seed), cfg.descent);
  if (out.status != DescentStatus::Converged)
    throw Error(out.status == DescentStatus::Diverged ? ErrorKind::Diverged : ErrorKind::MaxIters,
                "far-field solve did not converge, dual residual " + num(out.record.dual_residual));
  const SolutionRecord& rec = out.record;
  Point3 origin = cfg.bump.center;
  if (cfg.coefficient.kind != CoefficientKind::Bump)
    for (int d = 0; d < 3; ++d) origin[d] = d < cfg.grid.dimension ? 0.5 * cfg.grid.box_length : 0.0;
  const SphereSamples g =
      farfield_amplitude(ctx, rec.u_star, sphere_grid(cfg.grid.dimension, cfg.farfield.n_theta, cfg.farfield.n_phi, origin));
  FarfieldOptions opt;
  opt.inner_radius = cfg.bump.radius;
  opt.shell_width = cfg.farfield.shell_width;
  const FarfieldReport rep = decay_and_expansion_check(ctx, rec.u_star, g, opt);

  std::ostringstream amp, shells, expn, summary;
  amp << "xi_1,xi_2,xi_3,re_g,im_g\n";
  for (std::size_t i = 0; i < g.directions.size(); ++i)
    amp << num(g.directions[i][0]) << "," << num(g.directions[i][1]) << "," << num(g.directions[i][2]) << ","
        << num(g.values[i].real()) << "," << num(g.values[i].imag()) << "\n";
  shells << "r_lo,r_hi,shell_radius,mean_abs_u,count\n";
  for (const auto& s : rep.shells)
    shells << num(s.r_lo) << "," << num(s.r_hi) << "," << num(s.r_mean) << "," << num(s.mean_abs_u) << "," << s.count << "\n";
  expn << "R,expansion_error\n";
  for (const auto& e : rep.expansion) expn << num(e.R) << "," << num(e.error) << "\n";
  summary << "decay_exponent,raw_exponent,target_exponent,damping,exponent_in_window,tail_nonincreasing,monotone,"
             "level,dual_residual,iterations\n"
          << num(rep.decay_exponent) << "," << num(rep.raw_exponent) << "," << num(rep.target_exponent) << ","
          << num(rep.damping) << "," << (rep.exponent_in_window ? "true" : "false") << ","
          << (rep.tail_nonincreasing ? "true" : "false") << "," << (rep.monotone ? "true" : "false") << ","
          << num(rec.level) << "," << num(rec.dual_residual) << "," << rec.iterations << "\n";
  art.text("farfield_amplitude.csv", amp.str(), "far-field amplitude on the sphere grid");
  art.text("farfield_shells.csv", shells.str(), "shell radius and mean |u|");
  art.text("farfield_expansion.csv", expn.str(), "expansion error per radius");
  art.text("farfield_summary.csv", summary.str(), "decay fit and trend flags");
  art.field("farfield_u.hlmf", rec.u_star, "primal field of the far-field run");
  art.field("farfield_v.hlmf", rec.v_star, "dual field of the far-field run");
  log << "decay exponent " << num(rep.decay_exponent) << " (raw " << num(rep.raw_exponent) << "), expansion tail "
      << (rep.tail_nonincreasing ? "non-increasing" : "increasing") << "\n";
  return rep.exponent_in_window && rep.tail_nonincreasing ? 0 : 1;
}

int run_selftest_mode(const RunConfig& cfg, Artifacts& art, std::ostream& log) {
  SelftestOptions opt;
  opt.seed = cfg.seed;
  const auto results = run_selftest(opt, [&](const CheckResult& r) {
    log << (r.pass ? "PASS" : "FAIL") << " [" << r.criterion << "] " << r.name << ": " << r.detail << "\n";
    log.flush();
  });
  std::ostringstream o;
  o << "criterion,name,pass,seconds,detail\n";
  bool all = true;
  for (const auto& r : results) {
    std::string detail = r.detail;
    for (char& c : detail)
      if (c == ',') c = ';';
    o << r.criterion << "," << r.name << "," << (r.pass ? "true" : "false") << "," << num(r.seconds) << "," << detail
      << "\n";
    all = all && r.pass;
  }
  art.text("selftest.csv", o.str(), "pass/fail of every invariant suite");
  return all ? 0 : 1;
}

}  // namespace

void write_error_record(const std::string& dir, const std::string& kind, const std::string& message) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  nlohmann::json j = {{"status", "error"}, {"kind", kind}, {"message", message}};
  std::ofstream out(fs::path(dir) / "error.json");
  out << j.dump(2) << "\n";
}

int run_experiment(const RunConfig& cfg, std::ostream& log) {
  Artifacts art(cfg.output);
  art.text("config.effective", serialize_config(cfg), "effective configuration");
  try {
    int code = 0;
    if (cfg.mode == "solve") code = run_solve(cfg, art, log);
    else if (cfg.mode == "compare") code = run_compare(cfg, art, log);
    else if (cfg.mode == "farfield") code = run_farfield(cfg, art, log);
    else if (cfg.mode == "selftest") code = run_selftest_mode(cfg, art, log);
    else throw Error(ErrorKind::InvalidArgument, "unknown mode " + cfg.mode);
    art.flush();
    return code;
  } catch (const Error& e) {
    write_error_record(cfg.output, std::string(to_string(e.kind())), e.what());
    log << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace helmdual
