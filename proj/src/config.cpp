#include "helmdual/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "helmdual/error.hpp"
#include "helmdual/field_io.hpp"

namespace helmdual {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(const std::string& key, int line) {
  return "key '" + key + "' (line " + std::to_string(line) + ")";
}

double to_double(const std::string& key, const std::string& v, int line) {
  const char* b = v.c_str();
  char* end = nullptr;
  const double x = std::strtod(b, &end);
  if (v.empty() || end != b + v.size())
    throw Error(ErrorKind::TypeError, where(key, line) + ": expected a number, got '" + v + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& v, int line) {
  long long x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorKind::TypeError, where(key, line) + ": expected an integer, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& key, const std::string& v, int line) {
  std::uint64_t x = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
    throw Error(ErrorKind::TypeError, where(key, line) + ": expected a nonnegative integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw Error(ErrorKind::TypeError, where(key, line) + ": expected true or false, got '" + v + "'");
}

Point3 to_point(const std::string& key, const std::string& v, int line) {
  Point3 p{0.0, 0.0, 0.0};
  std::stringstream ss(v);
  std::string item;
  int d = 0;
  while (std::getline(ss, item, ',')) {
    if (d >= 3) throw Error(ErrorKind::TypeError, where(key, line) + ": at most 3 components");
    p[d++] = to_double(key, trim(item), line);
  }
  if (d == 0) throw Error(ErrorKind::TypeError, where(key, line) + ": expected a comma-separated point");
  return p;
}

CoefficientKind to_kind(const std::string& key, const std::string& v, int line) {
  if (v == "periodic_sine") return CoefficientKind::PeriodicSine;
  if (v == "constant") return CoefficientKind::Constant;
  if (v == "bump") return CoefficientKind::Bump;
  if (v == "file") return CoefficientKind::File;
  throw Error(ErrorKind::TypeError,
              where(key, line) + ": expected periodic_sine, constant, bump or file, got '" + v + "'");
}

const char* kind_name(CoefficientKind k) {
  switch (k) {
    case CoefficientKind::PeriodicSine: return "periodic_sine";
    case CoefficientKind::Constant: return "constant";
    case CoefficientKind::Bump: return "bump";
    case CoefficientKind::File: return "file";
  }
  return "";
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value, int line)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"mode", [](RunConfig& c, auto&, auto& v, int) { c.mode = v; }},
      {"grid.N", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.dimension = static_cast<int>(to_int(k, v, l)); }},
      {"grid.L", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.box_length = to_double(k, v, l); }},
      {"grid.n",
       [](RunConfig& c, auto& k, auto& v, int l) { c.grid.points_per_axis = static_cast<int>(to_int(k, v, l)); }},
      {"grid.epsilon", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.shell_epsilon = to_double(k, v, l); }},
      {"p", [](RunConfig& c, auto& k, auto& v, int l) { c.p = to_double(k, v, l); }},
      {"coefficient", [](RunConfig& c, auto& k, auto& v, int l) { c.coefficient.kind = to_kind(k, v, l); }},
      {"coefficient.base", [](RunConfig& c, auto& k, auto& v, int l) { c.coefficient.base = to_double(k, v, l); }},
      {"coefficient.amplitude",
       [](RunConfig& c, auto& k, auto& v, int l) { c.coefficient.amplitude = to_double(k, v, l); }},
      {"coefficient.file", [](RunConfig& c, auto&, auto& v, int) { c.coefficient.file = v; }},
      {"coefficient.periodic",
       [](RunConfig& c, auto& k, auto& v, int l) { c.coefficient.periodic = to_bool(k, v, l); }},
      {"bump.center", [](RunConfig& c, auto& k, auto& v, int l) { c.bump.center = to_point(k, v, l); }},
      {"bump.radius", [](RunConfig& c, auto& k, auto& v, int l) { c.bump.radius = to_double(k, v, l); }},
      {"bump.amplitude", [](RunConfig& c, auto& k, auto& v, int l) { c.bump.amplitude = to_double(k, v, l); }},
      {"descent.tol_residual",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.tol_residual = to_double(k, v, l); }},
      {"descent.max_iters",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.max_iters = static_cast<int>(to_int(k, v, l)); }},
      {"descent.armijo_c", [](RunConfig& c, auto& k, auto& v, int l) { c.descent.armijo_c = to_double(k, v, l); }},
      {"descent.armijo_shrink",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.armijo_shrink = to_double(k, v, l); }},
      {"descent.step_init", [](RunConfig& c, auto& k, auto& v, int l) { c.descent.step_init = to_double(k, v, l); }},
      {"descent.dedup_rel_threshold",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.dedup_rel_threshold = to_double(k, v, l); }},
      {"descent.multistart_count",
       [](RunConfig& c, auto& k, auto& v, int l) {
         c.descent.multistart_count = static_cast<int>(to_int(k, v, l));
       }},
      {"descent.divergence_floor",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.divergence_floor = to_double(k, v, l); }},
      {"descent.newton_switch",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.newton_switch = to_double(k, v, l); }},
      {"descent.lanczos_steps",
       [](RunConfig& c, auto& k, auto& v, int l) { c.descent.lanczos_steps = static_cast<int>(to_int(k, v, l)); }},
      {"seed", [](RunConfig& c, auto& k, auto& v, int l) { c.seed = to_uint(k, v, l); }},
      {"output", [](RunConfig& c, auto&, auto& v, int) { c.output = v; }},
      {"farfield.n_theta",
       [](RunConfig& c, auto& k, auto& v, int l) { c.farfield.n_theta = static_cast<int>(to_int(k, v, l)); }},
      {"farfield.n_phi",
       [](RunConfig& c, auto& k, auto& v, int l) { c.farfield.n_phi = static_cast<int>(to_int(k, v, l)); }},
      {"farfield.shell_width",
       [](RunConfig& c, auto& k, auto& v, int l) { c.farfield.shell_width = to_double(k, v, l); }},
  };
  return table;
}

struct Line {
  int number;
  std::string key;
  std::string value;
};

}  // namespace

RunConfig default_config(const std::string& mode) {
  RunConfig c;
  c.mode = mode;
  if (mode == "farfield") {
    c.grid = GridSpec{3, 40.0, 64, 0.3};
    c.p = 5.0;
    c.coefficient.kind = CoefficientKind::Bump;
    c.bump = BumpDescriptor{{20.0, 20.0, 20.0}, 2.0, 1.0};
    c.descent.tol_residual = 1e-9;
    c.descent.multistart_count = 1;
  } else {
    c.grid = GridSpec{2, 6.0, 96, 0.0};
    c.bump = BumpDescriptor{{3.0, 3.0, 0.0}, 1.0, 0.3};
  }
  return c;
}

RunConfig parse_config(const std::string& text, const std::optional<std::string>& mode_override) {
  std::vector<Line> lines;
  std::istringstream in(text);
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::TypeError, "line " + std::to_string(number) + ": expected 'key = value'");
    Line l{number, trim(s.substr(0, eq)), trim(s.substr(eq + 1))};
    if (!setters().contains(l.key)) throw Error(ErrorKind::UnknownKey, where(l.key, number));
    lines.push_back(std::move(l));
  }

  std::optional<std::string> mode = mode_override;
  for (const Line& l : lines)
    if (l.key == "mode" && !mode) mode = l.value;
  if (!mode) throw Error(ErrorKind::MissingRequired, "key 'mode' (line 0): required, or give a subcommand");
  if (*mode != "solve" && *mode != "compare" && *mode != "farfield" && *mode != "selftest")
    throw Error(ErrorKind::TypeError, "key 'mode': expected solve, compare, farfield or selftest, got '" + *mode + "'");

  RunConfig cfg = default_config(*mode);
  for (const Line& l : lines)
    if (l.key != "mode") setters().at(l.key)(cfg, l.key, l.value, l.number);

  auto line_of = [&](const std::string& key) {
    for (const Line& l : lines)
      if (l.key == key) return l.number;
    return 0;
  };
  auto check = [&](bool ok, const std::string& key, const std::string& msg) {
    if (!ok) throw Error(ErrorKind::TypeError, where(key, line_of(key)) + ": " + msg);
  };
  try {
    cfg.grid.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::TypeError, std::string("grid: ") + e.what());
  }
  try {
    Exponents::make(cfg.grid.dimension, cfg.p);
  } catch (const Error& e) {
    throw Error(ErrorKind::TypeError, where("p", line_of("p")) + ": " + e.what());
  }
  try {
    cfg.descent.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::TypeError, std::string("descent: ") + e.what());
  }
  check(cfg.bump.radius > 0.0, "bump.radius", "must be positive");
  check(cfg.bump.amplitude >= 0.0, "bump.amplitude", "must be >= 0");
  check(cfg.farfield.n_theta >= 1, "farfield.n_theta", "must be >= 1");
  check(cfg.farfield.n_phi >= 2 && cfg.farfield.n_phi % 2 == 0, "farfield.n_phi", "must be even and >= 2");
  check(cfg.farfield.shell_width > 0.0, "farfield.shell_width", "must be positive");
  check(!cfg.output.empty(), "output", "must not be empty");
  if (cfg.coefficient.kind == CoefficientKind::File && cfg.coefficient.file.empty())
    throw Error(ErrorKind::MissingRequired, "key 'coefficient.file' (line " +
                                                std::to_string(line_of("coefficient")) +
                                                "): required when coefficient = file");
  return cfg;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream o;
  const auto& d = c.descent;
  o << "mode = " << c.mode << "\n"
    << "grid.N = " << c.grid.dimension << "\n"
    << "grid.L = " << num(c.grid.box_length) << "\n"
    << "grid.n = " << c.grid.points_per_axis << "\n"
    << "grid.epsilon = " << num(c.grid.shell_epsilon) << "\n"
    << "p = " << num(c.p) << "\n"
    << "coefficient = " << kind_name(c.coefficient.kind) << "\n"
    << "coefficient.base = " << num(c.coefficient.base) << "\n"
    << "coefficient.amplitude = " << num(c.coefficient.amplitude) << "\n";
  if (!c.coefficient.file.empty()) o << "coefficient.file = " << c.coefficient.file << "\n";
  o << "coefficient.periodic = " << (c.coefficient.periodic ? "true" : "false") << "\n"
    << "bump.center = " << num(c.bump.center[0]) << ", " << num(c.bump.center[1]) << ", " << num(c.bump.center[2])
    << "\n"
    << "bump.radius = " << num(c.bump.radius) << "\n"
    << "bump.amplitude = " << num(c.bump.amplitude) << "\n"
    << "descent.tol_residual = " << num(d.tol_residual) << "\n"
    << "descent.max_iters = " << d.max_iters << "\n"
    << "descent.armijo_c = " << num(d.armijo_c) << "\n"
    << "descent.armijo_shrink = " << num(d.armijo_shrink) << "\n"
    << "descent.step_init = " << num(d.step_init) << "\n"
    << "descent.dedup_rel_threshold = " << num(d.dedup_rel_threshold) << "\n"
    << "descent.multistart_count = " << d.multistart_count << "\n"
    << "descent.divergence_floor = " << num(d.divergence_floor) << "\n"
    << "descent.newton_switch = " << num(d.newton_switch) << "\n"
    << "descent.lanczos_steps = " << d.lanczos_steps << "\n"
    << "seed = " << c.seed << "\n"
    << "output = " << c.output << "\n"
    << "farfield.n_theta = " << c.farfield.n_theta << "\n"
    << "farfield.n_phi = " << c.farfield.n_phi << "\n"
    << "farfield.shell_width = " << num(c.farfield.shell_width) << "\n";
  return o.str();
}

Coefficient build_coefficient(const RunConfig& cfg) {
  const GridSpec& g = cfg.grid;
  const auto& spec = cfg.coefficient;
  switch (spec.kind) {
    case CoefficientKind::Bump:
      return Coefficient::make(sample_bump(g, cfg.bump), cfg.p, false);
    case CoefficientKind::File: {
      const Field Q = read_field_file(spec.file);
      if (Q.grid().dimension != g.dimension || Q.grid().points_per_axis != g.points_per_axis ||
          Q.grid().box_length != g.box_length)
        throw Error(ErrorKind::GridMismatch, "coefficient file " + spec.file + " does not match the grid");
      return Coefficient::make(Field(g, Q.data()), cfg.p, spec.periodic);
    }
    case CoefficientKind::Constant:
    case CoefficientKind::PeriodicSine: {
      const double L = g.box_length;
      if (L != std::round(L) || g.points_per_axis % static_cast<int>(L) != 0)
        throw Error(ErrorKind::InvalidArgument, "periodic coefficients need integer L dividing grid.n");
      const int step = g.points_per_axis / static_cast<int>(L);
      const double h = g.spacing();
      Field Q(g);
      for (std::size_t i = 0; i < Q.size(); ++i) {
        const Index3 idx = unravel(g, i);
        double s = 1.0;
        for (int d = 0; d < std::min(g.dimension, 2); ++d)
          s *= std::sin(2.0 * std::numbers::pi * (idx[d] % step) * h);
        Q[i] = spec.base + (spec.kind == CoefficientKind::PeriodicSine ? spec.amplitude * s : 0.0);
      }
      return Coefficient::make(std::move(Q), cfg.p, true);
    }
  }
  throw Error(ErrorKind::InvalidArgument, "unknown coefficient kind");
}

}  // namespace helmdual
