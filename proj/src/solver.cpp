#include "fpl/solver.hpp"

#include <openssl/sha.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fpl/binary_io.hpp"
#include "fpl/time_integrator.hpp"

namespace fpl {

namespace {

constexpr char kCheckpointMagic[6] = {'F', 'P', 'L', 'D', 'G', '1'};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    throw std::invalid_argument("config: " + key + ": expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("config: " + key + ": expected an integer, got '" + v + "'");
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_time(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

const char* name(SchemeKind s) { return s == SchemeKind::upwind ? "upwind" : "symmetric"; }
const char* name(KineticModel m) { return m == KineticModel::nonrelativistic ? "nonrelativistic" : "relativistic"; }
const char* name(CoefficientPath c) { return c == CoefficientPath::convolution ? "convolution" : "direct"; }
const char* name(InitialCondition ic) {
  switch (ic) {
    case InitialCondition::two_gaussian: return "two_gaussian";
    case InitialCondition::maxwellian: return "maxwellian";
    case InitialCondition::file: return "file";
  }
  return "";
}

// Writes each line to the caller's stream and the run log.
class RunLog {
 public:
  RunLog(std::ostream* out, const std::filesystem::path& file) : out_(out), file_(file, std::ios::app) {}
  void line(const std::string& s) {
    if (out_) *out_ << s << '\n';
    if (file_) file_ << s << '\n';
  }

 private:
  std::ostream* out_;
  std::ofstream file_;
};

}  // namespace

// --- configuration -----------------------------------------------------------

void RunConfig::validate() const {
  if (!(half_width > 0.0)) throw std::invalid_argument("config: half_width must be positive");
  if (n < 1) throw std::invalid_argument("config: n must be >= 1");
  if (degree < 0) throw std::invalid_argument("config: degree must be >= 0");
  kernel.validate();
  if (scheme == SchemeKind::upwind && degree < 2)
    throw std::invalid_argument("config: degree must be >= 2 for scheme = upwind");
  if (dt && !(*dt > 0.0)) throw std::invalid_argument("config: dt must be positive or 'auto'");
  if (!(t_end > 0.0)) throw std::invalid_argument("config: t_end must be positive");
  if (dt && t_end < *dt) throw std::invalid_argument("config: t_end must be >= dt");
  if (initial_condition == InitialCondition::maxwellian &&
      (!(maxwellian.density > 0.0) || !(maxwellian.temperature > 0.0)))
    throw std::invalid_argument("config: maxwellian density and temperature must be positive");
  if (initial_condition == InitialCondition::file && initial_file.empty())
    throw std::invalid_argument("config: initial_file is required for initial_condition = file");
  if (output_every < 1) throw std::invalid_argument("config: output_every must be >= 1");
  if (checkpoint_every < 0) throw std::invalid_argument("config: checkpoint_every must be >= 0");
  if (snapshot_samples < 1) throw std::invalid_argument("config: snapshot_samples must be >= 1");
  if (quad_order != -1 && quad_order < degree + 1)
    throw std::invalid_argument("config: quad_order must be >= degree + 1");
  if (table_quad_order != -1 && table_quad_order < degree + 1)
    throw std::invalid_argument("config: table_quad_order must be >= degree + 1");
  for (double t : snapshot_times)
    if (t < 0.0) throw std::invalid_argument("config: snapshot_times must be non-negative");
  if (kernel.model == KineticModel::relativistic && coefficients == CoefficientPath::convolution)
    throw std::invalid_argument("config: the convolution path supports model = nonrelativistic only");
  if (!convolution_cache.empty() && (kernel.model != KineticModel::nonrelativistic ||
                                     coefficients != CoefficientPath::convolution))
    throw std::invalid_argument("config: convolution_cache requires model = nonrelativistic and coefficients = convolution");
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  const int qo = quad_order < 0 ? degree + 2 : quad_order;
  std::vector<std::pair<std::string, std::string>> kv = {
      {"half_width", format_double(half_width)},
      {"n", std::to_string(n)},
      {"degree", std::to_string(degree)},
      {"model", name(kernel.model)},
      {"gamma", format_double(kernel.gamma)},
      {"scheme", name(scheme)},
      {"dt", dt ? format_double(*dt) : "auto"},
      {"t_end", format_double(t_end)},
      {"initial_condition", name(initial_condition)},
  };
  if (initial_condition == InitialCondition::maxwellian) {
    kv.emplace_back("density", format_double(maxwellian.density));
    kv.emplace_back("bulk_velocity", format_double(maxwellian.velocity[0]) + "," +
                                         format_double(maxwellian.velocity[1]) + "," +
                                         format_double(maxwellian.velocity[2]));
    kv.emplace_back("temperature", format_double(maxwellian.temperature));
  }
  if (initial_condition == InitialCondition::file) kv.emplace_back("initial_file", initial_file.string());
  std::string times;
  for (std::size_t i = 0; i < snapshot_times.size(); ++i) times += (i ? "," : "") + format_double(snapshot_times[i]);
  kv.insert(kv.end(), {{"output_dir", output_dir.string()},
                       {"output_every", std::to_string(output_every)},
                       {"checkpoint_every", std::to_string(checkpoint_every)},
                       {"snapshot_times", times},
                       {"snapshot_samples", std::to_string(snapshot_samples)},
                       {"quad_order", std::to_string(qo)},
                       {"table_quad_order", std::to_string(table_quad_order < 0 ? qo : table_quad_order)},
                       {"coefficients", name(coefficients)},
                       {"convolution_cache", convolution_cache.string()}});
  return kv;
}

RunConfig parse_config(std::istream& in) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string v = trim(line.substr(eq + 1));

    if (key == "half_width") cfg.half_width = parse_double(key, v);
    else if (key == "n") cfg.n = parse_int(key, v);
    else if (key == "degree") cfg.degree = parse_int(key, v);
    else if (key == "model") {
      if (v == "nonrelativistic") cfg.kernel.model = KineticModel::nonrelativistic;
      else if (v == "relativistic") cfg.kernel.model = KineticModel::relativistic;
      else throw std::invalid_argument("config: model: expected nonrelativistic|relativistic");
    } else if (key == "gamma") cfg.kernel.gamma = parse_double(key, v);
    else if (key == "scheme") {
      if (v == "upwind") cfg.scheme = SchemeKind::upwind;
      else if (v == "symmetric") cfg.scheme = SchemeKind::symmetric;
      else throw std::invalid_argument("config: scheme: expected upwind|symmetric");
    } else if (key == "dt") {
      if (v == "auto") cfg.dt.reset();
      else cfg.dt = parse_double(key, v);
    } else if (key == "t_end") cfg.t_end = parse_double(key, v);
    else if (key == "initial_condition") {
      if (v == "two_gaussian") cfg.initial_condition = InitialCondition::two_gaussian;
      else if (v == "maxwellian") cfg.initial_condition = InitialCondition::maxwellian;
      else if (v == "file") cfg.initial_condition = InitialCondition::file;
      else throw std::invalid_argument("config: initial_condition: expected two_gaussian|maxwellian|file");
    } else if (key == "density") cfg.maxwellian.density = parse_double(key, v);
    else if (key == "bulk_velocity") {
      const auto u = parse_list(key, v);
      if (u.size() != 3) throw std::invalid_argument("config: bulk_velocity: expected three components");
      cfg.maxwellian.velocity = Vec3(u[0], u[1], u[2]);
    } else if (key == "temperature") cfg.maxwellian.temperature = parse_double(key, v);
    else if (key == "initial_file") cfg.initial_file = v;
    else if (key == "output_dir") cfg.output_dir = v;
    else if (key == "output_every") cfg.output_every = parse_int(key, v);
    else if (key == "checkpoint_every") cfg.checkpoint_every = parse_int(key, v);
    else if (key == "snapshot_times") cfg.snapshot_times = parse_list(key, v);
    else if (key == "snapshot_samples") cfg.snapshot_samples = parse_int(key, v);
    else if (key == "quad_order") cfg.quad_order = parse_int(key, v);
    else if (key == "table_quad_order") cfg.table_quad_order = parse_int(key, v);
    else if (key == "coefficients") {
      if (v == "convolution") cfg.coefficients = CoefficientPath::convolution;
      else if (v == "direct") cfg.coefficients = CoefficientPath::direct;
      else throw std::invalid_argument("config: coefficients: expected convolution|direct");
    } else if (key == "convolution_cache") cfg.convolution_cache = v;
    else throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  RunConfig cfg = parse_config(in);
  // Relative paths in the config are relative to the config file.
  const auto base = path.parent_path();
  auto rebase = [&](std::filesystem::path& p) {
    if (!p.empty() && p.is_relative()) p = base / p;
  };
  rebase(cfg.initial_file);
  rebase(cfg.output_dir);
  rebase(cfg.convolution_cache);
  return cfg;
}

std::string content_hash(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + '\0' + bytes;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream os;
  for (unsigned char c : digest) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
  return os.str();
}

// --- checkpoints ---------------------------------------------------------------

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.n));
  io::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(c.degree));
  io::write_le(os, c.half_width);
  io::write_le(os, c.t);
  io::write_le<std::uint64_t>(os, c.step);
  io::write_doubles(os, c.coeffs.data(), static_cast<std::size_t>(c.coeffs.size()));
  if (!os) throw std::runtime_error("write failed for checkpoint " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  char magic[sizeof kCheckpointMagic];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw std::runtime_error(path.string() + ": not a checkpoint file");
  Checkpoint c;
  c.n = static_cast<int>(io::read_le<std::uint32_t>(is));
  c.degree = static_cast<int>(io::read_le<std::uint32_t>(is));
  c.half_width = io::read_le<double>(is);
  c.t = io::read_le<double>(is);
  c.step = io::read_le<std::uint64_t>(is);
  const int nb = (c.degree + 1) * (c.degree + 1) * (c.degree + 1);
  c.coeffs.resize(static_cast<Eigen::Index>(c.n) * c.n * c.n, nb);
  io::read_doubles(is, c.coeffs.data(), static_cast<std::size_t>(c.coeffs.size()));
  return c;
}

// --- initial data and output ---------------------------------------------------

double two_gaussian(const Vec3& p) {
  const double r2 = p[1] * p[1] + p[2] * p[2];
  return std::exp(-((p[0] - 1.0) * (p[0] - 1.0) + r2)) + std::exp(-((p[0] + 1.0) * (p[0] + 1.0) + r2));
}

PlaneSamples sample_pz0(const DgField& f, int samples) {
  const CartesianMesh& mesh = f.space().mesh();
  const int n = mesh.cells();
  const double L = mesh.half_width();
  const double h = mesh.width();
  const int m = n * samples;

  PlaneSamples s;
  s.px.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) s.px[static_cast<std::size_t>(i)] = -L + (i + 0.5) * h / samples;
  s.py = s.px;
  s.values.resize(m, m);

  // Elements and reference coordinates cut by p_z = 0.
  std::vector<std::pair<int, double>> cuts;
  if (n % 2 == 0) cuts = {{n / 2 - 1, 1.0}, {n / 2, -1.0}};
  else cuts = {{n / 2, 0.0}};

  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const int ei = i / samples, ej = j / samples;
      const double xi = -1.0 + (2.0 * (i % samples) + 1.0) / samples;
      const double eta = -1.0 + (2.0 * (j % samples) + 1.0) / samples;
      double v = 0.0;
      for (const auto& [ek, zeta] : cuts) v += evaluate(f, mesh.element_id({ei, ej, ek}), Vec3(xi, eta, zeta));
      s.values(j, i) = v / static_cast<double>(cuts.size());
    }
  return s;
}

void write_moments_header(std::ostream& os) { os << "t,mass,px,py,pz,energy,entropy,l2\n"; }

void write_moments_row(std::ostream& os, const MomentRecord& r) {
  os << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.momentum[0]) << ','
     << format_double(r.momentum[1]) << ',' << format_double(r.momentum[2]) << ',' << format_double(r.energy) << ','
     << format_double(r.entropy) << ',' << format_double(r.l2) << '\n';
}

void write_snapshot(const std::filesystem::path& path, const PlaneSamples& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write snapshot " + path.string());
  os << "px,py,f\n";
  for (Eigen::Index j = 0; j < s.values.rows(); ++j)
    for (Eigen::Index i = 0; i < s.values.cols(); ++i)
      os << format_double(s.px[static_cast<std::size_t>(i)]) << ',' << format_double(s.py[static_cast<std::size_t>(j)])
         << ',' << format_double(s.values(j, i)) << '\n';
}

// --- orchestration -------------------------------------------------------------

double auto_time_step(double h, int degree, double max_diffusion) {
  const double p = degree + 1.0;
  return 0.5 * h * h / (p * p * p * p * max_diffusion);
}

std::shared_ptr<const CoefficientSource> make_coefficient_source(const RunConfig& cfg, const SpacePtr& space,
                                                                 std::ostream* log) {
  if (cfg.coefficients == CoefficientPath::direct) {
    auto energy = std::make_shared<const EnergyField>(space, cfg.kernel.model);
    return std::make_shared<DirectCoefficients>(space, cfg.kernel, energy);
  }
  std::shared_ptr<const ConvolutionTable> table;
  if (cfg.convolution_cache.empty()) {
    table = std::make_shared<const ConvolutionTable>(space, cfg.kernel, cfg.table_quad_order);
  } else {
    bool loaded = false;
    table = std::make_shared<const ConvolutionTable>(
        ConvolutionTable::load_or_compute(cfg.convolution_cache, space, cfg.kernel, cfg.table_quad_order, &loaded));
    if (log)
      *log << (loaded ? "loaded convolution table from " : "computed convolution table into ")
           << cfg.convolution_cache.string() << '\n';
  }
  if (log) *log << "convolution table: " << table->memory_bytes() << " bytes\n";
  return std::make_shared<ConvolutionCoefficients>(table);
}

void precompute(const RunConfig& cfg, std::ostream* log) {
  cfg.validate();
  if (cfg.coefficients != CoefficientPath::convolution)
    throw std::invalid_argument("precompute: coefficients = convolution is required");
  const SpacePtr space = make_space(cfg.half_width, cfg.n, cfg.degree, cfg.quad_order);
  make_coefficient_source(cfg, space, log);
}

RunResult run(const RunConfig& cfg, const std::optional<Checkpoint>& resume, std::ostream* log,
              const ProgressFn& progress) {
  cfg.validate();
  std::filesystem::create_directories(cfg.output_dir);
  RunLog rlog(log, cfg.output_dir / "run.log");

  std::string config_text;
  for (const auto& [k, v] : cfg.resolved()) config_text += k + " = " + v + "\n";
  RunResult result;
  result.config_hash = content_hash(config_text);
  rlog.line("config " + result.config_hash);

  const SpacePtr space = make_space(cfg.half_width, cfg.n, cfg.degree, cfg.quad_order);
  std::ostringstream source_log;
  const auto source = make_coefficient_source(cfg, space, &source_log);
  std::istringstream source_lines(source_log.str());
  for (std::string l; std::getline(source_lines, l);) rlog.line(l);
  const LdgOperator op(source, cfg.scheme);

  // Initial state.
  DgField f(space);
  double t0 = 0.0;
  std::uint64_t step0 = 0;
  auto from_checkpoint = [&](const Checkpoint& c, const std::string& what) {
    if (c.n != cfg.n || c.degree != cfg.degree || c.half_width != cfg.half_width)
      throw std::invalid_argument(what + ": mesh/degree does not match the config");
    f = DgField(space, c.coeffs);
  };
  if (resume) {
    from_checkpoint(*resume, "resume checkpoint");
    t0 = resume->t;
    step0 = resume->step;
  } else if (cfg.initial_condition == InitialCondition::two_gaussian) {
    f = l2_project(two_gaussian, space);
  } else if (cfg.initial_condition == InitialCondition::maxwellian) {
    f = l2_project(cfg.maxwellian, space);
  } else {
    from_checkpoint(read_checkpoint(cfg.initial_file), "initial_file");
  }

  const Invariants inv = collision_invariants(space, cfg.kernel.model);
  const Invariants inv_nr = collision_invariants(space, KineticModel::nonrelativistic);
  const Moments m0 = moments(f, inv_nr);
  const MaxwellianSpec equilibrium = maxwellian_from_moments(m0.mass, m0.momentum, m0.energy);

  // Time step.
  double dt = 0.0;
  std::string dt_source;
  {
    const CoefficientFields c = source->evaluate(f, discrete_gradient(f));
    const double dmax = max_diffusion_norm(c);
    const double eig_ratio = min_diffusion_eigenvalue_ratio(c);
    if (eig_ratio < -1e-12) {
      std::ostringstream os;
      os << "warning: D_h is not positive semidefinite (min eigenvalue / max = " << eig_ratio << ")";
      rlog.line(os.str());
    }
    if (cfg.dt) {
      dt = *cfg.dt;
      dt_source = "user";
    } else {
      if (!(dmax > 0.0)) throw std::invalid_argument("dt = auto needs a non-zero diffusion tensor at t = 0");
      dt = auto_time_step(space->mesh().width(), cfg.degree, dmax);
      dt_source = "auto: 0.5 h^2 / ((k+1)^4 max|D_h|) at t = 0 (heuristic)";
    }
    rlog.line("dt = " + format_double(dt) + " (" + dt_source + "), max|D_h| = " + format_double(dmax));
  }
  if (t0 >= cfg.t_end) throw std::invalid_argument("start time is already at or past t_end");
  const std::uint64_t remaining = static_cast<std::uint64_t>(std::ceil((cfg.t_end - t0) / dt - 1e-9));
  const std::uint64_t last = step0 + remaining;

  // Snapshot targets are written at the step nearest to each time.
  std::map<std::uint64_t, std::vector<double>> snapshots;
  for (double target : cfg.snapshot_times) {
    if (target < t0 - 1e-12 || target > cfg.t_end + 0.5 * dt) {
      rlog.line("snapshot time " + format_time(target) + " is outside the run interval; skipped");
      continue;
    }
    const double k = std::round((target - t0) / dt);
    snapshots[std::min(last, step0 + static_cast<std::uint64_t>(std::max(0.0, k)))].push_back(target);
  }

  std::ofstream moments_csv(cfg.output_dir / "moments.csv", resume ? std::ios::app : std::ios::trunc);
  if (!moments_csv) throw std::runtime_error("cannot write moments.csv in " + cfg.output_dir.string());
  if (!resume) write_moments_header(moments_csv);

  auto record = [&](double t) {
    const Moments m = moments(f, inv);
    MomentRecord r{t, m.mass, m.momentum, m.energy, relative_entropy(f, equilibrium), l2_norm(f)};
    result.records.push_back(r);
    return r;
  };
  auto emit = [&](double t, std::uint64_t step, bool row) {
    if (row) {
      const MomentRecord r = record(t);
      write_moments_row(moments_csv, r);
      moments_csv.flush();
      if (progress) progress(r, step);
    }
    if (const auto it = snapshots.find(step); it != snapshots.end())
      for (double target : it->second)
        write_snapshot(cfg.output_dir / ("snapshot_" + format_time(target) + ".csv"),
                       sample_pz0(f, cfg.snapshot_samples));
  };
  auto checkpoint = [&](double t, std::uint64_t step) {
    write_checkpoint(cfg.output_dir / ("checkpoint_" + std::to_string(step) + ".bin"),
                     Checkpoint{cfg.n, cfg.degree, cfg.half_width, t, step, f.coeffs()});
  };

  if (!resume) emit(t0, step0, true);
  else emit(t0, step0, false);

  double t = t0;
  for (std::uint64_t step = step0 + 1; step <= last; ++step) {
    const double t_next = step == last ? cfg.t_end : t0 + static_cast<double>(step - step0) * dt;
    const auto rhs = [&](const DgField& g) {
      DgField r = op.rhs(g);
      ensure_finite(r, static_cast<long>(step));
      return r;
    };
    f = rk3_step(f, t_next - t, rhs, static_cast<long>(step));
    t = t_next;
    emit(t, step, (step - step0) % static_cast<std::uint64_t>(cfg.output_every) == 0 || step == last);
    if (cfg.checkpoint_every > 0 && step % static_cast<std::uint64_t>(cfg.checkpoint_every) == 0 && step != last)
      checkpoint(t, step);
  }
  checkpoint(t, last);
  rlog.line("finished " + std::to_string(remaining) + " steps at t = " + format_double(t));

  nlohmann::ordered_json meta;
  nlohmann::ordered_json resolved;
  for (const auto& [k, v] : cfg.resolved()) resolved[k] = v;
  meta["config"] = resolved;
  meta["config_hash"] = result.config_hash;
  meta["dt"] = dt;
  meta["dt_source"] = dt_source;
  meta["start_step"] = step0;
  meta["steps"] = remaining;
  meta["t_start"] = t0;
  meta["t_final"] = t;
  meta["equilibrium"] = {{"density", equilibrium.density},
                         {"bulk_velocity", {equilibrium.velocity[0], equilibrium.velocity[1], equilibrium.velocity[2]}},
                         {"temperature", equilibrium.temperature}};
  std::ofstream(cfg.output_dir / "run.json") << meta.dump(2) << '\n';

  result.final_state = f;
  result.dt = dt;
  result.steps = remaining;
  return result;
}

}  // namespace fpl
