#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fpl/solver.hpp"
#include "oracles.hpp"

using namespace fpl;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fpl_test_" + name);
  fs::remove_all(p);
  return p;
}

RunConfig small_run(const fs::path& out) {
  RunConfig c = parse(
      "half_width = 4\n n = 2\n degree = 2\n scheme = upwind\n dt = 0.0005\n t_end = 0.005\n"
      "initial_condition = maxwellian\n snapshot_times = 0, 0.002, 0.005\n snapshot_samples = 2\n"
      "checkpoint_every = 4\n");
  c.output_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d = parse("# defaults only\n\n");
  CHECK(d.n == 4);
  CHECK(d.degree == 2);
  CHECK_FALSE(d.dt.has_value());
  CHECK(d.scheme == SchemeKind::upwind);

  const RunConfig c = parse(
      "half_width = 3.5\nn = 3  # cells\ndegree=3\nmodel = nonrelativistic\ngamma = 1\nscheme = symmetric\n"
      "dt = 0.001\nt_end = 0.01\ninitial_condition = maxwellian\ndensity = 2\nbulk_velocity = 0.1, 0, -0.2\n"
      "temperature = 0.5\nsnapshot_times = 0, 0.005\nquad_order = 5\ncoefficients = direct\n");
  CHECK(c.half_width == 3.5);
  CHECK(c.n == 3);
  CHECK(c.kernel.gamma == 1.0);
  CHECK(c.scheme == SchemeKind::symmetric);
  CHECK(*c.dt == 0.001);
  CHECK(c.maxwellian.density == 2.0);
  CHECK(c.maxwellian.velocity[2] == -0.2);
  CHECK(c.snapshot_times.size() == 2);
  CHECK(c.coefficients == CoefficientPath::direct);

  auto error_of = [](const std::string& text) {
    try {
      parse(text);
    } catch (const std::invalid_argument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("colour = blue\n").find("colour") != std::string::npos);
  CHECK(error_of("n = two\n").find("n:") != std::string::npos);
  CHECK(error_of("just text\n").find("line 1") != std::string::npos);
  CHECK(error_of("degree = 1\n").find("degree") != std::string::npos);
  CHECK(error_of("model = relativistic\n").find("convolution") != std::string::npos);
  CHECK(error_of("model = relativistic\ncoefficients = direct\nconvolution_cache = t.bin\n").find("convolution_cache") !=
        std::string::npos);
  CHECK(error_of("gamma = -3\n").find("gamma") != std::string::npos);
  CHECK(error_of("dt = 1\nt_end = 0.5\n").find("t_end") != std::string::npos);
  CHECK(error_of("initial_condition = file\n").find("initial_file") != std::string::npos);
  CHECK_FALSE(error_of("model = relativistic\ncoefficients = direct\nscheme = symmetric\n").size());
}

TEST_CASE("config hash is a git blob hash") {
  CHECK(content_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
  CHECK(content_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST_CASE("checkpoint round trip") {
  const fs::path p = fs::temp_directory_path() / "fpl_test_ckpt.bin";
  Checkpoint c{2, 1, 4.0, 0.125, 17, RowMatrix::Random(8, 8)};
  write_checkpoint(p, c);
  CHECK(fs::file_size(p) == 6 + 4 + 4 + 8 + 8 + 8 + 64 * 8);
  const Checkpoint r = read_checkpoint(p);
  CHECK(r.n == 2);
  CHECK(r.degree == 1);
  CHECK(r.half_width == 4.0);
  CHECK(r.t == 0.125);
  CHECK(r.step == 17);
  CHECK(r.coeffs == c.coeffs);
  std::ofstream(p, std::ios::binary) << "garbage";
  CHECK_THROWS(read_checkpoint(p));
  fs::remove(p);
}

TEST_CASE("initial condition and plane sampling") {
  CHECK(two_gaussian(Vec3::Zero()) == doctest::Approx(2.0 * std::exp(-1.0)));
  CHECK(two_gaussian(Vec3(1, 0, 0)) == doctest::Approx(1.0 + std::exp(-4.0)));
  for (int n : {2, 3}) {
    const auto s = make_space(4.0, n, 2);
    const DgField f = l2_project([](const Vec3& p) { return 1.0 + p[0] + 2.0 * p[1] + 3.0 * p[2] * p[2]; }, s);
    const PlaneSamples ps = sample_pz0(f, 3);
    REQUIRE(ps.px.size() == static_cast<std::size_t>(3 * n));
    CHECK(ps.px.front() == doctest::Approx(-4.0 + 4.0 / (3 * n)));
    for (std::size_t j = 0; j < ps.py.size(); ++j)
      for (std::size_t i = 0; i < ps.px.size(); ++i)
        CHECK(std::abs(ps.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) -
                       (1.0 + ps.px[i] + 2.0 * ps.py[j])) <= 1e-12);
  }
}

TEST_CASE("auto time step scales like h^2 / (k+1)^4") {
  CHECK(auto_time_step(2.0, 2, 500.0) == doctest::Approx(0.5 * 4.0 / (81.0 * 500.0)));
  CHECK(auto_time_step(1.0, 2, 500.0) == doctest::Approx(auto_time_step(2.0, 2, 500.0) / 4.0));
}

TEST_CASE("batch run outputs, determinism and resume") {
  const fs::path a = fresh_dir("run_a"), b = fresh_dir("run_b");
  const RunConfig ca = small_run(a);
  const RunResult ra = run(ca);
  run(small_run(b));

  CHECK(ra.steps == 10);
  for (const char* f : {"moments.csv", "snapshot_0.csv", "snapshot_0.002.csv", "snapshot_0.005.csv",
                        "checkpoint_4.bin", "checkpoint_8.bin", "checkpoint_10.bin"}) {
    CHECK_MESSAGE(fs::exists(a / f), f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  REQUIRE(fs::exists(a / "run.json"));

  // The first row is the projected initial condition.
  const auto s = make_space(4.0, 2, 2);
  const DgField f0 = l2_project(MaxwellianSpec{}, s);
  const Moments m0 = moments(f0);
  std::ostringstream row;
  write_moments_row(row, MomentRecord{0.0, m0.mass, m0.momentum, m0.energy,
                                      relative_entropy(f0, maxwellian_from_moments(m0.mass, m0.momentum, m0.energy)),
                                      l2_norm(f0)});
  std::istringstream csv(slurp(a / "moments.csv"));
  std::string header, first;
  std::getline(csv, header);
  std::getline(csv, first);
  CHECK(header == "t,mass,px,py,pz,energy,entropy,l2");
  CHECK(first + "\n" == row.str());

  const std::string snap = slurp(a / "snapshot_0.csv");
  CHECK(snap.rfind("px,py,f\n", 0) == 0);
  CHECK(std::count(snap.begin(), snap.end(), '\n') == 1 + 16);

  const auto meta = nlohmann::json::parse(slurp(a / "run.json"));
  CHECK(meta["config_hash"] == ra.config_hash);
  CHECK(meta["dt"].get<double>() == 0.0005);
  CHECK(meta["config"]["dt"] == "0.00050000000000000001");
  auto meta_b = nlohmann::json::parse(slurp(b / "run.json"));
  CHECK(meta_b["config"]["output_dir"] != meta["config"]["output_dir"]);
  meta_b["config"]["output_dir"] = meta["config"]["output_dir"];
  meta_b["config_hash"] = meta["config_hash"];
  CHECK(meta_b.dump() == meta.dump());

  // Near-stationarity of the Maxwellian: |f(T) - f(0)| <= steps * dt * |rhs(f(0))|.
  const auto src = make_coefficient_source(ca, s);
  const double r0 = l2_norm(LdgOperator(src, SchemeKind::upwind).rhs(f0));
  CHECK(l2_norm(ra.final_state - f0) <= 10 * 0.0005 * r0);

  // Resuming from step 4 reaches the same final state.
  const fs::path c = fresh_dir("run_c");
  RunConfig cc = small_run(c);
  const RunResult rc = run(cc, read_checkpoint(a / "checkpoint_4.bin"));
  CHECK(rc.steps == 6);
  CHECK((rc.final_state.coeffs() - ra.final_state.coeffs()).cwiseAbs().maxCoeff() <=
        1e-12 * ra.final_state.coeffs().cwiseAbs().maxCoeff());
  const Checkpoint last = read_checkpoint(c / "checkpoint_10.bin");
  CHECK(last.step == 10);
  CHECK(last.t == doctest::Approx(0.005));

  // A checkpoint used as the initial condition.
  const fs::path d = fresh_dir("run_d");
  RunConfig cd = small_run(d);
  cd.initial_condition = InitialCondition::file;
  cd.initial_file = a / "checkpoint_10.bin";
  cd.t_end = 0.001;
  cd.snapshot_times.clear();
  const RunResult rd = run(cd);
  CHECK(rd.records.front().mass == doctest::Approx(ra.records.back().mass).epsilon(1e-14));

  for (const auto& p : {a, b, c, d}) fs::remove_all(p);
}

TEST_CASE("run rejects mismatched checkpoints") {
  const fs::path a = fresh_dir("run_mismatch");
  RunConfig c = small_run(a);
  Checkpoint bad{3, 2, 4.0, 0.0, 0, RowMatrix::Zero(27, 27)};
  CHECK_THROWS_AS(run(c, bad), std::invalid_argument);
  fs::remove_all(a);
}
