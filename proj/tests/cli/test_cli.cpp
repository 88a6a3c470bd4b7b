#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string cli = CONCORD_CLI_PATH;
const fs::path tmp_dir = CONCORD_TEST_TMP;

struct Run {
  int exit_code;
  std::string out_path;
};

Run run_cli(const std::string& args, const std::string& tag) {
  fs::create_directories(tmp_dir);
  const std::string out = (tmp_dir / (tag + ".json")).string();
  const std::string err = (tmp_dir / (tag + ".err")).string();
  const std::string cmd =
      cli + " --out " + out + " " + args + " 2> " + err;
  const int raw = std::system(cmd.c_str());
  return Run{raw == -1 ? -1 : WEXITSTATUS(raw), out};
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  json j;
  in >> j;
  return j;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << contents;
}

}  // namespace

TEST_CASE("cli: classic on identical columns") {
  const fs::path data = tmp_dir / "ident.csv";
  write_file(data, "a,b\n1,1\n2,2\n3,3\n4,4\n");
  const Run run =
      run_cli("classic --input " + data.string() + " --x a --y b", "classic1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["ccc"]["estimate"].get<double>() == doctest::Approx(1.0));
  CHECK(rep["limits_of_agreement"]["lower"].get<double>() == 0.0);
  CHECK(rep["limits_of_agreement"]["upper"].get<double>() == 0.0);
  CHECK(rep["pearson"].get<double>() == doctest::Approx(1.0));
  CHECK(rep["command"] == "classic");
  CHECK(rep.contains("seed"));
  CHECK(rep.contains("version"));
}

TEST_CASE("cli: missing-value rows are dropped and reported") {
  const fs::path data = tmp_dir / "nas.csv";
  write_file(data, "x,y\n1,2\n2,NA\n3,4\n4,5\n5,7\n");
  const Run run =
      run_cli("classic --input " + data.string() + " --x x --y y", "classic2");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["n"].get<int>() == 4);
  CHECK(rep["dropped_rows"].get<int>() == 1);
}

TEST_CASE("cli: exit code 2 for input and config problems") {
  CHECK(run_cli("classic --input missing_file.csv", "e1").exit_code == 2);

  const fs::path bad = tmp_dir / "bad.csv";
  write_file(bad, "x,y\n1,2\n3,oops\n");
  CHECK(run_cli("classic --input " + bad.string(), "e2").exit_code == 2);

  const fs::path ok = tmp_dir / "ok.csv";
  write_file(ok, "x,y\n1,2\n3,4\n5,6\n");
  CHECK(run_cli("classic --input " + ok.string() + " --x nope", "e3")
            .exit_code == 2);
}

TEST_CASE("cli: exit code 1 for analysis errors") {
  const fs::path flat = tmp_dir / "flat.csv";
  write_file(flat, "x,y\n1,2\n1,3\n1,4\n");
  // constant predictor makes the calibration singular
  CHECK(run_cli("calibrate --input " + flat.string() + " --x x --y y",
                "e4").exit_code == 1);
}

TEST_CASE("cli: byte-identical reports for identical config and seed") {
  const fs::path data = tmp_dir / "seeded.csv";
  std::ostringstream rows;
  rows << "x,y\n";
  unsigned state = 123;
  for (int i = 0; i < 80; ++i) {
    state = state * 1664525u + 1013904223u;
    const double x = (state % 1000) / 100.0;
    state = state * 1664525u + 1013904223u;
    const double y = x * 0.8 + (state % 100) / 50.0;
    rows << x << "," << y << "\n";
  }
  write_file(data, rows.str());

  const std::string args =
      "--seed 99 pa --input " + data.string() + " --x x --y y --cad 2 "
      "--bootstrap 500";
  const Run r1 = run_cli(args, "det1");
  const Run r2 = run_cli(args, "det2");
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  CHECK(read_file(r1.out_path) == read_file(r2.out_path));

  // a different seed must change the bootstrap CI digits
  const Run r3 = run_cli("--seed 100 pa --input " + data.string() +
                             " --x x --y y --cad 2 --bootstrap 500",
                         "det3");
  REQUIRE(r3.exit_code == 0);
  CHECK(read_file(r1.out_path) != read_file(r3.out_path));
}

TEST_CASE("cli: calibrate reproduces a known linear relation") {
  const fs::path data = tmp_dir / "cal.csv";
  std::ostringstream rows;
  rows << "sensor,station\n";
  unsigned state = 7;
  for (int i = 0; i < 200; ++i) {
    state = state * 1664525u + 1013904223u;
    const double x = (state % 2000) / 100.0;
    state = state * 1664525u + 1013904223u;
    const double noise = ((state % 200) - 100.0) / 200.0;
    rows << x << "," << (10.0 - 0.5 * x + noise) << "\n";
  }
  write_file(data, rows.str());
  const Run run = run_cli(
      "calibrate --input " + data.string() + " --x sensor --y station",
      "cal1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["slope"].get<double>() == doctest::Approx(-0.5).epsilon(0.02));
  CHECK(rep["intercept"].get<double>() == doctest::Approx(10.0).epsilon(0.02));
  CHECK(rep["r2"].get<double>() > 0.97);
  CHECK(rep["ccc"]["estimate"].get<double>() > 0.97);
  CHECK(rep["pa"]["estimate"].get<double>() > 0.9);
  CHECK(rep["cad_provenance"] == "sd-of-reference-heuristic");
}

TEST_CASE("cli: robust subcommand emits rho_g and presets") {
  const fs::path data = tmp_dir / "rob.csv";
  std::ostringstream rows;
  rows << "x,y\n";
  unsigned state = 5;
  for (int i = 0; i < 60; ++i) {
    state = state * 1664525u + 1013904223u;
    const double x = (state % 1000) / 100.0;
    rows << x << "," << x * 1.05 + 0.3 << "\n";
  }
  write_file(data, rows.str());
  const Run run = run_cli("robust --input " + data.string() +
                              " --x x --y y --family power --delta 1.5 "
                              "--bootstrap 300",
                          "rob1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["rho_g"].get<double>() > 0.9);
  CHECK(rep["rho_g_presets"].contains("delta_1.0"));
  CHECK(rep["rho1_normal"].get<double>() > 0.8);
  CHECK(rep["rho_g_bootstrap"]["ci_low"].get<double>() <=
        rep["rho_g"].get<double>());
}

TEST_CASE("cli: temporal comovement and functional modes") {
  const fs::path series = tmp_dir / "series.csv";
  std::ostringstream rows;
  rows << "x,y\n";
  double x = 0.0;
  unsigned state = 11;
  for (int t = 0; t < 120; ++t) {
    state = state * 1664525u + 1013904223u;
    x += ((state % 100) - 50.0) / 50.0;
    rows << x << "," << 2.0 * x + 3.0 << "\n";
  }
  write_file(series, rows.str());
  const Run r1 = run_cli("temporal --input " + series.string() +
                             " --x x --y y --bootstrap 200",
                         "tmp1");
  REQUIRE(r1.exit_code == 0);
  const json rep1 = load_json(r1.out_path);
  CHECK(rep1["comovement"].get<double>() == doctest::Approx(1.0));

  const fs::path panel = tmp_dir / "panel.csv";
  std::ostringstream prows;
  prows << "subject,time,x,y\n";
  for (int i = 1; i <= 6; ++i)
    for (int j = 0; j < 5; ++j) {
      const double t = 0.25 * j;
      const double xv = i + t;
      prows << i << "," << t << "," << xv << "," << xv * 0.9 << "\n";
    }
  write_file(panel, prows.str());
  const Run r2 = run_cli("temporal --mode functional --input " +
                             panel.string() + " --subject subject --time "
                             "time --x x --y y",
                         "tmp2");
  REQUIRE(r2.exit_code == 0);
  const json rep2 = load_json(r2.out_path);
  CHECK(rep2["subjects"].get<int>() == 6);
  CHECK(rep2["functional_ccc"].get<double>() > 0.5);
}

TEST_CASE("cli: mv subcommand") {
  const fs::path data = tmp_dir / "mv.csv";
  std::ostringstream rows;
  rows << "x1,x2,y1,y2\n";
  unsigned state = 13;
  for (int i = 0; i < 50; ++i) {
    state = state * 1664525u + 1013904223u;
    const double a = (state % 1000) / 100.0;
    state = state * 1664525u + 1013904223u;
    const double b = (state % 1000) / 100.0;
    rows << a << "," << b << "," << a + 0.1 << "," << b - 0.1 << "\n";
  }
  write_file(data, rows.str());
  const Run run = run_cli("mv --input " + data.string() +
                              " --x-cols x1,x2 --y-cols y1,y2",
                          "mv1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["rm_ccc"].get<double>() > 0.9);
  CHECK(rep["matrix_ccc"].get<double>() > 0.9);
}

TEST_CASE("cli: lattice reproduces the two-node hand value") {
  const fs::path edges = tmp_dir / "edges.csv";
  write_file(edges, "a,b\n0,1\n");
  const Run run = run_cli("lattice --edges " + edges.string() +
                              " --eta0 0.5 --tau1 1 --tau2 1",
                          "lat1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["lattice_ccc"].get<double>() ==
        doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("cli: image agreement report on text grids") {
  const fs::path a = tmp_dir / "a.txt";
  const fs::path b = tmp_dir / "b.txt";
  std::ostringstream ga, gb;
  for (int i = 0; i < 12; ++i) {
    for (int j = 0; j < 12; ++j) {
      const double v = 0.3 + 0.05 * ((i * 7 + j * 3) % 9);
      ga << v << " ";
      gb << v + 0.01 << " ";
    }
    ga << "\n";
    gb << "\n";
  }
  write_file(a, ga.str());
  write_file(b, gb.str());
  const Run run = run_cli("image --a " + a.string() + " --b " + b.string() +
                              " --c-grid 0.05,0.1",
                          "img1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["pearson"].get<double>() == doctest::Approx(1.0));
  CHECK(rep["ccc"].get<double>() > 0.99);
  CHECK(rep["pa_curve"]["psi"].size() == 2);
}

TEST_CASE("cli: CONCORD_SEED environment fallback") {
  const fs::path data = tmp_dir / "envseed.csv";
  write_file(data, "x,y\n1,1\n2,2\n3,4\n");
  fs::create_directories(tmp_dir);
  const std::string out = (tmp_dir / "envseed.json").string();
  const std::string cmd = "CONCORD_SEED=424242 " + cli + " --out " + out +
                          " classic --input " + data.string() +
                          " --x x --y y 2> /dev/null";
  REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
  CHECK(load_json(out)["seed"].get<std::uint64_t>() == 424242);
}

TEST_CASE("cli: csv format flattens the report") {
  const fs::path data = tmp_dir / "fmt.csv";
  write_file(data, "x,y\n1,1\n2,2\n3,3\n");
  const Run run = run_cli("--format csv classic --input " + data.string() +
                              " --x x --y y",
                          "fmt1");
  REQUIRE(run.exit_code == 0);
  const std::string body = read_file(run.out_path);
  CHECK(body.find("key,value") == 0);
  CHECK(body.find("pearson,") != std::string::npos);
}

TEST_CASE("cli: spatial subcommand on a small simulated field") {
  // deterministic smooth surfaces stand in for a simulated field
  const fs::path xg = tmp_dir / "fx.csv";
  const fs::path yg = tmp_dir / "fy.csv";
  std::ostringstream gx, gy;
  gx << "nx,ny,spacing\n10,10,1\n";
  gy << "nx,ny,spacing\n10,10,1\n";
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double base = std::sin(0.6 * i) * std::cos(0.5 * j);
      gx << base + 0.01 * ((i * 13 + j * 7) % 11) << (j + 1 < 10 ? "," : "");
      gy << 0.9 * base + 0.01 * ((i * 5 + j * 3) % 7) << (j + 1 < 10 ? "," : "");
    }
    gx << "\n";
    gy << "\n";
  }
  write_file(xg, gx.str());
  write_file(yg, gy.str());
  const Run run = run_cli("spatial --x-grid " + xg.string() + " --y-grid " +
                              yg.string() + " --lags 0,1",
                          "spat1");
  REQUIRE(run.exit_code == 0);
  const json rep = load_json(run.out_path);
  CHECK(rep["fit"]["converged"].get<bool>());
  CHECK(rep["per_lag"].size() == 2);
  const double sccc0 = rep["per_lag"][0]["sccc"].get<double>();
  CHECK(sccc0 > 0.5);
  CHECK(rep["per_lag"][1]["sccc"].get<double>() <= sccc0 + 1e-12);
}
