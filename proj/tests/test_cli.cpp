#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

std::string g_cli_path;
int g_run_counter = 0;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string temp_path(const std::string& tag) {
  return "/tmp/qtyp_test_" + std::to_string(getpid()) + "_" +
         std::to_string(g_run_counter++) + "_" + tag;
}

RunResult run_cli(const std::string& args) {
  const std::string out_file = temp_path("out");
  const std::string err_file = temp_path("err");
  const std::string cmd =
      g_cli_path + " " + args + " >" + out_file + " 2>" + err_file;
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_file);
  r.err = slurp(err_file);
  std::remove(out_file.c_str());
  std::remove(err_file.c_str());
  return r;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream stream(text);
  std::string line;
  while (std::getline(stream, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> fields_of(const std::string& line, char sep = ',') {
  std::vector<std::string> fields;
  std::stringstream stream(line);
  std::string field;
  while (std::getline(stream, field, sep)) fields.push_back(field);
  return fields;
}

}  // namespace

TEST_CASE("moments table has frozen exact rows") {
  const RunResult r = run_cli("moments --i 0 --j 0 --p-max 4");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 6);
  CHECK(lines[0] == "i,j,p,moment");
  CHECK(lines[1] == "0,0,0,1");
  CHECK(lines[3] == "0,0,2,1/2");
  CHECK(lines[5] == "0,0,4,3/4");
}

TEST_CASE("moments parity and cross rows") {
  CHECK(lines_of(run_cli("moments --i 0 --j 1 --p-max 2").out)[3] == "0,1,2,0");
  CHECK(lines_of(run_cli("moments --i 1 --j 1 --p-max 2").out)[3] == "1,1,2,3/2");
  CHECK(lines_of(run_cli("moments --i 0 --j 1 --p-max 1").out)[2] ==
        "0,1,1,1/2*sqrt(2)");
}

TEST_CASE("variance row carries decimals and exact rationals") {
  const RunResult r = run_cli("variance --nu 1 --N 10 --k 1");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "nu,N,n,mean,delta_sq,ratio,mean_exact,delta_sq_exact");
  const auto fields = fields_of(lines[1]);
  REQUIRE(fields.size() == 8);
  CHECK(fields[0] == "1");
  CHECK(fields[1] == "10");
  CHECK(fields[2] == "3");
  CHECK(fields[3] == "10");
  CHECK(std::stod(fields[4]) == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(std::stod(fields[5]) ==
        doctest::Approx(std::sqrt(2.0 / 3.0) / 10.0).epsilon(1e-9));
  CHECK(fields[6] == "10");
  CHECK(fields[7] == "2/3");
}

TEST_CASE("variance with k = 0 reports zero fluctuations") {
  const auto fields = fields_of(lines_of(run_cli("variance --nu 1 --N 10 --k 0").out)[1]);
  CHECK(fields[4] == "0");
  CHECK(fields[5] == "0");
}

TEST_CASE("usage errors exit with status 2 and name the flag") {
  const RunResult bad_k = run_cli("variance --nu 1 --N 10 --k 6");
  CHECK(bad_k.exit_code == 2);
  CHECK(bad_k.err.find("--k") != std::string::npos);

  const RunResult bad_samples = run_cli("mc --nu 1 --N 10 --k 1 --samples 0");
  CHECK(bad_samples.exit_code == 2);
  CHECK(bad_samples.err.find("--samples") != std::string::npos);

  const RunResult missing = run_cli("variance --nu 1 --k 1");
  CHECK(missing.exit_code == 2);
  CHECK(missing.err.find("--N") != std::string::npos);

  const RunResult empty_list = run_cli("sweep --nu 1 --alpha 0.5 --N-list ,");
  CHECK(empty_list.exit_code == 2);
  CHECK(empty_list.err.find("--N-list") != std::string::npos);

  const RunResult single_n = run_cli("fit --nu 1 --N-list 200");
  CHECK(single_n.exit_code == 2);
  CHECK(single_n.err.find("--N-list") != std::string::npos);

  CHECK(run_cli("variance --nu 1 --N 9 --k 1").exit_code == 2);
  CHECK(run_cli("nonsense").exit_code == 2);
}

TEST_CASE("capacity errors exit with status 3") {
  const RunResult r = run_cli("moments --i 0 --j 0 --p-max 65");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("--p-max") != std::string::npos);
}

TEST_CASE("mc emits a finite z-score against the exact variance") {
  const RunResult r = run_cli("mc --nu 1 --N 100 --k 5 --samples 10000 --seed 42");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  const auto header = fields_of(lines[0]);
  const auto fields = fields_of(lines[1]);
  REQUIRE(header.size() == fields.size());
  double z = 0.0, exact = 0.0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "z_score") z = std::stod(fields[i]);
    if (header[i] == "exact_delta_sq") exact = std::stod(fields[i]);
  }
  CHECK(exact == doctest::Approx(10.0));
  CHECK(std::abs(z) <= 5.0);
}

TEST_CASE("mc output is byte-identical across repeated runs") {
  const std::string flags = "mc --nu 1 --N 40 --k 4 --samples 2000 --seed 7";
  const std::string f1 = temp_path("det1.csv");
  const std::string f2 = temp_path("det2.csv");
  CHECK(run_cli(flags + " --out " + f1).exit_code == 0);
  CHECK(run_cli(flags + " --out " + f2).exit_code == 0);
  const std::string a = slurp(f1);
  const std::string b = slurp(f2);
  CHECK(!a.empty());
  CHECK(a == b);
  std::remove(f1.c_str());
  std::remove(f2.c_str());
}

TEST_CASE("sweep emits one row per N plus optional plot data") {
  const std::string plot = temp_path("plot.dat");
  const RunResult r = run_cli(
      "sweep --nu 1 --alpha 0.5 --c 1.0 --N-list 100,1000,10000 --plot " + plot);
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 4);

  // ratio column strictly decreasing
  const auto header = fields_of(lines[0]);
  std::size_t ratio_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "ratio") ratio_col = i;
  double prev = 1e300;
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const double ratio = std::stod(fields_of(lines[row])[ratio_col]);
    CHECK(ratio < prev);
    prev = ratio;
  }

  const auto plot_lines = lines_of(slurp(plot));
  REQUIRE(plot_lines.size() == 3);
  double x0, y0, x2, y2;
  {
    std::stringstream s(plot_lines.front());
    s >> x0 >> y0;
  }
  {
    std::stringstream s(plot_lines.back());
    s >> x2 >> y2;
  }
  CHECK((y2 - y0) / (x2 - x0) == doctest::Approx(-0.5).epsilon(0.05));
  std::remove(plot.c_str());
}

TEST_CASE("sweep --mc estimates rows by sampling") {
  const RunResult r =
      run_cli("sweep --nu 1 --alpha 0.5 --N-list 20,40 --mc 500 --seed 5");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);
  const auto header = fields_of(lines[0]);
  std::size_t method_col = 0, delta_col = 0, err_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "method") method_col = i;
    if (header[i] == "delta_sq") delta_col = i;
    if (header[i] == "delta_sq_stderr") err_col = i;
  }
  for (std::size_t row = 1; row < lines.size(); ++row) {
    const auto fields = fields_of(lines[row]);
    CHECK(fields[method_col] == "monte-carlo");
    CHECK(std::stod(fields[err_col]) > 0.0);
    CHECK(std::stod(fields[delta_col]) > 0.0);
  }
}

TEST_CASE("zero-particle ladder reports an undefined ratio") {
  const RunResult r = run_cli("variance --nu 1 --N 0 --k 0");
  REQUIRE(r.exit_code == 0);
  const auto fields = fields_of(lines_of(r.out)[1]);
  CHECK(fields[3] == "0");            // mean
  CHECK(fields[5] == "undefined");    // ratio has no value at zero mean
}

TEST_CASE("non-typical sweep keeps the ratio constant within one percent") {
  const RunResult r =
      run_cli("sweep --nu 1 --alpha 1.0 --c 0.5 --N-list 10000,1000000");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  const auto header = fields_of(lines[0]);
  std::size_t ratio_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == "ratio") ratio_col = i;
  const double r1 = std::stod(fields_of(lines[1])[ratio_col]);
  const double r2 = std::stod(fields_of(lines[2])[ratio_col]);
  CHECK(r2 / r1 > 0.99);
  CHECK(r2 / r1 < 1.01);
}

TEST_CASE("fit defaults reproduce the expansion coefficients") {
  const RunResult r = run_cli("fit --nu 1");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "nu,d20_fit,d02_fit,d20_exact,d02_exact,max_residual");
  const auto fields = fields_of(lines[1]);
  CHECK(std::abs(std::stod(fields[1])) < 1e-9);
  CHECK(std::stod(fields[2]) == doctest::Approx(1.0 / 12.0).epsilon(1e-9));
  CHECK(fields[3] == "0");
  CHECK(fields[4] == "1/12");

  const auto nu2 = fields_of(lines_of(run_cli("fit --nu 2").out)[1]);
  CHECK(std::stod(nu2[2]) == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(nu2[4] == "3/4");
}

TEST_CASE("tsv format switches the separator") {
  const RunResult r = run_cli("variance --nu 1 --N 10 --k 1 --format tsv");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  CHECK(lines[0].find('\t') != std::string::npos);
  CHECK(lines[0].find(',') == std::string::npos);
  CHECK(fields_of(lines[1], '\t').size() == 8);

  CHECK(run_cli("variance --nu 1 --N 10 --k 1 --format xml").exit_code == 2);
}

TEST_CASE("config file supplies defaults, flags override") {
  const std::string cfg = temp_path("run.cfg");
  {
    std::ofstream out(cfg);
    out << "# sample run configuration\n";
    out << "nu = 1\n";
    out << "N = 10\n";
    out << "k = 1   # window half width\n";
  }
  const RunResult from_cfg = run_cli("variance --config " + cfg);
  REQUIRE(from_cfg.exit_code == 0);
  CHECK(fields_of(lines_of(from_cfg.out)[1])[2] == "3");  // n = 3 from k = 1

  const RunResult overridden = run_cli("variance --config " + cfg + " --k 2");
  REQUIRE(overridden.exit_code == 0);
  CHECK(fields_of(lines_of(overridden.out)[1])[2] == "5");  // flag wins

  const RunResult missing_cfg = run_cli("variance --config /nonexistent.cfg");
  CHECK(missing_cfg.exit_code == 2);

  const std::string bad = temp_path("bad.cfg");
  {
    std::ofstream out(bad);
    out << "this line has no assignment\n";
  }
  CHECK(run_cli("variance --config " + bad).exit_code == 2);
  std::remove(cfg.c_str());
  std::remove(bad.c_str());
}

int main(int argc, char** argv) {
  std::vector<char*> doctest_args;
  for (int i = 0; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg.rfind("--cli=", 0) == 0) {
      g_cli_path = arg.substr(6);
    } else {
      doctest_args.push_back(argv[i]);
    }
  }
  if (g_cli_path.empty()) {
    if (const char* env = std::getenv("QTYP_CLI")) g_cli_path = env;
  }
  if (g_cli_path.empty()) {
    std::fprintf(stderr, "test_cli: pass --cli=<path to qtyp binary>\n");
    return 1;
  }
  doctest::Context context(static_cast<int>(doctest_args.size()),
                           doctest_args.data());
  return context.run();
}
