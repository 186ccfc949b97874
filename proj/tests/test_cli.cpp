#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <string>

#include "oracles.hpp"
#include "singvec/io.hpp"

using namespace singvec;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = std::string(SINGVEC_CLI_PATH) + " " + args + " 2>&1";
  CliRun r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("singvec_cli_" + std::to_string(getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string tmp(const std::string& name) { return (scratch() / name).string(); }

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

/** \brief Depth-2 tree at (0.6, b auto), built once. */
const std::string& small_tree() {
  static const std::string path = [] {
    std::string p = tmp("tree2.json");
    CliRun r = cli("tree build --mu 0.6 --depth 2 --cap 4 --out " + p);
    if (r.code != 0) throw std::runtime_error(r.out);
    return p;
  }();
  return path;
}

}  // namespace

TEST(CliLattice, MinimaOfSmallVector) {
  CliRun r = cli("lattice minima --x 1,0,2");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "lam1_sq  1/4")) << r.out;
  EXPECT_TRUE(contains(r.out, "covolume 1/2 ok")) << r.out;
}

TEST(CliLattice, UnitLattice) {
  std::string p = tmp("unit.json");
  CliRun r = cli("lattice minima --x 0,0,1 --json " + p);
  EXPECT_EQ(r.code, 0);
  Json j = read_json(p);
  EXPECT_EQ(j["lam1_sq"], "1/1");
  EXPECT_EQ(j["lam2_sq"], "1/1");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["config"]["params"]["x"], "0,0,1");
}

TEST(CliLattice, ZeroVectorAndParseErrors) {
  CliRun z = cli("lattice minima --x 0,0,0");
  EXPECT_EQ(z.code, 1);
  EXPECT_TRUE(contains(z.out, "ZeroVector")) << z.out;
  EXPECT_EQ(cli("lattice minima --x 1,2").code, 2);
  EXPECT_EQ(cli("lattice minima --x 1,x,3").code, 2);
  EXPECT_EQ(cli("lattice minima").code, 2);
  EXPECT_EQ(cli("nonsense").code, 2);
}

TEST(CliBestApprox, MirrorsLibraryExamples) {
  CliRun half = cli("bestapprox --theta 1/2,1/2 --qmax 10");
  EXPECT_EQ(half.code, 0);
  EXPECT_TRUE(contains(half.out, "1,2,1,1,0/1")) << half.out;
  EXPECT_TRUE(contains(half.out, "terminal")) << half.out;

  std::string p = tmp("ba.json");
  CliRun r = cli("bestapprox --theta 5/8,0 --qmax 10 --verify-bai3 --json " + p);
  EXPECT_EQ(r.code, 0) << r.out;
  Json j = read_json(p);
  const Json& recs = j["sequence"]["records"];
  ASSERT_EQ(recs.size(), 4u);
  const char* qs[] = {"1", "2", "3", "8"};
  const char* rs[] = {"9/64", "1/16", "1/64", "0/1"};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(recs[i]["q"], qs[i]);
    EXPECT_EQ(recs[i]["rn_sq"], rs[i]);
  }
  EXPECT_TRUE(j["bai3"]["clean"].get<bool>());
}

TEST(CliBestApprox, MatchesNaiveScan) {
  std::string p = tmp("ba37.json");
  CliRun r = cli("bestapprox --theta 3/7,2/7 --qmax 10 --json " + p);
  EXPECT_EQ(r.code, 0);
  auto expect = oracle::naive_scan(Rational(3, 7), Rational(2, 7), 10);
  Json j = read_json(p);
  const Json& recs = j["sequence"]["records"];
  ASSERT_EQ(recs.size(), expect.size());
  for (std::size_t i = 0; i < expect.size(); ++i) {
    EXPECT_EQ(recs[i]["q"], to_string(expect[i].q));
    EXPECT_EQ(recs[i]["p1"], to_string(expect[i].p1));
    EXPECT_EQ(recs[i]["p2"], to_string(expect[i].p2));
    EXPECT_EQ(recs[i]["rn_sq"], to_string(expect[i].d_sq));
  }
}

TEST(CliFormulas, RowsAndRange) {
  CliRun r = cli("formulas table --mu 0.8");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "8.00000000000000000000000000000e-01,4.00000000000000000000000000000e-01,0,"
                              "4.00000000000000000000000000000e-01,0,"))
      << r.out;
  CliRun s = cli("formulas table --mu 0.6");
  EXPECT_EQ(s.code, 0);
  EXPECT_TRUE(contains(s.out, "," + CertifiedReal(Rational(18, 19)).decimal(30) + ",0,")) << s.out;
  EXPECT_EQ(cli("formulas table --mu 1.2").code, 1);
  EXPECT_EQ(cli("formulas table --mu 0.5").code, 1);
  EXPECT_EQ(cli("formulas table --mu 0.6:0.7").code, 2);
}

TEST(CliFormulas, TableFile) {
  std::string p = tmp("bounds.csv");
  EXPECT_EQ(cli("formulas table --mu 0.51:0.99:0.005 --out " + p).code, 0);
  std::string text = read_text(p);
  std::size_t lines = 0;
  for (char c : text) lines += c == '\n';
  EXPECT_EQ(lines, 3u + 97u);
  EXPECT_TRUE(text.rfind("# singvec ", 0) == 0);
  EXPECT_TRUE(contains(text, "# config {\"command\":\"formulas table\""));
}

TEST(CliTree, DepthZero) {
  std::string p = tmp("tree0.json");
  CliRun r = cli("tree build --mu 0.6 --depth 0 --out " + p);
  EXPECT_EQ(r.code, 0) << r.out;
  Tree t = tree_from_json(read_json(p));
  EXPECT_EQ(t.nodes.size(), 1u);
  EXPECT_EQ(cli("tree verify --in " + p).code, 0);
}

TEST(CliTree, BuildVerifyRoundTrip) {
  const std::string& p = small_tree();
  Tree t = tree_from_json(read_json(p));
  EXPECT_EQ(t.nodes.size(), 21u);
  std::string rep = tmp("report.json");
  CliRun v = cli("tree verify --in " + p + " --checks nestedness,disjoint,tiling,counting --report " + rep);
  EXPECT_EQ(v.code, 0) << v.out;
  Json j = read_json(rep);
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_EQ(j["sections"]["nestedness"]["reports"].size(), 21u);
}

TEST(CliTree, Deterministic) {
  std::string a = tmp("det_a.json"), b = tmp("det_b.json");
  ASSERT_EQ(cli("tree build --mu 0.6 --depth 1 --cap 4 --out " + a).code, 0);
  ASSERT_EQ(cli("tree build --mu 0.6 --depth 1 --cap 4 --out " + b).code, 0);
  std::string ta = read_text(a), tb = read_text(b);
  // the output path is part of the embedded configuration
  auto strip = [](std::string s, const std::string& path) {
    auto k = s.find(path);
    if (k != std::string::npos) s.erase(k, path.size());
    return s;
  };
  EXPECT_EQ(strip(ta, a), strip(tb, b));
}

TEST(CliTree, CorruptedFileFails) {
  Json j = read_json(small_tree());
  j["nodes"][3]["radius"] = "1/1";
  std::string bad = tmp("corrupt.json");
  write_json(bad, j);
  std::string rep = tmp("corrupt_report.json");
  CliRun v = cli("tree verify --in " + bad + " --checks nestedness,disjoint --report " + rep);
  EXPECT_EQ(v.code, 1) << v.out;
  EXPECT_FALSE(read_json(rep)["ok"].get<bool>());

  Json k = read_json(small_tree());
  k["nodes"][2]["parent"] = 7;
  std::string broken = tmp("broken.json");
  write_json(broken, k);
  EXPECT_EQ(cli("tree verify --in " + broken).code, 2);
  write_text(tmp("garbage.json"), "{not json");
  EXPECT_EQ(cli("tree verify --in " + tmp("garbage.json")).code, 2);
  EXPECT_EQ(cli("tree verify --in " + small_tree() + " --checks bogus").code, 2);
}

TEST(CliSingular, GenerateAndVerify) {
  std::string th = tmp("theta.json"), rep = tmp("singular.json");
  CliRun g = cli("singular generate --mu 0.6 --depth 4 --out " + th);
  EXPECT_EQ(g.code, 0) << g.out;
  CliRun v = cli("singular verify --in " + th + " --mu 0.6 --qmax auto --json " + rep);
  EXPECT_EQ(v.code, 0) << v.out;
  Json j = read_json(rep);
  EXPECT_TRUE(j["ok"].get<bool>());
  EXPECT_FALSE(j["degenerate"].get<bool>());
  Json t = read_json(th);
  EXPECT_EQ(j["uniform"]["qmax"], t["path"][3]["x"][2]);
}

TEST(CliSingular, RationalTargetIsDegenerate) {
  CliRun v = cli("singular verify --theta 5/8,0 --mu 0.6 --qmax 100");
  EXPECT_EQ(v.code, 1);
  EXPECT_TRUE(contains(v.out, "degenerate")) << v.out;
}

TEST(CliSingular, HeightTooSmallExplained) {
  CliRun g = cli("singular generate --mu 0.95 --b 1/10 --depth 2 --out " + tmp("th95.json"));
  EXPECT_EQ(g.code, 1);
  EXPECT_TRUE(contains(g.out, "HeightTooSmall")) << g.out;
  EXPECT_TRUE(contains(g.out, "raise the root height")) << g.out;
}

TEST(CliDim, BoxcountLocalProfile) {
  const std::string& p = small_tree();
  std::string csv = tmp("bc.csv");
  CliRun b = cli("dim boxcount --tree " + p + " --scales 2^-4..2^-12 --out " + csv);
  EXPECT_EQ(b.code, 0) << b.out;
  EXPECT_TRUE(contains(b.out, "slope ")) << b.out;
  EXPECT_TRUE(contains(read_text(csv), "\n12,2^-12,"));
  EXPECT_EQ(cli("dim boxcount --tree " + p + " --scales 2^-5..2^-5").code, 1);
  EXPECT_EQ(cli("dim boxcount --tree " + p + " --scales 5").code, 2);

  CliRun l = cli("dim local --tree " + p + " --s 1/2");
  EXPECT_EQ(l.code, 0) << l.out;
  EXPECT_TRUE(contains(l.out, "nodes 16")) << l.out;
  EXPECT_EQ(cli("dim local --tree " + tmp("tree0.json") + " --s 1/2").code, 1);

  CliRun f = cli("dim profile --tree " + p + " --node 0 --s 1 --witnesses 1 --per-witness 40 --radii 3");
  EXPECT_EQ(f.code, 0) << f.out;
  EXPECT_TRUE(contains(f.out, "scene size 40")) << f.out;
}

TEST(CliDim, UpperAudit) {
  std::string csv = tmp("audit.csv"), js = tmp("audit.json");
  CliRun a = cli("dim upper-audit --mu 0.75 --s 0.6 --gamma 0 --root 1,0,10 --cutoff 25000 --shells 2 --out " + csv +
              " --json " + js);
  EXPECT_EQ(a.code, 0) << a.out;
  Json j = read_json(js);
  EXPECT_TRUE(j["monotone"].get<bool>());
  EXPECT_TRUE(j["below_one"].get<bool>());
  EXPECT_EQ(j["exponents"]["b"], "12/5");
  EXPECT_EQ(cli("dim upper-audit --mu 0.75 --s 0.6 --root 1,1,3 --cutoff 1000").code, 1);
  EXPECT_EQ(cli("dim upper-audit --mu 0.75 --s 0.6 --cutoff 1 --shells 3").code, 1);
}
