#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "catrace/io.hpp"
#include "catrace/verify.hpp"

namespace fs = std::filesystem;
using namespace catrace;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

const std::string kSamples = CATRACE_SAMPLES_DIR;

std::string sample(const std::string& name) { return kSamples + "/" + name; }

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("catrace_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  static CliRun run(const std::string& args) {
    CliRun r;
    const std::string cmd = std::string(CATRACE_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = ::popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = ::pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
  }

  static void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TraceEngines) {
  auto r = run("trace --ca " + sample("and.ca") + " --depth 4");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0000\n1000\n1100\n1110\n1111\n");
  for (const char* e : {"naive", "transducer", "both", "auto"}) {
    auto s = run("trace --ca " + sample("rule110.ca") + " --depth 3 --width 2 --engine " + e);
    EXPECT_EQ(s.code, 0) << e;
    EXPECT_NE(s.out.find("00/00/01\n"), std::string::npos) << e;
  }
  auto skip = run("trace --ca " + sample("const0.ca") + " --depth 3 --skip 1");
  EXPECT_EQ(skip.out, "000\n");
  auto j = nlohmann::json::parse(run("--json trace --ca " + sample("shift.ca") + " --depth 6").out);
  EXPECT_EQ(j["count"], 64);
  EXPECT_EQ(j["words"][1], "000001");
}

TEST_F(Cli, TraceWithDomainAndPolytrace) {
  const std::string poly = tmp("gp.ca");
  ASSERT_EQ(run("compile sft-polytrace --in " + sample("golden.sub") + " --out " + poly).code, 0);
  auto r = run("trace --ca " + poly + " --depth 3 --poly");
  EXPECT_EQ(r.out, "000\n001\n010\n100\n101\n");
  write(tmp("zeros.sub"), "type: sft\nalphabet: 0 1\nforbidden: 1\n");
  auto d = run("trace --ca " + sample("shift.ca") + " --domain " + tmp("zeros.sub") + " --depth 3");
  EXPECT_EQ(d.out, "000\n");
}

TEST_F(Cli, Diagram) {
  auto r = run("diagram --ca " + sample("rule110.ca") + " --config 0001 --steps 2 --viewport 0..3");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "0001\n0011\n0111\n");
  auto p = run("diagram --ca " + sample("rule110.ca") + " --config 0001 --steps 1 --viewport 0..3 --format pgm");
  EXPECT_EQ(p.out, "P2\n4 2\n1\n1 1 1 0\n1 1 0 0\n");
  auto f = run("diagram --ca " + sample("shift.ca") + " --config 01 --steps 1 --viewport 0..1 --out " + tmp("d.txt"));
  EXPECT_EQ(f.code, 0);
  EXPECT_EQ(read_file(tmp("d.txt")), "01\n10\n");
  auto j = nlohmann::json::parse(
      run("--json diagram --ca " + sample("shift.ca") + " --config 01 --steps 1 --viewport 0..1").out);
  EXPECT_EQ(j["rows"][1], "10");
  EXPECT_EQ(run("diagram --ca " + sample("shift.ca") + " --config 01 --viewport 3").code, 3);
}

TEST_F(Cli, CompileSftPolytraceAndVerify) {
  const std::string out = tmp("gp.ca");
  auto r = run("compile sft-polytrace --in " + sample("golden.sub") + " --out " + out);
  EXPECT_EQ(r.code, 0) << r.out;
  const auto prov = parse_provenance(read_file(out + ".prov"));
  EXPECT_EQ(prov.front().second, "sft-polytracer");
  auto v = run("verify --ca " + out + " --target " + sample("golden.sub") + " --depth 8");
  EXPECT_EQ(v.code, 0) << v.out;
  EXPECT_EQ(v.out, "PASS mode=exact depth=8/8\n");
}

TEST_F(Cli, CompilePartialDynamicBorderRoundTrip) {
  const std::string out = tmp("part.ca");
  auto r = run("compile partial --in " + sample("golden.sub") + " --out " + out);
  ASSERT_EQ(r.code, 0) << r.out;
  auto prov = read_file(out + ".prov");
  EXPECT_NE(prov.find("provenance: partial:dynamic-border"), std::string::npos);
  EXPECT_NE(prov.find("u: 01"), std::string::npos);
  EXPECT_NE(prov.find("h: 16"), std::string::npos);
  auto v = run("verify --ca " + out + " --domain " + out + ".domain --target " + sample("golden.sub") +
               " --depth 3 --engine transducer");
  EXPECT_EQ(v.code, 0) << v.out;
}

TEST_F(Cli, CompileNilpotentKinds) {
  const std::string a = tmp("n.ca"), b = tmp("p.ca");
  ASSERT_EQ(run("compile nilpotent --in " + sample("nilp.sub") + " --out " + a).code, 0);
  auto p = run("compile partial --in " + sample("nilp.sub") + " --out " + b);
  ASSERT_EQ(p.code, 0) << p.out;
  EXPECT_NE(read_file(b + ".prov").find("partial:nilpotent"), std::string::npos);
  auto v = run("verify --ca " + a + " --domain " + a + ".domain --target " + sample("nilp.sub") +
               " --depth 6 --engine transducer");
  EXPECT_EQ(v.code, 0) << v.out;
}

TEST_F(Cli, CompileUltimateBranches) {
  auto g = run("compile ultimate --in " + sample("golden.sub") + " --out " + tmp("g.ca"));
  EXPECT_EQ(g.code, 2);
  EXPECT_NE(g.out.find("branch: UNSUPPORTED"), std::string::npos);
  EXPECT_FALSE(fs::exists(tmp("g.ca")));
  auto jg = nlohmann::json::parse(run("--json compile ultimate --in " + sample("golden.sub") + " --out " + tmp("g.ca")).out);
  EXPECT_EQ(jg["branch"], "UNSUPPORTED");
  EXPECT_FALSE(jg["dependency"].get<std::string>().empty());

  const std::string n = tmp("n.ca");
  auto nr = run("compile ultimate --in " + sample("nilp.sub") + " --out " + n);
  EXPECT_EQ(nr.code, 0) << nr.out;
  EXPECT_NE(nr.out.find("branch: nilpotent"), std::string::npos);
  EXPECT_EQ(run("verify --ca " + n + " --target " + sample("nilp.sub") + " --depth 6 --mode ultimate:3").code, 0);
  EXPECT_EQ(run("verify --ca " + n + " --target " + sample("nilp.sub") + " --depth 6 --mode exact").code, 1);

  const std::string c = tmp("c.ca");
  auto cr = run("compile ultimate --in " + sample("ctrex.sub") + " --out " + c);
  EXPECT_EQ(cr.code, 0) << cr.out;
  EXPECT_NE(cr.out.find("xi: 0->1, 1->0"), std::string::npos);
  auto s = run("verify --ca " + c + " --target " + sample("ctrex.sub") +
               " --depth 8 --mode ultimate:1 --samples 200 --max-period 20 --seed 3");
  EXPECT_EQ(s.code, 0) << s.out;
  auto e = run("verify --ca " + c + " --target " + sample("ctrex.sub") +
               " --depth 8 --mode exact --samples 200 --max-period 20");
  EXPECT_EQ(e.code, 1) << e.out;
  EXPECT_NE(e.out.find("seed=20240917"), std::string::npos);
  EXPECT_NE(s.out.find("seed=3"), std::string::npos);
}

TEST_F(Cli, CompileFullWithSwap) {
  const std::string out = tmp("f.ca");
  auto r = run("compile full --in " + sample("full.sub") + " --xi '0->1, 1->0' --check 6 --out " + out);
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("PASS witnesses=64/64"), std::string::npos) << r.out;
  auto ca = parse_ca(read_file(out));
  EXPECT_EQ(ca.diameter(), 29);
  EXPECT_FALSE(ca.rule().is_dense());
}

TEST_F(Cli, CompileBorders) {
  auto b = run("compile border --in " + sample("golden.sub") + " --static 0,1 --k 2 --out " + tmp("s.border"));
  EXPECT_EQ(b.code, 0) << b.out;
  EXPECT_EQ(read_file(tmp("s.border")), "alphabet: 0 1\nblock-length: 2\nwords: 100\ndelta: 100 -> 100\n");
  EXPECT_EQ(run("compile border --in " + sample("full.sub") + " --xi '0->1, 1->0' --k 2 --out " + tmp("x.border")).code,
            0);
  EXPECT_EQ(parse_border(read_file(tmp("x.border"))).words.size(), 2u);
  EXPECT_EQ(run("compile border --in " + sample("golden.sub") + " --dynamic 01 --k 2 --out " + tmp("d.border")).code,
            0);
  EXPECT_EQ(read_file(tmp("d.border")), read_file(sample("dynamic01_k2.border")));
  const std::string out = tmp("bc.ca");
  auto c = run("compile border --in " + sample("golden.sub") + " --border " + sample("dynamic01_k2.border") +
               " --out " + out);
  EXPECT_EQ(c.code, 0) << c.out;
  EXPECT_NE(read_file(out + ".prov").find("border-compose"), std::string::npos);
  EXPECT_EQ(run("compile border --in " + sample("golden.sub") + " --out " + tmp("z")).code, 3);
}

TEST_F(Cli, VerifyVerdictsAndExitCodes) {
  auto f = run("verify --ca " + sample("identity.ca") + " --target " + sample("full.sub") + " --depth 4");
  EXPECT_EQ(f.code, 1);
  EXPECT_NE(f.out.find("certificate=01 (in target, not in trace)"), std::string::npos);
  EXPECT_EQ(
      run("verify --ca " + sample("identity.ca") + " --target " + sample("full.sub") + " --depth 4 --mode inclusion")
          .code,
      0);
  auto c = run("verify --ca " + sample("shift.ca") + " --cross-check --depth 6");
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, "PASS 64=64\n");
  auto p = run("verify --ca " + sample("rule110.ca") + " --target " + sample("full.sub") +
               " --depth 30 --engine naive --mode inclusion");
  EXPECT_EQ(p.code, 2) << p.out;
  auto j = nlohmann::json::parse(
      run("--json verify --ca " + sample("identity.ca") + " --target " + sample("full.sub") + " --depth 4").out);
  EXPECT_EQ(j["verdict"], "FAIL");
  EXPECT_EQ(j["certificate"], "01");
  EXPECT_EQ(j["certificate-side"], "target");
  EXPECT_EQ(run("verify --ca " + sample("identity.ca") + " --depth 4").code, 3);
  EXPECT_EQ(run("verify --ca " + sample("identity.ca") + " --target " + sample("full.sub") + " --depth 4 --mode x")
                .code,
            3);
}

TEST_F(Cli, FreezeCheck) {
  auto ok = run("freeze-check --words " + sample("xi_gap.words") + " --p 1");
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(ok.out, "PASS\n");
  auto bad = run("freeze-check --words " + sample("xi_gap.words") + " --p 2");
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(bad.out, "FAIL counterexample=01100 offset=2\n");
}

TEST_F(Cli, Gadgets) {
  auto p = run("gadget product --f1 " + sample("ab_swap.ca") + " --f2 " + sample("cd_swap.ca") + " --n " +
               sample("identity.ca") + " --n2 " + sample("and.ca") + " --out " + tmp("p.ca"));
  EXPECT_EQ(p.code, 0) << p.out;
  EXPECT_EQ(parse_ca(read_file(tmp("p.ca"))).alphabet().size(), 8u);
  auto bad = run("gadget product --f1 " + sample("ab_swap.ca") + " --f2 " + sample("cd_swap.ca") + " --n " +
                 sample("identity.ca") + " --n2 " + sample("identity.ca") + " --out " + tmp("q.ca"));
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.out.find("not spreading"), std::string::npos);

  ASSERT_EQ(run("gadget four-layer --g " + sample("identity.ca") + " --xi '0->0, 1->1' --n2 " + sample("const0.ca") +
                " --out " + tmp("h0.ca"))
                .code,
            0);
  EXPECT_EQ(run("trace --ca " + tmp("h0.ca") + " --depth 5 --skip 2 --poly").out, "00000\n11111\n");
  ASSERT_EQ(run("gadget four-layer --g " + sample("identity.ca") + " --xi '0->0, 1->1' --n2 " + sample("and.ca") +
                " --out " + tmp("h1.ca"))
                .code,
            0);
  auto j = nlohmann::json::parse(run("--json trace --ca " + tmp("h1.ca") + " --depth 5 --poly").out);
  EXPECT_EQ(j["count"], 32);

  auto yes = run("gadget nilpotency --ca " + sample("const0.ca") + " --j 1");
  EXPECT_EQ(yes.code, 0);
  EXPECT_EQ(yes.out, "YES zero=0\n");
  auto no = run("gadget nilpotency --ca " + sample("shift.ca") + " --j 3");
  EXPECT_EQ(no.code, 1);
  EXPECT_NE(no.out.find("orbit=(1)^inf"), std::string::npos);
  auto mortal = run("gadget mortality --ca " + sample("const0.ca") + " --target 0 --j 1 --p 4");
  EXPECT_EQ(mortal.code, 0) << mortal.out;
  EXPECT_EQ(mortal.out.substr(0, 26), "MORTAL-WITNESSED-ON-TESTED");
  auto live = run("gadget mortality --ca " + sample("and.ca") + " --target 0 --j 3 --p 4");
  EXPECT_EQ(live.code, 1);
}

TEST_F(Cli, Fixtures) {
  auto list = run("fixture");
  EXPECT_EQ(list.code, 0);
  for (const char* n : {"golden", "full", "x110", "nilp", "ctrex", "factptr"})
    EXPECT_NE(list.out.find(std::string(n) + "\t"), std::string::npos) << n;
  auto show = run("fixture golden");
  EXPECT_EQ(show.out, read_file(sample("golden.sub")));
  auto j = nlohmann::json::parse(run("--json fixture nilp").out);
  EXPECT_EQ(j["nilpotency-index"], 3);
  EXPECT_EQ(run("fixture nosuch").code, 3);
}

TEST_F(Cli, ParseErrorsCarryLineNumbers) {
  write(tmp("bad.ca"), "alphabet: 0 1\nanchor: 0\ndiameter: 1\nrule: 0 -> 0\nrule: 1 => 1\n");
  auto r = run("trace --ca " + tmp("bad.ca") + " --depth 2");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.out.find("line 5"), std::string::npos) << r.out;
  write(tmp("bad.sub"), "type: sft\nalphabet: 0 1\nforbiden: 11\n");
  auto s = run("compile partial --in " + tmp("bad.sub") + " --out " + tmp("x.ca"));
  EXPECT_EQ(s.code, 3);
  EXPECT_NE(s.out.find("line 3: unknown key 'forbiden'"), std::string::npos) << s.out;
  EXPECT_EQ(run("frobnicate").code, 3);
  EXPECT_EQ(run("trace --ca " + tmp("missing.ca") + " --depth 2").code, 3);
}
