#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "qca/phantom.hpp"
#include "qca/profile.hpp"
#include "qca/raster.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("qca_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run qca_cli(const std::string& args, const fs::path& dir)
{
    const auto out = dir / "stdout.txt";
    const auto err = dir / "stderr.txt";
    const std::string cmd = std::string("\"") + QCA_CLI_PATH + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int raw = std::system(cmd.c_str());
    Run r;
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

}  // namespace

TEST(Cli, UnknownFlagIsUsageError)
{
    const auto dir = scratch("usage");
    const auto r = qca_cli("run --no-such-flag", dir);
    EXPECT_EQ(r.status, 64);
    EXPECT_FALSE(r.err.empty());
}

TEST(Cli, HelpListsDefaults)
{
    const auto dir = scratch("help");
    const auto r = qca_cli("run --help", dir);
    EXPECT_EQ(r.status, 0);
    for (const char* s : {"--top-k", "--prune-threshold", "--trim", "--window", "--k-max", "--k-min"}) {
        EXPECT_NE(r.out.find(s), std::string::npos) << s;
    }
    EXPECT_NE(r.out.find("[25]"), std::string::npos);
    EXPECT_NE(r.out.find("[30]"), std::string::npos);
}

TEST(Cli, AssessThreeProfiles)
{
    const auto dir = scratch("assess");
    std::string args = "assess";
    for (int id : {3, 5, 8}) {
        qca::WidthProfile p;
        for (int i = 0; i < 60; ++i) {
            const double w = (i >= 28 && i <= 32) ? 5.0 : 10.0;
            p.entries.push_back({{40 + i, 50}, i, w});
        }
        const auto file = dir / ("profile_000" + std::to_string(id) + ".csv");
        std::ofstream out(file);
        qca::write_profile_csv(out, p);
        args += " \"" + file.string() + "\"";
    }
    const auto r = qca_cli(args, dir);
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("\"percent\""), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"severity\": \"moderate\""), std::string::npos) << r.out;
}

TEST(Cli, PhantomIsDeterministic)
{
    std::string masks[2];
    std::string fields[2];
    for (int i = 0; i < 2; ++i) {
        const auto dir = scratch("phantom" + std::to_string(i));
        const auto r = qca_cli("phantom --depth 0.6 --seed 4 --output-dir \"" + (dir / "out").string() + "\"", dir);
        ASSERT_EQ(r.status, 0) << r.err;
        masks[i] = slurp(dir / "out" / "mask.pgm");
        fields[i] = slurp(dir / "out" / "width_field.csv");
    }
    EXPECT_FALSE(masks[0].empty());
    EXPECT_EQ(masks[0], masks[1]);
    EXPECT_EQ(fields[0], fields[1]);
    EXPECT_EQ(fields[0].rfind("t,x,y,width\n", 0), 0u);
}

TEST(Cli, EvalPairs)
{
    const auto dir = scratch("eval");
    std::ofstream(dir / "pairs.csv") << "patient_id,truth,prediction\nA,70,60\nB,50,55\n";
    const auto r = qca_cli("eval --pairs \"" + (dir / "pairs.csv").string() + "\"", dir);
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(r.out.find("\"mae\": 7.5"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"sd_ae\": 2.5"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("\"acc_70\": 50.0"), std::string::npos) << r.out;
}

TEST(Cli, SplitCounts)
{
    const auto dir = scratch("split");
    const auto a = qca_cli("split --count 102 --seed 7", dir);
    ASSERT_EQ(a.status, 0) << a.err;
    const auto b = qca_cli("split --count 102 --seed 7", dir);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out.find("\"test_patients\""), std::string::npos);
}

TEST(Cli, MissingInputExitsTwo)
{
    const auto dir = scratch("missing");
    const auto r = qca_cli("profile --mask \"" + (dir / "absent.pgm").string() + "\"", dir);
    EXPECT_NE(r.status, 0);
    const auto s = qca_cli("run --input-dir \"" + (dir / "nothing").string() + "\" --mask-dir \"" +
                               (dir / "nothing").string() + "\" --output-dir \"" + dir.string() + "\"",
                           dir);
    EXPECT_EQ(s.status, 2) << s.err;
}
