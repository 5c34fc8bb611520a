#include <gtest/gtest.h>

#include "mfg/config.hpp"

using namespace mfg;

namespace {

std::string error_of(std::string_view text, std::optional<Mode> hint = std::nullopt)
{
    try {
        parse_config(text, hint);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Config, DefaultsAreFilledIn)
{
    const auto c = parse_config("mode = solve\ngamma = 2\nalpha = 1\nn = 128\n");
    EXPECT_EQ(c.mode, Mode::solve);
    EXPECT_EQ(c.theta, 0.5);
    EXPECT_EQ(c.sign, CouplingSign::focusing);
    EXPECT_EQ(c.potential, "zero");
    EXPECT_EQ(c.dim, 1);
    EXPECT_EQ(c.mollifier_k, 16);
    EXPECT_EQ(c.c_h, default_c_h(2.0));
    EXPECT_TRUE(c.notes.empty());
}

TEST(Config, GammaRange)
{
    const auto msg = error_of("mode = solve\ngamma = 0.5\n");
    EXPECT_NE(msg.find("gamma"), std::string::npos);
    EXPECT_NE(msg.find("> 1"), std::string::npos) << msg;
}

TEST(Config, EnergyCriticalAlphaIsNoted)
{
    const auto c = parse_config("alpha = 3\ngamma = 3\nn = 128\ndim = 2\n", Mode::solve);
    const auto ce = critical_exponents(c.gamma, c.dim);
    EXPECT_DOUBLE_EQ(ce.alpha1, 0.75);
    EXPECT_DOUBLE_EQ(ce.alpha2, 3.0);
    ASSERT_EQ(c.notes.size(), 1u);
    EXPECT_NE(c.notes[0].find("UNKNOWN-REGIME"), std::string::npos);
}

TEST(Config, ModeHandling)
{
    EXPECT_NE(error_of("n = 64\n").find("mode"), std::string::npos);
    EXPECT_EQ(parse_config("n = 64\n", Mode::pohozaev).mode, Mode::pohozaev);
    EXPECT_NE(error_of("mode = solve\n", Mode::sweep).find("subcommand"), std::string::npos);
    EXPECT_NE(error_of("mode = fly\n").find("mode"), std::string::npos);
}

TEST(Config, SyntaxAndKeyErrors)
{
    EXPECT_NE(error_of("mode = solve\nbogus = 1\n").find("bogus: unknown key"), std::string::npos);
    EXPECT_NE(error_of("mode = solve\nn = 64\nn = 32\n").find("more than once"), std::string::npos);
    EXPECT_NE(error_of("mode = solve\njust words\n").find("line 2"), std::string::npos);
    EXPECT_NE(error_of("mode = solve\nn = 12x\n").find("n"), std::string::npos);
    // comments and blank lines are skipped
    EXPECT_EQ(error_of("# header\n\nmode = solve  # trailing\n"), "");
}

TEST(Config, RangeErrorsNameTheKey)
{
    const std::vector<std::pair<std::string, std::string>> cases = {
        {"theta = 0", "theta"},
        {"theta = 1.5", "theta"},
        {"alpha = -1", "alpha"},
        {"c_f = -2", "c_f"},
        {"dim = 3", "dim"},
        {"n = 4", "n"},
        {"sign = sideways", "sign"},
        {"potential = cosine:-1,1", "potential"},
        {"potential = square", "potential"},
        {"mollifier_k = 1", "mollifier_k"},
        {"n = 16\nmollifier_k = 16", "mollifier"},
        {"outer_tol = 0", "outer_tol"},
        {"initial_density = cosine:2", "initial_density"},
        {"particles_count = 10", "particles_count"},
    };
    for (const auto& [line, key] : cases) {
        const auto msg = error_of("mode = solve\n" + line + "\n");
        EXPECT_NE(msg.find(key), std::string::npos) << line << " -> " << msg;
    }
}

TEST(Config, CrossKeyChecks)
{
    EXPECT_NE(error_of("mode = sweep\n").find("sweep_alphas"), std::string::npos);
    EXPECT_EQ(parse_config("mode = sweep\nsweep_alphas = 0.25, 0.5,5\n").sweep_alphas, (std::vector<double>{0.25, 0.5, 5.0}));
    EXPECT_NE(error_of("mode = pohozaev\nn = 64\npohozaev_radius = 0.02\n").find("pohozaev_radius"), std::string::npos);
    EXPECT_NE(error_of("mode = particles\nn = 64\nparticles_dt = 0.1\n").find("particles_dt"), std::string::npos);
    EXPECT_NE(error_of("mode = validate\ndim = 2\ngamma = 3\naudit_beta = 4\n").find("audit_beta"), std::string::npos);
    EXPECT_NE(error_of("mode = solve\npotential = file:/nonexistent/v.csv\n").find("potential"), std::string::npos);
}

TEST(Config, ProblemReflectsSettings)
{
    const auto c = parse_config(
        "mode = solve\ndim = 2\nn = 32\ngamma = 3\nalpha = 0.5\nc_f = 5\nsign = defocusing\npotential = cosine:2,3\n"
        "theta = 0.25\ninitial_density = bump:2,0.1\nhjb_dt = 0.01\n");
    const auto p = c.problem();
    EXPECT_EQ(p.grid.dim(), 2);
    EXPECT_EQ(p.grid.n(), 32);
    EXPECT_EQ(p.hamiltonian.gamma, 3.0);
    EXPECT_EQ(p.coupling.sign, CouplingSign::defocusing);
    EXPECT_EQ(p.potential.amplitude, 2.0);
    EXPECT_EQ(p.potential.freq, 3);
    EXPECT_EQ(p.theta, 0.25);
    EXPECT_EQ(p.initial.kind, InitialDensity::Kind::bump);
    EXPECT_EQ(p.hjb.dt, 0.01);
    EXPECT_EQ(p.mollifier.k, 4);
}
