#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mfg/mfg_solver.hpp"

namespace mfg {

enum class Mode { solve, sweep, validate, particles, pohozaev };
std::string to_string(Mode m);
std::optional<Mode> parse_mode(std::string_view s);

/// Validated run configuration with every default filled in.
struct RunConfig {
    Mode mode = Mode::solve;
    std::string output_dir = "mfg_out";
    std::string run_id = "run";

    int dim = 1;
    int n = 128;
    double gamma = 2.0;
    double c_h = 2.0;
    double alpha = 1.0;
    double c_f = 1.0;
    CouplingSign sign = CouplingSign::focusing;
    /// Text as given: zero, cosine:A,MODES or file:PATH.
    std::string potential = "zero";
    int mollifier_k = 16;

    double theta = 0.5;
    double outer_tol = 1e-8;
    int outer_max_iters = 200;
    double hjb_tol = 1e-10;
    /// 0 selects 0.5 h.
    double hjb_dt = 0.0;
    int hjb_max_steps = 100000;
    double fp_tol = 1e-13;
    int fp_max_iters = 100;
    InitialDensity initial_density;

    std::vector<double> sweep_alphas;
    bool sweep_refine = false;

    std::string input_dir;
    double pohozaev_radius = 0.25;
    std::array<double, 2> pohozaev_center{0.5, 0.5};
    double nls_tol = 1e-10;
    std::optional<double> audit_beta;

    std::uint64_t particles_count = 100'000;
    double particles_horizon = 50.0;
    double particles_dt = 1e-3;
    std::uint64_t seed = 0;

    /// Informational notes produced while parsing, e.g. UNKNOWN-REGIME.
    std::vector<std::string> notes;

    /// Problem description; file potentials are read here.
    MFGProblem problem() const;
};

/// Unknown keys, bad values and a missing mode are reported with the key name and admissible range.
class ConfigError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/**
 * Parses "key = value" lines; '#' starts a comment. mode_hint supplies the
 * mode when the text has none (the CLI subcommand); a conflicting mode in
 * the text is an error.
 */
RunConfig parse_config(std::string_view text, std::optional<Mode> mode_hint = std::nullopt);

/// Re-checks the ranges that depend on more than one key (used after CLI overrides).
void validate_config(RunConfig& c);

}  // namespace mfg
