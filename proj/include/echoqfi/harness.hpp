#pragma once

#include "echoqfi/metrology.hpp"
#include "echoqfi/optimize.hpp"
#include "echoqfi/readout.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace echoqfi {

inline constexpr const char* kVersion = "0.1.0";

/// Convention strings embedded in every run's metadata sidecar.
inline constexpr const char* kGammaConvention =
    "gamma_peripheral = 1, gamma_central = 0.4052 (31P/1H gyromagnetic ratio); "
    "QFI of deviation states reported in units of epsilon^2";
inline constexpr const char* kSqlConvention =
    "SQL = best product-probe QFI, F_SQL = epsilon^2 * sum_j gamma_j^2; "
    "delta_alpha_SQL = 1/sqrt(F_SQL)";
inline constexpr const char* kOptBoundConvention =
    "optimal bound = 1/sqrt(F_opt) with F_opt the QFI of the spectrum-paired probe; "
    "ratio_sq_to_opt = (delta_alpha_opt / delta_alpha)^2";

enum class Study { optimize, delta_sweep, precision, scaling, purity, validate };

struct ExperimentConfig {
    Study study = Study::validate;
    SpinSystem system;
    double epsilon = 1e-5;

    double measurement_sigma = 575.46;
    bool relaxation_enabled = false;
    RelaxationParams relaxation;
    double relax_duration_s = 0.187;
    bool pulse_error_enabled = false;
    bool use_bb1 = true;
    double pulse_sigma = 0.05;

    NmConfig nm;
    double quench = 0.2;
    double deriv_step = 0.0; // defaults to pi/50
    int alpha_points = 256;
    std::array<double, 6> theta{0.0, 1.5707963267948966, 0.0,
                                1.5707963267948966, 0.0, 1.5707963267948966};

    std::vector<double> delta_grid; // defaults to 0.05..0.5 step 0.05
    int delta_trials = 50;

    std::vector<int> scaling_n; // defaults to 4..40 step 4
    std::string scaling_family = "thermal";

    std::vector<double> temperatures_k; // defaults per the purity study

    std::optional<std::uint64_t> seed;
    int workers = 1;
    std::string output; // output file prefix; defaults to the study name
};

/// Parses and validates a config JSON document. Unknown fields anywhere are
/// rejected; a stochastic study without a seed is rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

bool study_is_stochastic(const ExperimentConfig& config);

/// Writes header + rows, each value with 17 significant digits, LF endings.
void emit_csv(const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows, const std::string& path);

/// Deterministic index fan-out: results must be written by index inside fn.
void parallel_for(int count, int workers, const std::function<void(int)>& fn);

/// Resolves worker count: CLI/config value, overridden by ECHOQFI_WORKERS.
int resolve_workers(int configured);

struct RunResult {
    std::vector<std::string> files_written;
    bool ok = true;
};

/// Executes the configured study, writing a CSV data file and a JSON metadata
/// sidecar under out_dir. Identical config+seed produce byte-identical CSVs.
RunResult run(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

struct InvariantCheck {
    std::string name;
    std::function<bool(std::string& detail)> fn;
};

/// The invariant suite behind `validate`: module-level property checks sized
/// to finish in a few minutes.
std::vector<InvariantCheck> invariant_suite();

/// Runs the suite, printing one pass/fail line per check.
bool run_validate(std::ostream& log);

} // namespace echoqfi
